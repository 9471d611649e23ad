//! Seeded speaker–listener label propagation for producing overlapping
//! covers to feed the metrics.
//!
//! Every node starts with its own id as a label memory of size one. Each
//! iteration visits the nodes in a fresh random order; the visited node
//! collects one label from every neighbor (drawn uniformly from that
//! neighbor's memory) and commits the most frequent collected label to its
//! own memory. After `iterations` rounds every memory holds exactly
//! `iterations + 1` label observations; labels seen in at least a fraction
//! `threshold` of them become the node's communities.
//!
//! All randomness comes from a ChaCha8 stream seeded with the caller's
//! `seed`, so identical inputs produce identical covers on every platform.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cover::CrispCover;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("cannot detect communities on an empty graph")]
    EmptyGraph,
    #[error("membership threshold must be in [0, 1], got {0}")]
    BadThreshold(f64),
    #[error("at least one propagation iteration is required")]
    BadIterations,
}

/// Detects overlapping communities by label propagation.
///
/// `threshold` is the fraction of a node's label memory a label needs in
/// order to be kept; at `0.5` and above the result is a partition.
/// Memberships that survive nowhere fall back to the node's most frequent
/// label, so every node lands in at least one community. Communities are
/// numbered by ascending originating label.
pub fn lpa_detect(
    g: &Graph,
    iterations: u32,
    threshold: f64,
    seed: u64,
) -> Result<CrispCover, DetectError> {
    let n = g.node_count();
    if n == 0 {
        return Err(DetectError::EmptyGraph);
    }
    if !(0.0..=1.0).contains(&threshold) || threshold.is_nan() {
        return Err(DetectError::BadThreshold(threshold));
    }
    if iterations == 0 {
        return Err(DetectError::BadIterations);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memory: Vec<BTreeMap<NodeId, u32>> = (0..n)
        .map(|i| BTreeMap::from([(i as NodeId, 1u32)]))
        .collect();
    let mut totals = vec![1u32; n];
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..iterations {
        // Fisher-Yates, driven by the one seeded stream
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for &listener in &order {
            let neighbors = g.neighbors(listener as NodeId);
            let label = if neighbors.is_empty() {
                // nobody to listen to: the node reinforces its own story
                argmax_label(&memory[listener])
            } else {
                let mut received: BTreeMap<NodeId, u32> = BTreeMap::new();
                for &speaker in neighbors {
                    let spoken = draw_label(
                        &memory[speaker as usize],
                        rng.gen_range(0..totals[speaker as usize]),
                    );
                    *received.entry(spoken).or_insert(0) += 1;
                }
                argmax_label(&received)
            };
            *memory[listener].entry(label).or_insert(0) += 1;
            totals[listener] += 1;
        }
    }

    let quota = threshold * (iterations + 1) as f64 - 1e-9;
    let mut buckets: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (i, counts) in memory.iter().enumerate() {
        let mut kept: Vec<NodeId> = counts
            .iter()
            .filter(|&(_, &c)| c as f64 >= quota)
            .map(|(&label, _)| label)
            .collect();
        if kept.is_empty() {
            kept.push(argmax_label(counts));
        } else if threshold >= 0.5 && kept.len() > 1 {
            // two labels can tie at exactly half the memory; a majority
            // threshold promises a partition, so keep the single best
            let best = kept
                .iter()
                .copied()
                .max_by_key(|label| (counts[label], std::cmp::Reverse(*label)))
                .unwrap();
            kept = vec![best];
        }
        for label in kept {
            buckets.entry(label).or_default().push(i as NodeId);
        }
    }

    let communities: Vec<Vec<NodeId>> = buckets.into_values().collect();
    Ok(CrispCover::from_parts(n, communities))
}

/// Most frequent label, lowest id on ties. Non-empty input.
fn argmax_label(counts: &BTreeMap<NodeId, u32>) -> NodeId {
    let mut best = (0u32, 0 as NodeId);
    for (&label, &count) in counts {
        if count > best.0 {
            best = (count, label);
        }
    }
    best.1
}

/// The `index`-th element of the sorted label multiset.
fn draw_label(counts: &BTreeMap<NodeId, u32>, index: u32) -> NodeId {
    let mut remaining = index;
    for (&label, &count) in counts {
        if remaining < count {
            return label;
        }
        remaining -= count;
    }
    unreachable!("index beyond the memory total")
}
