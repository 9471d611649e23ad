//! Conversions between crisp and fuzzy covers.

use std::fmt;

use crate::cover::{CommunityId, CoverError, CrispCover, FuzzyCover};
use crate::graph::{Graph, NodeId};

/// How membership coefficients are derived when fuzzifying a crisp cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientScheme {
    /// `1 / o_i` where `o_i` is how many communities node `i` belongs to.
    #[default]
    Count,
    /// Node `i`'s coefficient in community `c` is the fraction of its
    /// within-community neighbors that lie in `c`. Falls back to `Count` for
    /// nodes with no neighbors in any of their communities.
    Strength,
}

impl CoefficientScheme {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientScheme::Count => "count",
            CoefficientScheme::Strength => "strength",
        }
    }

    /// Applies this scheme to a crisp cover.
    pub fn apply(self, g: &Graph, cover: &CrispCover) -> FuzzyCover {
        match self {
            CoefficientScheme::Count => crisp_to_fuzzy_count(g, cover),
            CoefficientScheme::Strength => crisp_to_fuzzy_strength(g, cover),
        }
    }
}

impl fmt::Display for CoefficientScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for coefficient scheme names that do not parse.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown coefficient scheme {0:?} (expected count or strength)")]
pub struct UnknownScheme(pub String);

impl std::str::FromStr for CoefficientScheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "count" => Ok(CoefficientScheme::Count),
            "strength" => Ok(CoefficientScheme::Strength),
            other => Err(UnknownScheme(other.to_string())),
        }
    }
}

/// Fuzzifies a crisp cover with equal coefficients `1 / o_i` across each
/// node's communities. Disjoint covers map to coefficient 1 everywhere.
pub fn crisp_to_fuzzy_count(g: &Graph, cover: &CrispCover) -> FuzzyCover {
    debug_assert_eq!(g.node_count(), cover.node_count());
    let rows = (0..cover.node_count() as NodeId)
        .map(|i| {
            let communities = cover.membership(i);
            let a = 1.0 / communities.len() as f64;
            communities.iter().map(|&c| (c, a)).collect()
        })
        .collect();
    FuzzyCover::from_rows(cover.community_count(), rows)
}

/// Fuzzifies a crisp cover by neighbor counts: node `i`'s coefficient in
/// community `c` is the number of `i`'s neighbors inside `c` divided by the
/// total number of its neighbors across all of its communities (a neighbor
/// shared by two of `i`'s communities counts once per community).
///
/// A node with no neighbors in any of its communities would divide by zero;
/// such nodes fall back to the count scheme and a warning is logged. Note a
/// coefficient can come out 0 (no neighbors in that particular community),
/// in which case the node no longer belongs to that community.
pub fn crisp_to_fuzzy_strength(g: &Graph, cover: &CrispCover) -> FuzzyCover {
    debug_assert_eq!(g.node_count(), cover.node_count());
    let mut rows: Vec<Vec<(CommunityId, f64)>> = Vec::with_capacity(cover.node_count());
    for i in 0..cover.node_count() as NodeId {
        let communities = cover.membership(i);
        let counts: Vec<usize> = communities
            .iter()
            .map(|&c| {
                let members = cover.members(c);
                g.neighbors(i)
                    .iter()
                    .filter(|&&j| members.binary_search(&j).is_ok())
                    .count()
            })
            .collect();
        let total: usize = counts.iter().sum();
        if total == 0 {
            log::warn!(
                "node {:?} has no neighbors in any of its communities; \
                 falling back to count coefficients for it",
                g.label(i)
            );
            let a = 1.0 / communities.len() as f64;
            rows.push(communities.iter().map(|&c| (c, a)).collect());
            continue;
        }
        rows.push(
            communities
                .iter()
                .zip(&counts)
                .filter(|&(_, &count)| count > 0)
                .map(|(&c, &count)| (c, count as f64 / total as f64))
                .collect(),
        );
    }
    FuzzyCover::from_rows(cover.community_count(), rows)
}

/// Thresholds a fuzzy cover back to a crisp one: node `i` stays in community
/// `c` exactly when its coefficient is strictly greater than `threshold`.
/// A node whose memberships are all removed is reassigned to its
/// largest-coefficient community (ties go to the lowest community id).
/// Communities left empty are dropped and the rest renumbered in order.
pub fn fuzzy_to_crisp(cover: &FuzzyCover, threshold: f64) -> Result<CrispCover, CoverError> {
    if !(0.0..=1.0).contains(&threshold) || threshold.is_nan() {
        return Err(CoverError::ThresholdRange { value: threshold });
    }
    let mut communities: Vec<Vec<NodeId>> = vec![Vec::new(); cover.community_count()];
    for i in 0..cover.node_count() as NodeId {
        let row = cover.row(i);
        let mut kept = false;
        for &(c, a) in row {
            if a > threshold {
                communities[c as usize].push(i);
                kept = true;
            }
        }
        if !kept {
            // row is sorted by community id, so strict `>` keeps the lowest
            // id among ties for the maximum coefficient
            let (best, _) = row
                .iter()
                .fold(None, |acc: Option<(CommunityId, f64)>, &(c, a)| match acc {
                    Some((_, best)) if best >= a => acc,
                    _ => Some((c, a)),
                })
                .expect("fuzzy cover rows are non-empty");
            communities[best as usize].push(i);
        }
    }
    let kept: Vec<Vec<NodeId>> = communities.into_iter().filter(|c| !c.is_empty()).collect();
    Ok(CrispCover::from_parts(cover.node_count(), kept))
}
