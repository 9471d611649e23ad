//! Shared helpers for the integration suites: brute-force reference
//! implementations of every metric over a dense adjacency matrix, plus
//! graph and cover generators.
//!
//! The reference code deliberately mirrors the defining sums term by term
//! (ordered pairs, explicit community filters, unfactored null models) and
//! shares nothing with the production code paths, so agreement between the
//! two is meaningful.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use commetric_core::{BelongingFunction, CommunityId, FuzzyCover, Graph, NodeId};

/// Dense view of a graph: adjacency matrix, degrees, edge count.
pub struct Dense {
    pub n: usize,
    pub adj: Vec<Vec<f64>>,
    pub deg: Vec<f64>,
    pub m: f64,
}

impl Dense {
    pub fn from_graph(g: &Graph) -> Dense {
        let n = g.node_count();
        let mut adj = vec![vec![0.0; n]; n];
        for &(u, v) in g.edges() {
            adj[u as usize][v as usize] = 1.0;
            adj[v as usize][u as usize] = 1.0;
        }
        let deg: Vec<f64> = (0..n).map(|i| adj[i].iter().sum()).collect();
        Dense {
            n,
            adj,
            deg,
            m: g.edge_count() as f64,
        }
    }
}

/// Dense coefficient matrix: `a[i][c]`, zeros included.
pub type Coeffs = Vec<Vec<f64>>;

pub fn coeffs_of(cover: &FuzzyCover) -> Coeffs {
    let n = cover.node_count();
    let nc = cover.community_count();
    let mut a = vec![vec![0.0; nc]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for &(c, v) in cover.row(i as NodeId) {
            row[c as usize] = v;
        }
    }
    a
}

fn sig(x: f64, p: f64) -> f64 {
    1.0 / (1.0 + (-(2.0 * p * x - p)).exp())
}

fn weight(f: BelongingFunction, a: f64, b: f64) -> f64 {
    match f {
        BelongingFunction::Average => (a + b) / 2.0,
        BelongingFunction::Product => a * b,
        BelongingFunction::Logistic { p } => sig(a, p) * sig(b, p),
    }
}

/// Weighted internal edge sum of community `c`: unordered member pairs
/// joined by an edge.
fn weighted_e_in(d: &Dense, a: &Coeffs, c: usize, f: BelongingFunction) -> f64 {
    let mut sum = 0.0;
    for i in 0..d.n {
        for j in (i + 1)..d.n {
            if d.adj[i][j] > 0.0 && a[i][c] > 0.0 && a[j][c] > 0.0 {
                sum += weight(f, a[i][c], a[j][c]);
            }
        }
    }
    sum
}

/// Weighted edges from community `c` into community `cp`, counting both
/// orientations of every edge whose endpoints belong to `c` and `cp`.
fn weighted_e_cross(d: &Dense, a: &Coeffs, c: usize, cp: usize, f: BelongingFunction) -> f64 {
    let mut sum = 0.0;
    for i in 0..d.n {
        for j in (i + 1)..d.n {
            if d.adj[i][j] == 0.0 {
                continue;
            }
            if a[i][c] > 0.0 && a[j][cp] > 0.0 {
                sum += weight(f, a[i][c], a[j][cp]);
            }
            if a[j][c] > 0.0 && a[i][cp] > 0.0 {
                sum += weight(f, a[j][c], a[i][cp]);
            }
        }
    }
    sum
}

fn weighted_e_out(d: &Dense, a: &Coeffs, c: usize, f: BelongingFunction) -> f64 {
    let nc = a[0].len();
    (0..nc)
        .filter(|&cp| cp != c)
        .map(|cp| weighted_e_cross(d, a, c, cp, f))
        .sum()
}

/// Plain modularity from per-community edge fractions.
pub fn oracle_modularity(d: &Dense, comm_of: &[usize], nc: usize) -> f64 {
    let mut total = 0.0;
    for c in 0..nc {
        let mut e_in = 0.0;
        let mut e_out = 0.0;
        for i in 0..d.n {
            if comm_of[i] != c {
                continue;
            }
            for j in 0..d.n {
                if d.adj[i][j] == 0.0 {
                    continue;
                }
                if comm_of[j] == c {
                    e_in += 0.5; // ordered pass counts internal edges twice
                } else {
                    e_out += 1.0;
                }
            }
        }
        let attached = (2.0 * e_in + e_out) / (2.0 * d.m);
        total += e_in / d.m - attached * attached;
    }
    total
}

/// Modularity density: density-scaled modularity terms plus the pairwise
/// split penalty.
pub fn oracle_qds(d: &Dense, comm_of: &[usize], nc: usize) -> f64 {
    let size = |c: usize| comm_of.iter().filter(|&&x| x == c).count() as f64;
    let edges_between = |c: usize, cp: usize| -> f64 {
        let mut sum = 0.0;
        for i in 0..d.n {
            for j in 0..d.n {
                if comm_of[i] == c && comm_of[j] == cp && d.adj[i][j] > 0.0 {
                    sum += 1.0;
                }
            }
        }
        sum
    };
    let mut total = 0.0;
    for c in 0..nc {
        let n_c = size(c);
        let e_in = edges_between(c, c) / 2.0;
        let e_out: f64 = (0..nc).filter(|&cp| cp != c).map(|cp| edges_between(c, cp)).sum();
        let d_c = if n_c > 1.0 {
            2.0 * e_in / (n_c * (n_c - 1.0))
        } else {
            0.0
        };
        let attached = (2.0 * e_in + e_out) / (2.0 * d.m) * d_c;
        total += e_in / d.m * d_c - attached * attached;
        for cp in 0..nc {
            if cp == c {
                continue;
            }
            let e_cc = edges_between(c, cp);
            let d_cc = e_cc / (n_c * size(cp));
            total -= e_cc / (2.0 * d.m) * d_cc;
        }
    }
    total
}

/// Community-form overlapping modularity.
pub fn oracle_qov(d: &Dense, a: &Coeffs, f: BelongingFunction) -> f64 {
    let nc = a[0].len();
    let mut total = 0.0;
    for c in 0..nc {
        let e_in = weighted_e_in(d, a, c, f);
        let e_out = weighted_e_out(d, a, c, f);
        let attached = (2.0 * e_in + e_out) / (2.0 * d.m);
        total += e_in / d.m - attached * attached;
    }
    total
}

/// Pairwise-form overlapping modularity: the weighted null model summed
/// over ordered member pairs including the diagonal.
pub fn oracle_qov_prime(d: &Dense, a: &Coeffs, f: BelongingFunction) -> f64 {
    let nc = a[0].len();
    let two_m = 2.0 * d.m;
    let mut total = 0.0;
    for c in 0..nc {
        for i in 0..d.n {
            for j in 0..d.n {
                if a[i][c] > 0.0 && a[j][c] > 0.0 {
                    total += (d.adj[i][j] - d.deg[i] * d.deg[j] / two_m)
                        * weight(f, a[i][c], a[j][c]);
                }
            }
        }
    }
    total / two_m
}

/// Averaged-coefficient overlapping modularity with the explicit boundary
/// term towards nodes outside the community.
pub fn oracle_qov_zhang(d: &Dense, a: &Coeffs) -> f64 {
    let nc = a[0].len();
    let mut total = 0.0;
    for c in 0..nc {
        let mut e_in = 0.0;
        let mut e_out = 0.0;
        for i in 0..d.n {
            if a[i][c] == 0.0 {
                continue;
            }
            for j in 0..d.n {
                if d.adj[i][j] == 0.0 {
                    continue;
                }
                if a[j][c] > 0.0 {
                    e_in += 0.5 * (a[i][c] + a[j][c]) / 2.0;
                } else {
                    e_out += (a[i][c] + (1.0 - a[j][c])) / 2.0;
                }
            }
        }
        let attached = (2.0 * e_in + e_out) / (2.0 * d.m);
        total += e_in / d.m - attached * attached;
    }
    total
}

/// Edge-based overlapping modularity with logistic factors; the null model
/// is kept as an explicit double sum over member pairs.
pub fn oracle_qov_edge(d: &Dense, a: &Coeffs, p: f64) -> f64 {
    let nc = a[0].len();
    let n = d.n as f64;
    let two_m = 2.0 * d.m;
    let mut total = 0.0;
    for c in 0..nc {
        let s_c: f64 = (0..d.n).map(|k| sig(a[k][c], p)).sum();
        let beta = |i: usize| sig(a[i][c], p) * s_c / n;
        let mut observed = 0.0;
        let mut null = 0.0;
        for i in 0..d.n {
            if a[i][c] == 0.0 {
                continue;
            }
            for j in 0..d.n {
                if a[j][c] == 0.0 {
                    continue;
                }
                observed += sig(a[i][c], p) * sig(a[j][c], p) * d.adj[i][j];
                null += beta(i) * d.deg[i] * beta(j) * d.deg[j] / two_m;
            }
        }
        total += observed - null;
    }
    total / two_m
}

/// Overlapping modularity density.
pub fn oracle_qds_ov(d: &Dense, a: &Coeffs, f: BelongingFunction) -> f64 {
    let nc = a[0].len();
    let mut total = 0.0;
    for c in 0..nc {
        let e_in = weighted_e_in(d, a, c, f);
        let e_out = weighted_e_out(d, a, c, f);
        // internal pair weight over ordered distinct member pairs
        let mut den_in = 0.0;
        for i in 0..d.n {
            for j in 0..d.n {
                if i != j && a[i][c] > 0.0 && a[j][c] > 0.0 {
                    den_in += weight(f, a[i][c], a[j][c]);
                }
            }
        }
        let d_in = if den_in > 0.0 { 2.0 * e_in / den_in } else { 0.0 };
        let attached = (2.0 * e_in + e_out) / (2.0 * d.m) * d_in;
        total += e_in / d.m * d_in - attached * attached;
        for cp in 0..nc {
            if cp == c {
                continue;
            }
            let e_cc = weighted_e_cross(d, a, c, cp, f);
            // cross pair weight over all member pairs, shared nodes included
            let mut den_cc = 0.0;
            for i in 0..d.n {
                for j in 0..d.n {
                    if a[i][c] > 0.0 && a[j][cp] > 0.0 {
                        den_cc += weight(f, a[i][c], a[j][cp]);
                    }
                }
            }
            let d_cc = if den_cc > 0.0 { e_cc / den_cc } else { 0.0 };
            total -= e_cc / (2.0 * d.m) * d_cc;
        }
    }
    total
}

/// The six per-community structure metrics aggregated as unweighted means
/// over communities with positive total membership:
/// `[intra_edges, intra_density, contraction, inter_edges, expansion,
/// conductance]`.
pub fn oracle_six(d: &Dense, a: &Coeffs, f: BelongingFunction) -> [f64; 6] {
    let nc = a[0].len();
    let mut sums = [0.0; 6];
    let mut counted = 0usize;
    for c in 0..nc {
        let size: f64 = (0..d.n).map(|i| a[i][c]).sum();
        if size == 0.0 {
            continue;
        }
        counted += 1;
        let e_in = weighted_e_in(d, a, c, f);
        let e_out = weighted_e_out(d, a, c, f);
        let mut den_in = 0.0;
        for i in 0..d.n {
            for j in 0..d.n {
                if i != j && a[i][c] > 0.0 && a[j][c] > 0.0 {
                    den_in += weight(f, a[i][c], a[j][c]);
                }
            }
        }
        sums[0] += e_in;
        sums[1] += if den_in > 0.0 { 2.0 * e_in / den_in } else { 0.0 };
        sums[2] += 2.0 * e_in / size;
        sums[3] += e_out;
        sums[4] += e_out / size;
        sums[5] += if 2.0 * e_in + e_out > 0.0 {
            e_out / (2.0 * e_in + e_out)
        } else {
            0.0
        };
    }
    sums.map(|s| if counted > 0 { s / counted as f64 } else { 0.0 })
}

/// Loads the bundled karate club graph (34 nodes, 78 edges).
pub fn karate() -> Graph {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/karate.edges");
    let text = std::fs::read_to_string(path).expect("karate edge list is checked in");
    let parsed = commetric_core::parse_edge_list(&text).expect("karate edge list parses");
    assert_eq!(parsed.graph.node_count(), 34);
    assert_eq!(parsed.graph.edge_count(), 78);
    parsed.graph
}

/// Random connected graph: a random attachment tree plus `extra` random
/// edges.
pub fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
    assert!(n >= 2);
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for i in 1..n as u32 {
        let parent = rng.gen_range(0..i);
        edges.insert((parent, i));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<(u32, u32)> = edges.into_iter().collect();
    Graph::from_edge_ids(n, &edges)
}

/// Random partition of `0..n` into at most `max_parts` non-empty parts.
pub fn random_partition(n: usize, max_parts: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<NodeId>> {
    let parts = rng.gen_range(1..=max_parts);
    let mut communities: Vec<Vec<NodeId>> = vec![Vec::new(); parts];
    for i in 0..n as NodeId {
        communities[rng.gen_range(0..parts)].push(i);
    }
    communities.retain(|c| !c.is_empty());
    communities
}

/// Random cover with genuine overlap: a partition where ~30% of nodes also
/// join one extra community.
pub fn random_overlapping_cover(
    n: usize,
    max_parts: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<NodeId>> {
    let mut communities = random_partition(n, max_parts, rng);
    let parts = communities.len();
    if parts > 1 {
        for i in 0..n as NodeId {
            if rng.gen_bool(0.3) {
                communities[rng.gen_range(0..parts)].push(i);
            }
        }
    }
    communities
}

/// Random fuzzy cover whose coefficients are multiples of 1/16, so every
/// row sums to exactly 1.0 in floating point.
pub fn random_dyadic_cover(
    g: &Graph,
    max_communities: usize,
    rng: &mut ChaCha8Rng,
) -> FuzzyCover {
    let nc = rng.gen_range(1..=max_communities);
    let mut rows = Vec::with_capacity(g.node_count());
    for _ in 0..g.node_count() {
        let k = rng.gen_range(1..=nc.min(3));
        // k distinct communities
        let mut comms: Vec<CommunityId> = (0..nc as CommunityId).collect();
        for i in (1..comms.len()).rev() {
            comms.swap(i, rng.gen_range(0..=i));
        }
        comms.truncate(k);
        comms.sort_unstable();
        // k dyadic parts of 16/16: cuts at distinct positions in 1..16
        let mut cuts: Vec<u32> = Vec::new();
        while cuts.len() < k - 1 {
            let c = rng.gen_range(1..16u32);
            if !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
        cuts.push(16);
        let mut prev = 0u32;
        let mut row = Vec::with_capacity(k);
        for (idx, &cut) in cuts.iter().enumerate() {
            row.push((comms[idx], (cut - prev) as f64 / 16.0));
            prev = cut;
        }
        rows.push(row);
    }
    FuzzyCover::new(g, nc, rows).expect("dyadic rows are valid")
}

fn connected(n: usize, mask: u32, pairs: &[(u32, u32)]) -> bool {
    let mut reach = 1u32; // node 0
    loop {
        let before = reach;
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                if reach & (1 << a) != 0 {
                    reach |= 1 << b;
                }
                if reach & (1 << b) != 0 {
                    reach |= 1 << a;
                }
            }
        }
        if reach == before {
            break;
        }
    }
    reach == (1u32 << n) - 1
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for smaller in permutations(n - 1) {
        for pos in 0..n {
            let mut p = smaller.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Every connected graph on 2..=`max_n` nodes, one representative per
/// isomorphism class.
pub fn small_connected_graphs(max_n: usize) -> Vec<Graph> {
    assert!(max_n <= 5, "edge masks use u32 and permutations are explicit");
    let mut out = Vec::new();
    for n in 2..=max_n {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
            .collect();
        let perms = permutations(n);
        let mut seen = BTreeSet::new();
        for mask in 1u32..(1 << pairs.len()) {
            if !connected(n, mask, &pairs) {
                continue;
            }
            // canonical form: the smallest mask over all node relabelings
            let canon = perms
                .iter()
                .map(|p| {
                    let mut relabeled = 0u32;
                    for (idx, &(a, b)) in pairs.iter().enumerate() {
                        if mask & (1 << idx) != 0 {
                            let (x, y) = (p[a as usize] as u32, p[b as usize] as u32);
                            let (x, y) = (x.min(y), x.max(y));
                            let pos = pairs.iter().position(|&q| q == (x, y)).unwrap();
                            relabeled |= 1 << pos;
                        }
                    }
                    relabeled
                })
                .min()
                .unwrap();
            if seen.insert(canon) {
                let edges: Vec<(u32, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|&(idx, _)| mask & (1 << idx) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                out.push(Graph::from_edge_ids(n, &edges));
            }
        }
    }
    out
}

/// Every cover of `0..n` by 1 to `max_communities` distinct non-empty node
/// sets whose union is all of `0..n`.
pub fn covers_up_to(n: usize, max_communities: usize) -> Vec<Vec<Vec<NodeId>>> {
    let full = (1u32 << n) - 1;
    let to_nodes = |mask: u32| -> Vec<NodeId> {
        (0..n as NodeId).filter(|&i| mask & (1 << i) != 0).collect()
    };
    let mut out = Vec::new();
    out.push(vec![to_nodes(full)]);
    if max_communities >= 2 {
        for a in 1..=full {
            for b in (a + 1)..=full {
                if a | b == full {
                    out.push(vec![to_nodes(a), to_nodes(b)]);
                }
            }
        }
    }
    if max_communities >= 3 {
        for a in 1..=full {
            for b in (a + 1)..=full {
                for c in (b + 1)..=full {
                    if a | b | c == full {
                        out.push(vec![to_nodes(a), to_nodes(b), to_nodes(c)]);
                    }
                }
            }
        }
    }
    assert!(max_communities <= 3, "only small cover spaces are enumerated");
    out
}
