//! Per-community accumulation shared by the cover-quality metrics.

use std::collections::BTreeMap;

use crate::belonging::BelongingFunction;
use crate::cover::{CommunityId, FuzzyCover};
use crate::graph::Graph;

/// Weighted structural terms of one community under a belonging function.
///
/// "Weighted" means every edge or node pair contributes the combined
/// belonging weight of its endpoints instead of 1; with all coefficients at
/// 1 the terms reduce to plain counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityTerms {
    pub community: CommunityId,
    /// Fuzzy size: sum of membership coefficients.
    pub size: f64,
    /// Weighted internal edge count.
    pub e_in: f64,
    /// Weighted outgoing edge count, summed once per foreign membership of
    /// the other endpoint (equals the sum of `e_cross` weights).
    pub e_out: f64,
    /// Weighted edge count towards each other community that shares at
    /// least one edge with this one, by ascending community id.
    pub e_cross: Vec<(CommunityId, f64)>,
    /// Weighted internal density: `2 * e_in` over the total pair weight of
    /// distinct member pairs; 0 when that denominator is 0.
    pub d_in: f64,
    /// Weighted cross density towards each community listed in `e_cross`:
    /// cross edge weight over total member-pair weight (shared nodes pair
    /// with themselves); 0 when the denominator is 0.
    pub d_cross: Vec<(CommunityId, f64)>,
}

impl CommunityTerms {
    pub fn intra_edges(&self) -> f64 {
        self.e_in
    }

    pub fn intra_density(&self) -> f64 {
        self.d_in
    }

    /// Average internal degree `2 * e_in / size`; 0 for a size-0 community.
    pub fn contraction(&self) -> f64 {
        if self.size > 0.0 {
            2.0 * self.e_in / self.size
        } else {
            0.0
        }
    }

    pub fn inter_edges(&self) -> f64 {
        self.e_out
    }

    /// Outgoing edges per member `e_out / size`; 0 for a size-0 community.
    pub fn expansion(&self) -> f64 {
        if self.size > 0.0 {
            self.e_out / self.size
        } else {
            0.0
        }
    }

    /// `e_out / (2 * e_in + e_out)`, defined as 0 when the denominator is 0.
    pub fn conductance(&self) -> f64 {
        let denom = 2.0 * self.e_in + self.e_out;
        if denom > 0.0 {
            self.e_out / denom
        } else {
            0.0
        }
    }
}

/// Computes the terms of every community in one pass over the edges plus a
/// pair sweep per community for the densities.
pub(crate) fn compute_terms(
    g: &Graph,
    cover: &FuzzyCover,
    f: BelongingFunction,
) -> Vec<CommunityTerms> {
    let nc = cover.community_count();
    let mut e_in = vec![0.0f64; nc];
    // cross[(c, c')] accumulates weights with the c side on the first stored
    // endpoint; the symmetric total for (c, c') is cross[(c,c')] + cross[(c',c)]
    let mut cross: BTreeMap<(CommunityId, CommunityId), f64> = BTreeMap::new();

    for &(u, v) in g.edges() {
        for &(cu, au) in cover.row(u) {
            for &(cv, av) in cover.row(v) {
                let w = f.combine(au, av);
                if cu == cv {
                    e_in[cu as usize] += w;
                } else {
                    *cross.entry((cu, cv)).or_insert(0.0) += w;
                }
            }
        }
    }

    let mut e_cross: Vec<BTreeMap<CommunityId, f64>> = vec![BTreeMap::new(); nc];
    for (&(c, d), &w) in &cross {
        *e_cross[c as usize].entry(d).or_insert(0.0) += w;
        *e_cross[d as usize].entry(c).or_insert(0.0) += w;
    }

    (0..nc)
        .map(|ci| {
            let c = ci as CommunityId;
            let members = cover.members(c);
            let size: f64 = members.iter().map(|&(_, a)| a).sum();

            let mut pair_weight = 0.0;
            for (idx, &(_, ai)) in members.iter().enumerate() {
                for &(_, aj) in &members[idx + 1..] {
                    pair_weight += 2.0 * f.combine(ai, aj);
                }
            }
            let d_in = if pair_weight > 0.0 {
                2.0 * e_in[ci] / pair_weight
            } else {
                0.0
            };

            let partners: Vec<(CommunityId, f64)> =
                e_cross[ci].iter().map(|(&d, &w)| (d, w)).collect();
            let d_cross = partners
                .iter()
                .map(|&(d, w)| {
                    let mut denom = 0.0;
                    for &(_, ai) in members {
                        for &(_, aj) in cover.members(d) {
                            denom += f.combine(ai, aj);
                        }
                    }
                    (d, if denom > 0.0 { w / denom } else { 0.0 })
                })
                .collect();

            let e_out: f64 = partners.iter().map(|&(_, w)| w).sum();
            CommunityTerms {
                community: c,
                size,
                e_in: e_in[ci],
                e_out,
                e_cross: partners,
                d_in,
                d_cross,
            }
        })
        .collect()
}
