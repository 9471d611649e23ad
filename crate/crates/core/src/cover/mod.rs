//! Crisp and fuzzy community covers.
//!
//! A *crisp* cover assigns each node to one or more communities outright; a
//! *fuzzy* cover assigns membership coefficients in `(0, 1]` that sum to 1
//! per node. A node "belongs to" a community exactly when its coefficient
//! there is positive; absent coefficients are exactly 0.

mod convert;
mod io;

pub use convert::{
    crisp_to_fuzzy_count, crisp_to_fuzzy_strength, fuzzy_to_crisp, CoefficientScheme,
    UnknownScheme,
};
pub use io::{
    parse_crisp_cover, parse_fuzzy_cover, serialize_crisp_cover, serialize_fuzzy_cover,
    OrphanPolicy,
};

use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Community index within one cover.
pub type CommunityId = u32;

/// Row-sum tolerance accepted when a fuzzy cover is constructed directly.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Row-sum tolerance accepted when loading fuzzy cover files; rows inside
/// the tolerance are renormalized to sum exactly 1.
pub const FILE_ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Errors raised while building, reading, or converting covers.
#[derive(Debug, Error)]
pub enum CoverError {
    #[error("line {line}: unknown node label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: empty community")]
    EmptyCommunityLine { line: usize },
    #[error("community {index} is empty")]
    EmptyCommunity { index: usize },
    #[error("line {line}: malformed entry {entry:?} (expected label:coefficient)")]
    MalformedEntry { line: usize, entry: String },
    #[error("line {line}: node {label:?} appears more than once in the community")]
    DuplicateEntry { line: usize, label: String },
    #[error("line {line}: coefficient {value} for node {label:?} is outside [0, 1]")]
    CoefficientRange {
        line: usize,
        label: String,
        value: f64,
    },
    #[error("node {label:?}: coefficient {value} is outside [0, 1]")]
    CoefficientValue { label: String, value: f64 },
    #[error("node {label:?}: coefficients sum to {sum}, more than {tolerance} away from 1")]
    RowSum {
        label: String,
        sum: f64,
        tolerance: f64,
    },
    #[error("nodes covered by no community: {}", .labels.join(", "))]
    OrphanNodes { labels: Vec<String> },
    #[error("community index {index} out of range: cover has {count} communities")]
    UnknownCommunity { index: usize, count: usize },
    #[error("node id {id} out of range: graph has {nodes} nodes")]
    NodeRange { id: NodeId, nodes: usize },
    #[error("threshold {value} is outside [0, 1]")]
    ThresholdRange { value: f64 },
}

/// A cover by plain node sets. Communities may overlap; every node of the
/// graph belongs to at least one community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrispCover {
    communities: Vec<Vec<NodeId>>,
    membership: Vec<Vec<CommunityId>>,
}

impl CrispCover {
    /// Validates and indexes a community list: node ids must be in range,
    /// every community non-empty (after deduplication), every node covered.
    pub fn new(g: &Graph, communities: Vec<Vec<NodeId>>) -> Result<Self, CoverError> {
        let n = g.node_count();
        let mut normalized = Vec::with_capacity(communities.len());
        for (index, mut members) in communities.into_iter().enumerate() {
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                return Err(CoverError::EmptyCommunity { index });
            }
            if let Some(&id) = members.iter().find(|&&id| id as usize >= n) {
                return Err(CoverError::NodeRange { id, nodes: n });
            }
            normalized.push(members);
        }
        let cover = Self::from_parts(n, normalized);
        let orphans: Vec<String> = (0..n as NodeId)
            .filter(|&i| cover.membership[i as usize].is_empty())
            .map(|i| g.label(i).to_string())
            .collect();
        if !orphans.is_empty() {
            return Err(CoverError::OrphanNodes { labels: orphans });
        }
        Ok(cover)
    }

    /// Builds the membership index without coverage checks; callers guarantee
    /// sorted, deduplicated, in-range, non-empty communities.
    pub(crate) fn from_parts(n: usize, communities: Vec<Vec<NodeId>>) -> Self {
        let mut membership = vec![Vec::new(); n];
        for (c, members) in communities.iter().enumerate() {
            for &i in members {
                membership[i as usize].push(c as CommunityId);
            }
        }
        CrispCover {
            communities,
            membership,
        }
    }

    pub fn node_count(&self) -> usize {
        self.membership.len()
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    /// Member node ids of community `c`, ascending.
    pub fn members(&self, c: CommunityId) -> &[NodeId] {
        &self.communities[c as usize]
    }

    pub fn communities(&self) -> &[Vec<NodeId>] {
        &self.communities
    }

    /// Communities containing node `i`, ascending.
    pub fn membership(&self, i: NodeId) -> &[CommunityId] {
        &self.membership[i as usize]
    }

    /// Number of communities node `i` belongs to (its overlap count).
    pub fn overlap(&self, i: NodeId) -> usize {
        self.membership[i as usize].len()
    }

    /// True when no node belongs to more than one community, i.e. the cover
    /// is a partition.
    pub fn is_disjoint(&self) -> bool {
        self.membership.iter().all(|m| m.len() == 1)
    }
}

/// A cover by membership coefficients. Only positive coefficients are
/// stored; each node's coefficients sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyCover {
    community_count: usize,
    /// node -> ascending (community, coefficient) with coefficient > 0
    rows: Vec<Vec<(CommunityId, f64)>>,
    /// community -> ascending (node, coefficient) with coefficient > 0
    columns: Vec<Vec<(NodeId, f64)>>,
}

impl FuzzyCover {
    /// Validates coefficient rows (one per node, indexed by node id):
    /// community ids in range, coefficients in `[0, 1]` (zeros are dropped),
    /// rows summing to 1 within [`ROW_SUM_TOLERANCE`], no orphan nodes.
    pub fn new(
        g: &Graph,
        community_count: usize,
        rows: Vec<Vec<(CommunityId, f64)>>,
    ) -> Result<Self, CoverError> {
        assert_eq!(rows.len(), g.node_count(), "one coefficient row per node");
        let mut kept = Vec::with_capacity(rows.len());
        let mut orphans = Vec::new();
        for (i, mut row) in rows.into_iter().enumerate() {
            let label = || g.label(i as NodeId).to_string();
            row.sort_unstable_by_key(|&(c, _)| c);
            assert!(
                row.windows(2).all(|w| w[0].0 != w[1].0),
                "duplicate community in coefficient row for {:?}",
                label()
            );
            for &(c, a) in &row {
                if c as usize >= community_count {
                    return Err(CoverError::UnknownCommunity {
                        index: c as usize,
                        count: community_count,
                    });
                }
                if !(0.0..=1.0).contains(&a) || a.is_nan() {
                    return Err(CoverError::CoefficientValue {
                        label: label(),
                        value: a,
                    });
                }
            }
            row.retain(|&(_, a)| a > 0.0);
            if row.is_empty() {
                orphans.push(label());
                continue;
            }
            let sum: f64 = row.iter().map(|&(_, a)| a).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(CoverError::RowSum {
                    label: label(),
                    sum,
                    tolerance: ROW_SUM_TOLERANCE,
                });
            }
            kept.push(row);
        }
        if !orphans.is_empty() {
            return Err(CoverError::OrphanNodes { labels: orphans });
        }
        Ok(Self::from_rows(community_count, kept))
    }

    /// Builds both views from validated rows (positive coefficients only,
    /// sorted by community, sums within tolerance of 1).
    pub(crate) fn from_rows(
        community_count: usize,
        rows: Vec<Vec<(CommunityId, f64)>>,
    ) -> Self {
        let mut columns = vec![Vec::new(); community_count];
        for (i, row) in rows.iter().enumerate() {
            for &(c, a) in row {
                columns[c as usize].push((i as NodeId, a));
            }
        }
        FuzzyCover {
            community_count,
            rows,
            columns,
        }
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    /// Positive coefficients of node `i` by ascending community id.
    pub fn row(&self, i: NodeId) -> &[(CommunityId, f64)] {
        &self.rows[i as usize]
    }

    /// Positive coefficients within community `c` by ascending node id.
    pub fn members(&self, c: CommunityId) -> &[(NodeId, f64)] {
        &self.columns[c as usize]
    }

    /// Membership coefficient of node `i` in community `c`; 0 when absent.
    pub fn coefficient(&self, i: NodeId, c: CommunityId) -> f64 {
        let row = &self.rows[i as usize];
        match row.binary_search_by_key(&c, |&(cc, _)| cc) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Fuzzy community size: the sum of coefficients in community `c`.
    /// Errors when `c` is out of range.
    pub fn community_size(&self, c: CommunityId) -> Result<f64, CoverError> {
        if c as usize >= self.community_count {
            return Err(CoverError::UnknownCommunity {
                index: c as usize,
                count: self.community_count,
            });
        }
        Ok(self.columns[c as usize].iter().map(|&(_, a)| a).sum())
    }
}
