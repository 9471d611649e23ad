//! Reading and writing cover files.
//!
//! Crisp format: one community per line, whitespace-separated node labels.
//! Fuzzy format: one community per line, whitespace-separated
//! `label:coefficient` entries.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cover::{CommunityId, CoverError, CrispCover, FuzzyCover, FILE_ROW_SUM_TOLERANCE};
use crate::graph::{Graph, NodeId};

/// What to do with nodes of the graph that no community claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrphanPolicy {
    /// Fail with [`CoverError::OrphanNodes`] listing the uncovered labels.
    #[default]
    Reject,
    /// Append one singleton community per orphan node, in ascending node id
    /// order (coefficient 1 in fuzzy covers).
    Singleton,
}

/// Parses crisp cover text against `g`. Every line must name at least one
/// known node label; repeated labels within a line collapse to one member.
pub fn parse_crisp_cover(
    text: &str,
    g: &Graph,
    orphans: OrphanPolicy,
) -> Result<CrispCover, CoverError> {
    let mut communities: Vec<Vec<NodeId>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let mut members: Vec<NodeId> = Vec::new();
        for token in raw.split_whitespace() {
            let id = g.node_id(token).ok_or_else(|| CoverError::UnknownLabel {
                line,
                label: token.to_string(),
            })?;
            members.push(id);
        }
        if members.is_empty() {
            return Err(CoverError::EmptyCommunityLine { line });
        }
        members.sort_unstable();
        members.dedup();
        communities.push(members);
    }
    if communities.is_empty() {
        return Err(CoverError::EmptyCommunityLine { line: 1 });
    }
    if orphans == OrphanPolicy::Singleton {
        append_singletons(g, &mut communities);
    }
    CrispCover::new(g, communities)
}

fn append_singletons(g: &Graph, communities: &mut Vec<Vec<NodeId>>) {
    let mut covered = vec![false; g.node_count()];
    for members in communities.iter() {
        for &i in members {
            if (i as usize) < covered.len() {
                covered[i as usize] = true;
            }
        }
    }
    for i in 0..g.node_count() {
        if !covered[i] {
            communities.push(vec![i as NodeId]);
        }
    }
}

/// Serializes a crisp cover: one community per line, member labels in
/// ascending node id order. Output is deterministic for a given cover.
pub fn serialize_crisp_cover(g: &Graph, cover: &CrispCover) -> String {
    let mut out = String::new();
    for members in cover.communities() {
        let mut first = true;
        for &i in members {
            if !first {
                out.push(' ');
            }
            out.push_str(g.label(i));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Parses fuzzy cover text against `g`. Each node's coefficients must sum to
/// 1 within [`FILE_ROW_SUM_TOLERANCE`]; accepted rows are renormalized to sum
/// exactly 1.
pub fn parse_fuzzy_cover(
    text: &str,
    g: &Graph,
    orphans: OrphanPolicy,
) -> Result<FuzzyCover, CoverError> {
    // entries[(node, community)] with first-seen line for duplicate checks
    let mut rows: Vec<Vec<(CommunityId, f64)>> = vec![Vec::new(); g.node_count()];
    let mut community_count = 0usize;
    let mut seen_on_line: HashMap<NodeId, usize> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.split_whitespace().next().is_none() {
            return Err(CoverError::EmptyCommunityLine { line });
        }
        let community = community_count as CommunityId;
        community_count += 1;
        seen_on_line.clear();
        for entry in raw.split_whitespace() {
            let (label, value) = entry.rsplit_once(':').ok_or_else(|| {
                CoverError::MalformedEntry {
                    line,
                    entry: entry.to_string(),
                }
            })?;
            let id = g.node_id(label).ok_or_else(|| CoverError::UnknownLabel {
                line,
                label: label.to_string(),
            })?;
            let a: f64 = value.parse().map_err(|_| CoverError::MalformedEntry {
                line,
                entry: entry.to_string(),
            })?;
            if !(0.0..=1.0).contains(&a) || a.is_nan() {
                return Err(CoverError::CoefficientRange {
                    line,
                    label: label.to_string(),
                    value: a,
                });
            }
            if seen_on_line.insert(id, line).is_some() {
                return Err(CoverError::DuplicateEntry {
                    line,
                    label: label.to_string(),
                });
            }
            if a > 0.0 {
                rows[id as usize].push((community, a));
            }
        }
    }
    if community_count == 0 {
        return Err(CoverError::EmptyCommunityLine { line: 1 });
    }

    if orphans == OrphanPolicy::Singleton {
        for i in 0..g.node_count() {
            if rows[i].is_empty() {
                rows[i].push((community_count as CommunityId, 1.0));
                community_count += 1;
            }
        }
    }

    let mut orphan_labels = Vec::new();
    for (i, row) in rows.iter_mut().enumerate() {
        if row.is_empty() {
            orphan_labels.push(g.label(i as NodeId).to_string());
            continue;
        }
        let sum: f64 = row.iter().map(|&(_, a)| a).sum();
        if (sum - 1.0).abs() > FILE_ROW_SUM_TOLERANCE {
            return Err(CoverError::RowSum {
                label: g.label(i as NodeId).to_string(),
                sum,
                tolerance: FILE_ROW_SUM_TOLERANCE,
            });
        }
        for (_, a) in row.iter_mut() {
            *a /= sum;
        }
    }
    if !orphan_labels.is_empty() {
        return Err(CoverError::OrphanNodes {
            labels: orphan_labels,
        });
    }
    Ok(FuzzyCover::from_rows(community_count, rows))
}

/// Serializes a fuzzy cover: one community per line, `label:coefficient`
/// entries in ascending node id order. Coefficients are written with the
/// shortest decimal form that parses back to the same value. Communities
/// with no positive coefficient cannot be represented in the file format and
/// are skipped, so community indices may compact on reload.
pub fn serialize_fuzzy_cover(g: &Graph, cover: &FuzzyCover) -> String {
    let mut out = String::new();
    for c in 0..cover.community_count() as CommunityId {
        if cover.members(c).is_empty() {
            continue;
        }
        let mut first = true;
        for &(i, a) in cover.members(c) {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{}:{}", g.label(i), a);
            first = false;
        }
        out.push('\n');
    }
    out
}
