//! Aggregate evaluation over a cover: metric rows for tables and
//! per-community structural breakdowns.

use log::warn;

use crate::belonging::{BelongingFunction, DEFAULT_LOGISTIC_P};
use crate::cover::{CommunityId, FuzzyCover};
use crate::graph::Graph;

use super::terms::{compute_terms, CommunityTerms};
use super::{
    ensure_edges, ensure_fuzzy, ensure_pair_function, qds_ov_from_terms, qov_edge, qov_from_terms,
    Metric, MetricError,
};

/// Knobs shared by every metric evaluated over one cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Pairwise belonging function for the coefficient-weighted metrics.
    pub function: BelongingFunction,
    /// Steepness of the logistic factors inside `qov_edge`.
    pub logistic_p: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            function: BelongingFunction::Product,
            logistic_p: DEFAULT_LOGISTIC_P,
        }
    }
}

/// Evaluates the requested metrics on one cover, in canonical row order.
///
/// Accepts any of the nine cover metrics; `q` and `qds` are partition-only
/// and rejected here. The belonging function weights everything except
/// `qov_edge`, which always uses the logistic factors with
/// `opts.logistic_p`.
pub fn evaluate(
    g: &Graph,
    cover: &FuzzyCover,
    opts: EvalOptions,
    metrics: &[Metric],
) -> Result<Vec<(Metric, f64)>, MetricError> {
    let m = ensure_edges(g)?;
    ensure_fuzzy(g, cover)?;
    let rows = Metric::normalize(metrics);
    if let Some(crisp_only) = rows
        .iter()
        .find(|r| matches!(r, Metric::Q | Metric::Qds))
    {
        return Err(MetricError::NeedsCrisp {
            metric: crisp_only.name(),
        });
    }

    let needs_terms = rows.iter().any(|r| !matches!(r, Metric::QovEdge));
    let terms = if needs_terms {
        ensure_pair_function(opts.function)?;
        let terms = compute_terms(g, cover, opts.function);
        warn_excluded(&collect_excluded(&terms));
        Some(terms)
    } else {
        None
    };

    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        let value = match row {
            Metric::QovEdge => qov_edge(g, cover, opts.logistic_p)?,
            Metric::Qov => qov_from_terms(terms.as_deref().unwrap(), m),
            Metric::QdsOv => qds_ov_from_terms(terms.as_deref().unwrap(), m),
            structural => aggregate(structural, terms.as_deref().unwrap()),
        };
        values.push((row, value));
    }
    Ok(values)
}

/// Per-community structural terms plus the six aggregate rows.
#[derive(Debug, Clone)]
pub struct QualityReport {
    /// Terms for every community, including zero-size ones.
    pub communities: Vec<CommunityTerms>,
    /// Communities with zero total membership, excluded from the aggregates.
    pub excluded: Vec<CommunityId>,
    /// Aggregate values: unweighted means over the included communities.
    pub values: Vec<(Metric, f64)>,
}

/// Breaks a cover down into per-community structural terms and the six
/// aggregate connectivity rows (`intra_edges` through `conductance`).
pub fn community_report(
    g: &Graph,
    cover: &FuzzyCover,
    f: BelongingFunction,
) -> Result<QualityReport, MetricError> {
    ensure_edges(g)?;
    ensure_fuzzy(g, cover)?;
    ensure_pair_function(f)?;
    let communities = compute_terms(g, cover, f);
    let excluded = collect_excluded(&communities);
    warn_excluded(&excluded);
    let values = STRUCTURAL
        .iter()
        .map(|&metric| (metric, aggregate(metric, &communities)))
        .collect();
    Ok(QualityReport {
        communities,
        excluded,
        values,
    })
}

const STRUCTURAL: [Metric; 6] = [
    Metric::IntraEdges,
    Metric::IntraDensity,
    Metric::Contraction,
    Metric::InterEdges,
    Metric::Expansion,
    Metric::Conductance,
];

fn collect_excluded(terms: &[CommunityTerms]) -> Vec<CommunityId> {
    terms
        .iter()
        .filter(|t| t.size == 0.0)
        .map(|t| t.community)
        .collect()
}

fn warn_excluded(excluded: &[CommunityId]) {
    if !excluded.is_empty() {
        warn!(
            "excluding {} zero-size communities from aggregate metrics: {:?}",
            excluded.len(),
            excluded
        );
    }
}

fn per_community(metric: Metric, t: &CommunityTerms) -> f64 {
    match metric {
        Metric::IntraEdges => t.intra_edges(),
        Metric::IntraDensity => t.intra_density(),
        Metric::Contraction => t.contraction(),
        Metric::InterEdges => t.inter_edges(),
        Metric::Expansion => t.expansion(),
        Metric::Conductance => t.conductance(),
        other => unreachable!("{other} is not a per-community metric"),
    }
}

fn aggregate(metric: Metric, terms: &[CommunityTerms]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for t in terms {
        if t.size > 0.0 {
            sum += per_community(metric, t);
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
