//! Community quality measurement for undirected, unweighted graphs.
//!
//! The crate measures how well a *cover* — a community assignment that may
//! overlap, expressed either as plain node lists (crisp) or as membership
//! coefficients (fuzzy) — fits a graph:
//!
//! * [`metrics::modularity`] and [`metrics::qds`] score partitions;
//! * [`metrics::qov`], [`metrics::qov_prime`], [`metrics::qov_zhang`],
//!   [`metrics::qov_edge`], and [`metrics::qds_ov`] extend them to
//!   overlapping covers via pairwise belonging functions
//!   ([`belonging::BelongingFunction`]);
//! * [`metrics::community_report`] breaks a cover into six per-community
//!   connectivity measures and their aggregates.
//!
//! [`cover`] holds the cover types, their file formats, and the
//! crisp/fuzzy conversions; [`detector::lpa_detect`] produces covers by
//! seeded label propagation; [`experiment`] sweeps a membership threshold
//! over detected or stored covers and tabulates the metrics.

pub mod belonging;
pub mod cover;
pub mod detector;
pub mod experiment;
pub mod graph;
pub mod metrics;

pub use belonging::{BelongingFunction, DEFAULT_LOGISTIC_P};
pub use cover::{
    fuzzy_to_crisp, parse_crisp_cover, parse_fuzzy_cover, serialize_crisp_cover,
    serialize_fuzzy_cover, CoefficientScheme, CommunityId, CoverError, CrispCover, FuzzyCover,
    OrphanPolicy,
};
pub use detector::{lpa_detect, DetectError};
pub use experiment::{
    parse_table_csv, run_experiment, CoverSource, ExperimentConfig, ExperimentError, MetricRow,
    MetricTable, TableFormat, Threshold,
};
pub use graph::{parse_edge_list, EdgeListError, Graph, NodeId, ParsedEdgeList};
pub use metrics::{
    community_report, evaluate, modularity, qds, qds_ov, qov, qov_edge, qov_prime, qov_zhang,
    EvalOptions, Metric, MetricError, QualityReport,
};
