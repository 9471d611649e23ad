//! The threshold-sweep experiment: evaluate a set of metrics over covers
//! obtained at a range of membership thresholds, aggregate per threshold,
//! and produce a comparison table.
//!
//! Covers either come from files (one directory per threshold, one cover
//! file per sample) or from the built-in label propagation detector run
//! once per seed. Either way each crisp cover is fuzzified with the
//! configured coefficient scheme before evaluation, sample values are
//! averaged per threshold, and the best column per metric row is marked.

mod table;

pub use table::{parse_table_csv, MetricRow, MetricTable, TableFormat, UnknownFormat};

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use thiserror::Error;

use crate::belonging::{BelongingFunction, DEFAULT_LOGISTIC_P};
use crate::cover::{parse_crisp_cover, CoefficientScheme, CoverError, CrispCover, OrphanPolicy};
use crate::detector::{lpa_detect, DetectError};
use crate::graph::{parse_edge_list, EdgeListError, Graph};
use crate::metrics::{evaluate, EvalOptions, Metric, MetricError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected key = value, got {text:?}")]
    MalformedConfig { line: usize, text: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: {key} set twice")]
    DuplicateKey { line: usize, key: String },
    #[error("config line {line}: bad value for {key}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("config does not name a graph")]
    MissingGraph,
    #[error("config needs a cover source: either covers_dir or detector_seeds")]
    MissingSource,
    #[error("covers_dir and detector_seeds are mutually exclusive")]
    ConflictingSources,
    #[error("no sample covers (*.cover) for threshold {threshold} in {dir}")]
    NoSamples { dir: PathBuf, threshold: String },
    #[error("threshold {threshold} is missing sample {sample:?}")]
    MissingSample { threshold: String, sample: String },
    #[error("bad table: {0}")]
    BadTable(String),
    #[error("table has no rows")]
    EmptyTable,
    #[error("graph: {0}")]
    Graph(#[from] EdgeListError),
    #[error("cover {path}: {source}")]
    Cover {
        path: PathBuf,
        #[source]
        source: CoverError,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Detect(#[from] DetectError),
}

/// One membership threshold of the sweep. The original spelling is kept
/// because it names the per-threshold cover directory (`r<text>`) and the
/// table column (`r_<text>`).
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub text: String,
    pub value: f64,
}

impl Threshold {
    pub fn parse(s: &str) -> Result<Self, String> {
        let value: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(format!("threshold {s} is outside [0, 1]"));
        }
        Ok(Threshold {
            text: s.to_string(),
            value,
        })
    }

    /// Table column header for this threshold.
    pub fn column(&self) -> String {
        format!("r_{}", self.text)
    }

    /// Name of the per-threshold directory inside a covers directory.
    pub fn directory(&self) -> String {
        format!("r{}", self.text)
    }
}

/// Where the covers of the sweep come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverSource {
    /// `<dir>/r<threshold>/<sample>.cover` files, one directory per
    /// threshold; every directory must hold the same sample file names.
    Directory(PathBuf),
    /// Run label propagation once per seed at every threshold.
    Detector { iterations: u32, seeds: Vec<u64> },
}

pub const DEFAULT_THRESHOLD_TEXTS: [&str; 11] = [
    "0.01", "0.05", "0.1", "0.15", "0.2", "0.25", "0.3", "0.35", "0.4", "0.45", "0.5",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: PathBuf,
    pub source: CoverSource,
    pub thresholds: Vec<Threshold>,
    pub scheme: CoefficientScheme,
    pub function: BelongingFunction,
    pub logistic_p: f64,
    pub metrics: Vec<Metric>,
    pub format: TableFormat,
    pub precision: usize,
    pub per_sample: bool,
    pub allow_orphans: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Reads and parses a config file; relative paths inside it are
    /// resolved against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = read_file(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses the flat `key = value` config format. Blank lines and `#`
    /// comments are skipped; every key may appear at most once.
    ///
    /// Keys: `graph`, `covers_dir`, `detector_seeds`, `detector_iterations`,
    /// `thresholds`, `scheme`, `function`, `logistic_p`, `metrics`,
    /// `format`, `precision`, `per_sample`, `allow_orphans`, `output`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut graph: Option<PathBuf> = None;
        let mut covers_dir: Option<PathBuf> = None;
        let mut detector_seeds: Option<Vec<u64>> = None;
        let mut detector_iterations: Option<u32> = None;
        let mut thresholds: Option<Vec<Threshold>> = None;
        let mut scheme: Option<CoefficientScheme> = None;
        let mut function_name: Option<String> = None;
        let mut logistic_p: Option<f64> = None;
        let mut metrics: Option<Vec<Metric>> = None;
        let mut format: Option<TableFormat> = None;
        let mut precision: Option<usize> = None;
        let mut per_sample: Option<bool> = None;
        let mut allow_orphans: Option<bool> = None;
        let mut output: Option<PathBuf> = None;
        let mut seen = BTreeSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                ExperimentError::MalformedConfig {
                    line,
                    text: trimmed.to_string(),
                }
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(ExperimentError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            let bad = |message: String| ExperimentError::BadValue {
                line,
                key: key.to_string(),
                message,
            };
            match key {
                "graph" => graph = Some(base_dir.join(value)),
                "covers_dir" => covers_dir = Some(base_dir.join(value)),
                "output" => output = Some(base_dir.join(value)),
                "detector_seeds" => detector_seeds = Some(parse_seeds(value).map_err(bad)?),
                "detector_iterations" => {
                    let n: u32 = value.parse().map_err(|_| {
                        bad(format!("expected a positive integer, got {value:?}"))
                    })?;
                    if n == 0 {
                        return Err(bad("at least one iteration is required".into()));
                    }
                    detector_iterations = Some(n);
                }
                "thresholds" => {
                    let parsed = value
                        .split(',')
                        .map(|s| Threshold::parse(s.trim()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(bad)?;
                    if parsed.is_empty() {
                        return Err(bad("at least one threshold is required".into()));
                    }
                    if parsed.windows(2).any(|w| w[0].value >= w[1].value) {
                        return Err(bad("thresholds must be strictly increasing".into()));
                    }
                    thresholds = Some(parsed);
                }
                "scheme" => scheme = Some(value.parse().map_err(|e: crate::cover::UnknownScheme| bad(e.to_string()))?),
                "function" => {
                    // steepness may be set on a later line; validate the
                    // name now, build the function afterwards
                    BelongingFunction::parse(value, DEFAULT_LOGISTIC_P)
                        .map_err(|e| bad(e.to_string()))?;
                    function_name = Some(value.to_string());
                }
                "logistic_p" => {
                    let p: f64 = value
                        .parse()
                        .map_err(|_| bad(format!("expected a number, got {value:?}")))?;
                    if !p.is_finite() {
                        return Err(bad("steepness must be finite".into()));
                    }
                    logistic_p = Some(p);
                }
                "metrics" => {
                    let parsed = value
                        .split(',')
                        .map(|s| s.trim().parse::<Metric>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| bad(e.to_string()))?;
                    if let Some(crisp_only) = parsed
                        .iter()
                        .find(|m| matches!(m, Metric::Q | Metric::Qds))
                    {
                        return Err(bad(format!(
                            "{crisp_only} needs a plain partition; the sweep evaluates \
                             coefficient covers"
                        )));
                    }
                    let normalized = Metric::normalize(&parsed);
                    if normalized.is_empty() {
                        return Err(bad("at least one metric is required".into()));
                    }
                    metrics = Some(normalized);
                }
                "format" => {
                    format = Some(value.parse().map_err(|e: UnknownFormat| bad(e.to_string()))?)
                }
                "precision" => {
                    let n: usize = value.parse().map_err(|_| {
                        bad(format!("expected a positive integer, got {value:?}"))
                    })?;
                    if n == 0 {
                        return Err(bad("precision must be at least 1".into()));
                    }
                    precision = Some(n);
                }
                "per_sample" => per_sample = Some(parse_bool(value).map_err(bad)?),
                "allow_orphans" => allow_orphans = Some(parse_bool(value).map_err(bad)?),
                other => {
                    return Err(ExperimentError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }

        let graph = graph.ok_or(ExperimentError::MissingGraph)?;
        let source = match (covers_dir, detector_seeds) {
            (Some(_), Some(_)) => return Err(ExperimentError::ConflictingSources),
            (None, None) => return Err(ExperimentError::MissingSource),
            (Some(dir), None) => CoverSource::Directory(dir),
            (None, Some(seeds)) => CoverSource::Detector {
                iterations: detector_iterations.unwrap_or(20),
                seeds,
            },
        };
        let logistic_p = logistic_p.unwrap_or(DEFAULT_LOGISTIC_P);
        let function = match function_name {
            Some(name) => BelongingFunction::parse(&name, logistic_p).expect("validated above"),
            None => BelongingFunction::Product,
        };
        Ok(ExperimentConfig {
            graph,
            source,
            thresholds: thresholds.unwrap_or_else(default_thresholds),
            scheme: scheme.unwrap_or_default(),
            function,
            logistic_p,
            metrics: metrics.unwrap_or_else(|| Metric::DEFAULT_ROWS.to_vec()),
            format: format.unwrap_or_default(),
            precision: precision.unwrap_or(4),
            per_sample: per_sample.unwrap_or(false),
            allow_orphans: allow_orphans.unwrap_or(false),
            output,
        })
    }
}

pub fn default_thresholds() -> Vec<Threshold> {
    DEFAULT_THRESHOLD_TEXTS
        .iter()
        .map(|t| Threshold::parse(t).expect("defaults parse"))
        .collect()
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

/// Seed lists: comma-separated integers and/or half-open `a..b` ranges
/// (`1..4` means seeds 1, 2, 3).
fn parse_seeds(value: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for piece in value.split(',') {
        let piece = piece.trim();
        if let Some((a, b)) = piece.split_once("..") {
            let start: u64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad range start in {piece:?}"))?;
            let end: u64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad range end in {piece:?}"))?;
            if end <= start {
                return Err(format!("range {piece:?} is empty"));
            }
            out.extend(start..end);
        } else {
            out.push(
                piece
                    .parse()
                    .map_err(|_| format!("bad seed {piece:?}"))?,
            );
        }
    }
    if out.is_empty() {
        return Err("at least one seed is required".into());
    }
    Ok(out)
}

fn read_file(path: &Path) -> Result<String, ExperimentError> {
    std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The covers of one threshold, with the labels that identify samples
/// across thresholds (file stems, or `s<seed>` for detector runs).
struct SampleSet {
    labels: Vec<String>,
    covers: Vec<Vec<CrispCover>>, // [threshold][sample]
}

fn load_directory_covers(
    g: &Graph,
    dir: &Path,
    thresholds: &[Threshold],
    orphans: OrphanPolicy,
) -> Result<SampleSet, ExperimentError> {
    let mut labels: Option<Vec<String>> = None;
    let mut covers = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        let tdir = dir.join(t.directory());
        let entries = std::fs::read_dir(&tdir).map_err(|source| ExperimentError::Io {
            path: tdir.clone(),
            source,
        })?;
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|name| Path::new(name).extension().is_some_and(|x| x == "cover"))
            .collect();
        names.sort();
        if names.is_empty() {
            return Err(ExperimentError::NoSamples {
                dir: tdir,
                threshold: t.text.clone(),
            });
        }
        let stems: Vec<String> = names
            .iter()
            .map(|n| {
                Path::new(n)
                    .file_stem()
                    .expect("names with .cover extension have stems")
                    .to_string_lossy()
                    .into_owned()
            })
            .collect();
        match &labels {
            None => labels = Some(stems),
            Some(expected) => {
                if let Some(missing) = expected.iter().find(|s| !stems.contains(s)) {
                    return Err(ExperimentError::MissingSample {
                        threshold: t.text.clone(),
                        sample: missing.clone(),
                    });
                }
                if let Some(extra) = stems.iter().find(|s| !expected.contains(s)) {
                    return Err(ExperimentError::MissingSample {
                        threshold: thresholds[0].text.clone(),
                        sample: extra.clone(),
                    });
                }
            }
        }
        let mut row = Vec::with_capacity(names.len());
        for name in &names {
            let path = tdir.join(name);
            let text = read_file(&path)?;
            let cover = parse_crisp_cover(&text, g, orphans)
                .map_err(|source| ExperimentError::Cover { path, source })?;
            row.push(cover);
        }
        covers.push(row);
    }
    Ok(SampleSet {
        labels: labels.expect("at least one threshold"),
        covers,
    })
}

/// Runs the sweep and assembles the aggregate table. Columns are the
/// thresholds in config order; with `per_sample` the individual sample
/// columns (named `r_<t>#<sample>`) follow the aggregate columns.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricTable, ExperimentError> {
    let parsed = parse_edge_list(&read_file(&config.graph)?)?;
    if parsed.duplicate_edges > 0 {
        warn!(
            "{}: ignored {} duplicate edges",
            config.graph.display(),
            parsed.duplicate_edges
        );
    }
    let g = parsed.graph;
    let rows = Metric::normalize(&config.metrics);
    let opts = EvalOptions {
        function: config.function,
        logistic_p: config.logistic_p,
    };
    let orphans = if config.allow_orphans {
        OrphanPolicy::Singleton
    } else {
        OrphanPolicy::Reject
    };

    // values[threshold][sample][row]
    let (labels, values) = match &config.source {
        CoverSource::Directory(dir) => {
            let set = load_directory_covers(&g, dir, &config.thresholds, orphans)?;
            let jobs: Vec<&CrispCover> = set.covers.iter().flatten().collect();
            let results: Vec<Result<Vec<f64>, ExperimentError>> = jobs
                .par_iter()
                .map(|crisp| {
                    let fuzzy = config.scheme.apply(&g, crisp);
                    let values = evaluate(&g, &fuzzy, opts, &rows)?;
                    Ok(values.into_iter().map(|(_, v)| v).collect())
                })
                .collect();
            (set.labels, collate(results, config.thresholds.len())?)
        }
        CoverSource::Detector { iterations, seeds } => {
            let labels = seeds.iter().map(|s| format!("s{s}")).collect();
            let jobs: Vec<(f64, u64)> = config
                .thresholds
                .iter()
                .flat_map(|t| seeds.iter().map(|&s| (t.value, s)))
                .collect();
            let results: Vec<Result<Vec<f64>, ExperimentError>> = jobs
                .par_iter()
                .map(|&(threshold, seed)| {
                    let crisp = lpa_detect(&g, *iterations, threshold, seed)?;
                    let fuzzy = config.scheme.apply(&g, &crisp);
                    let values = evaluate(&g, &fuzzy, opts, &rows)?;
                    Ok(values.into_iter().map(|(_, v)| v).collect())
                })
                .collect();
            (labels, collate(results, config.thresholds.len())?)
        }
    };

    let sample_count = labels.len();
    let mut columns: Vec<String> = config.thresholds.iter().map(Threshold::column).collect();
    if config.per_sample {
        for t in &config.thresholds {
            for label in &labels {
                columns.push(format!("{}#{label}", t.column()));
            }
        }
    }

    let mut table_rows = Vec::with_capacity(rows.len());
    for (r, &metric) in rows.iter().enumerate() {
        let mut row_values = Vec::with_capacity(columns.len());
        for per_sample in &values {
            let sum: f64 = per_sample.iter().map(|sample| sample[r]).sum();
            row_values.push(sum / sample_count as f64);
        }
        if config.per_sample {
            for per_sample in &values {
                for sample in per_sample {
                    row_values.push(sample[r]);
                }
            }
        }
        table_rows.push(MetricRow {
            metric,
            values: row_values,
            best: None,
        });
    }
    let mut table = MetricTable {
        columns,
        rows: table_rows,
    };
    table.mark_best(config.thresholds.len());
    Ok(table)
}

/// Splits the flat, job-ordered result list back into per-threshold groups,
/// surfacing the first error in job order so failures are deterministic
/// under parallel execution.
fn collate(
    results: Vec<Result<Vec<f64>, ExperimentError>>,
    threshold_count: usize,
) -> Result<Vec<Vec<Vec<f64>>>, ExperimentError> {
    let mut flat = Vec::with_capacity(results.len());
    for result in results {
        flat.push(result?);
    }
    let per_threshold = flat.len() / threshold_count;
    let mut out = Vec::with_capacity(threshold_count);
    let mut iter = flat.into_iter();
    for _ in 0..threshold_count {
        out.push(iter.by_ref().take(per_threshold).collect());
    }
    Ok(out)
}
