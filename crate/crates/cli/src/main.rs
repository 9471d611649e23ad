//! `commetric`: community quality measurement from the command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use commetric_core::{
    community_report, evaluate, fuzzy_to_crisp, lpa_detect, modularity, parse_crisp_cover,
    parse_edge_list, parse_fuzzy_cover, qds, run_experiment, serialize_crisp_cover,
    serialize_fuzzy_cover, BelongingFunction, CoefficientScheme, CrispCover, EvalOptions,
    ExperimentConfig, ExperimentError, FuzzyCover, Graph, Metric, MetricError, OrphanPolicy,
    TableFormat, DEFAULT_LOGISTIC_P,
};

#[derive(Parser)]
#[command(
    name = "commetric",
    version,
    about = "Measure community quality on undirected graphs",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate quality metrics for a cover on a graph
    Metrics(MetricsArgs),
    /// Convert a cover between crisp and fuzzy form
    Convert(ConvertArgs),
    /// Detect overlapping communities by seeded label propagation
    Detect(DetectArgs),
    /// Run a threshold-sweep experiment described by a config file
    RunExperiment(RunExperimentArgs),
}

#[derive(clap::Args)]
struct MetricsArgs {
    /// Edge list file (two whitespace-separated labels per line)
    #[arg(long)]
    graph: PathBuf,
    /// Cover file: node lists by default, coefficients with --fuzzy
    #[arg(long)]
    cover: PathBuf,
    /// Treat the cover file as membership coefficients
    #[arg(long)]
    fuzzy: bool,
    /// Metric to evaluate; repeatable, accepts comma-separated lists
    #[arg(long = "metric", value_delimiter = ',')]
    metrics: Vec<String>,
    /// Coefficient scheme used to fuzzify a crisp cover
    #[arg(long, default_value = "count")]
    scheme: String,
    /// Belonging function for the coefficient-weighted metrics
    #[arg(long, default_value = "product")]
    function: String,
    /// Steepness of the logistic factors in qov_edge
    #[arg(long, default_value_t = DEFAULT_LOGISTIC_P)]
    logistic_p: f64,
    /// Append a per-community breakdown
    #[arg(long)]
    per_community: bool,
    /// Put nodes missing from the cover into singleton communities
    #[arg(long)]
    allow_orphans: bool,
    /// Decimal places for printed values
    #[arg(long, default_value_t = 4)]
    precision: usize,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["csv", "tsv", "markdown"])]
    format: String,
}

#[derive(clap::Args)]
struct ConvertArgs {
    /// Edge list file the cover refers to
    #[arg(long)]
    graph: PathBuf,
    /// Cover file to convert
    #[arg(long)]
    input: PathBuf,
    /// Target form
    #[arg(long, value_parser = ["fuzzy", "crisp"])]
    to: String,
    /// Coefficient scheme when fuzzifying
    #[arg(long, default_value = "count")]
    scheme: String,
    /// Membership threshold when going crisp: keep coefficients above it
    #[arg(long, required_if_eq("to", "crisp"))]
    threshold: Option<f64>,
    /// Destination file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Put nodes missing from the cover into singleton communities
    #[arg(long)]
    allow_orphans: bool,
}

#[derive(clap::Args)]
struct DetectArgs {
    /// Edge list file
    #[arg(long)]
    graph: PathBuf,
    /// Label propagation rounds
    #[arg(long, default_value_t = 20)]
    iterations: u32,
    /// Fraction of a node's label memory a community label must reach
    #[arg(long = "r", visible_alias = "threshold", default_value_t = 0.5)]
    r: f64,
    /// Seed for the random stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RunExperimentArgs {
    /// Experiment config file (flat key = value lines)
    #[arg(long)]
    config: PathBuf,
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Warn
    }

    fn log(&self, record: &log::Record) {
        if self.enabled(record.metadata()) {
            eprintln!(
                "{}: {}",
                record.level().as_str().to_lowercase(),
                record.args()
            );
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(log::LevelFilter::Warn);
    }
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

/// 2 when the metric itself was undefined on the input (a graph with no
/// edges); 1 for every other failure.
fn exit_code(err: &anyhow::Error) -> i32 {
    if matches!(
        err.downcast_ref::<MetricError>(),
        Some(MetricError::NoEdges)
    ) {
        return 2;
    }
    if matches!(
        err.downcast_ref::<ExperimentError>(),
        Some(ExperimentError::Metric(MetricError::NoEdges))
    ) {
        return 2;
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Metrics(args) => cmd_metrics(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Detect(args) => cmd_detect(args),
        Command::RunExperiment(args) => cmd_run_experiment(args),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| path.display().to_string())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let parsed = parse_edge_list(&read_file(path)?)
        .with_context(|| path.display().to_string())?;
    if parsed.duplicate_edges > 0 {
        log::warn!(
            "{}: ignored {} duplicate edges",
            path.display(),
            parsed.duplicate_edges
        );
    }
    Ok(parsed.graph)
}

fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, content).with_context(|| path.display().to_string()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn orphan_policy(allow: bool) -> OrphanPolicy {
    if allow {
        OrphanPolicy::Singleton
    } else {
        OrphanPolicy::Reject
    }
}

fn parse_metric_names(names: &[String]) -> Result<Vec<Metric>> {
    if names.is_empty() {
        return Ok(Metric::DEFAULT_ROWS.to_vec());
    }
    let parsed = names
        .iter()
        .map(|name| name.trim().parse::<Metric>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Metric::normalize(&parsed))
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    if g.edge_count() == 0 {
        // every metric divides by the edge count; fail before touching the
        // cover so the dedicated exit code is reported
        return Err(MetricError::NoEdges.into());
    }
    let format: TableFormat = args.format.parse()?;
    let scheme: CoefficientScheme = args.scheme.parse()?;
    let function = BelongingFunction::parse(&args.function, args.logistic_p)?;
    let rows = parse_metric_names(&args.metrics)?;
    let cover_text = read_file(&args.cover)?;
    let policy = orphan_policy(args.allow_orphans);

    // q and qds need the crisp cover itself; everything else is evaluated
    // on the fuzzy form
    let (crisp, fuzzy): (Option<CrispCover>, FuzzyCover) = if args.fuzzy {
        let cover = parse_fuzzy_cover(&cover_text, &g, policy)
            .with_context(|| args.cover.display().to_string())?;
        (None, cover)
    } else {
        let cover = parse_crisp_cover(&cover_text, &g, policy)
            .with_context(|| args.cover.display().to_string())?;
        let fuzzy = scheme.apply(&g, &cover);
        (Some(cover), fuzzy)
    };

    let opts = EvalOptions {
        function,
        logistic_p: args.logistic_p,
    };
    let fuzzy_rows: Vec<Metric> = rows
        .iter()
        .copied()
        .filter(|m| !matches!(m, Metric::Q | Metric::Qds))
        .collect();
    let fuzzy_values = if fuzzy_rows.is_empty() {
        Vec::new()
    } else {
        evaluate(&g, &fuzzy, opts, &fuzzy_rows)?
    };

    let mut values = Vec::with_capacity(rows.len());
    for row in &rows {
        let value = match row {
            Metric::Q => {
                let crisp = crisp.as_ref().ok_or(MetricError::NeedsCrisp { metric: "q" })?;
                modularity(&g, crisp)?
            }
            Metric::Qds => {
                let crisp = crisp
                    .as_ref()
                    .ok_or(MetricError::NeedsCrisp { metric: "qds" })?;
                qds(&g, crisp)?
            }
            other => {
                fuzzy_values
                    .iter()
                    .find(|(m, _)| m == other)
                    .expect("evaluated above")
                    .1
            }
        };
        values.push((*row, value));
    }

    let prec = args.precision;
    let mut pairs: Vec<(String, String)> = vec![
        ("graph".into(), args.graph.display().to_string()),
        ("nodes".into(), g.node_count().to_string()),
        ("edges".into(), g.edge_count().to_string()),
        ("communities".into(), fuzzy.community_count().to_string()),
    ];
    if !args.fuzzy {
        pairs.push(("scheme".into(), scheme.to_string()));
    }
    pairs.push(("function".into(), function.name().into()));
    pairs.push(("logistic_p".into(), args.logistic_p.to_string()));
    for (metric, value) in &values {
        pairs.push((metric.name().into(), format!("{value:.prec$}")));
    }
    let mut out = render_pairs(format, &pairs);

    if args.per_community {
        let report = community_report(&g, &fuzzy, function)?;
        let header = [
            "community",
            "size",
            "intra_edges",
            "intra_density",
            "contraction",
            "inter_edges",
            "expansion",
            "conductance",
        ];
        let rows: Vec<Vec<String>> = report
            .communities
            .iter()
            .map(|t| {
                vec![
                    t.community.to_string(),
                    format!("{:.prec$}", t.size),
                    format!("{:.prec$}", t.intra_edges()),
                    format!("{:.prec$}", t.intra_density()),
                    format!("{:.prec$}", t.contraction()),
                    format!("{:.prec$}", t.inter_edges()),
                    format!("{:.prec$}", t.expansion()),
                    format!("{:.prec$}", t.conductance()),
                ]
            })
            .collect();
        out.push('\n');
        out.push_str(&render_table(format, &header, &rows));
    }

    print!("{out}");
    Ok(())
}

/// Two-column key/value listing; CSV and TSV stay headerless.
fn render_pairs(format: TableFormat, pairs: &[(String, String)]) -> String {
    match format {
        TableFormat::Csv => pairs.iter().map(|(k, v)| format!("{k},{v}\n")).collect(),
        TableFormat::Tsv => pairs.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect(),
        TableFormat::Markdown => {
            let mut out = String::from("| key | value |\n| --- | ---: |\n");
            for (k, v) in pairs {
                let _ = writeln!(out, "| {k} | {v} |");
            }
            out
        }
    }
}

fn render_table(format: TableFormat, header: &[&str], rows: &[Vec<String>]) -> String {
    let delimited = |sep: &str| -> String {
        let mut out = header.join(sep);
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(sep));
            out.push('\n');
        }
        out
    };
    match format {
        TableFormat::Csv => delimited(","),
        TableFormat::Tsv => delimited("\t"),
        TableFormat::Markdown => {
            let mut out = format!("| {} |\n", header.join(" | "));
            out.push_str("| --- |");
            for _ in 1..header.len() {
                out.push_str(" ---: |");
            }
            out.push('\n');
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out
        }
    }
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let text = read_file(&args.input)?;
    let policy = orphan_policy(args.allow_orphans);
    let rendered = match args.to.as_str() {
        "fuzzy" => {
            let scheme: CoefficientScheme = args.scheme.parse()?;
            let crisp = parse_crisp_cover(&text, &g, policy)
                .with_context(|| args.input.display().to_string())?;
            serialize_fuzzy_cover(&g, &scheme.apply(&g, &crisp))
        }
        "crisp" => {
            let threshold = args.threshold.expect("clap requires --threshold");
            let fuzzy = parse_fuzzy_cover(&text, &g, policy)
                .with_context(|| args.input.display().to_string())?;
            serialize_crisp_cover(&g, &fuzzy_to_crisp(&fuzzy, threshold)?)
        }
        other => bail!("unknown conversion target {other:?}"),
    };
    emit(args.output.as_deref(), &rendered)
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let cover = lpa_detect(&g, args.iterations, args.r, args.seed)?;
    emit(args.output.as_deref(), &serialize_crisp_cover(&g, &cover))
}

fn cmd_run_experiment(args: RunExperimentArgs) -> Result<()> {
    let config = ExperimentConfig::from_file(&args.config)?;
    let table = run_experiment(&config)?;
    let rendered = table.render(config.format, config.precision);
    emit(config.output.as_deref(), &rendered)
}
