use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use reccs_core::eval::{compare_networks, Alignment, CompareOptions, MixingMode, StatsOptions};
use reccs_core::io::{load_edge_list_in, write_clustering, write_edge_list, LabelMap, Network};
use reccs_core::pipeline::{
    finish, prepare, with_workers, write_cluster_report_csv, write_residual_csv,
    write_shortfall_csv, PipelineConfig, PipelineOutput,
};
use reccs_core::reccs::DEFAULT_PARTNER_CAP;
use reccs_core::sbm::DEFAULT_MAX_RETRIES;
use reccs_core::stats::{compute_stats, read_stats_csv, write_stats_csv, ClusterStats};
use reccs_core::{CsrGraph, Error, MetricReport, Variant};

#[derive(Parser)]
#[command(name = "reccs", version, about = "Community-aware synthetic network generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network from a reference network and clustering.
    Generate(GenerateArgs),
    /// Write the clustered/singleton split as four files.
    Split(SplitArgs),
    /// Per-cluster node count, edge count and minimum cut.
    Stats(StatsArgs),
    /// Compare a synthetic network against its reference.
    Eval(EvalArgs),
    /// Run both variants on one shared SBM draw and compare them.
    CompareVersions(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plus,
    Pp,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Plus => Variant::ReccsPlus,
            VariantArg::Pp => Variant::ReccsPp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignmentArg {
    ByEntity,
    SortedRank,
}

#[derive(Clone, Copy, ValueEnum)]
enum MixingArg {
    EdgeFraction,
    MeanNodeFraction,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    clustering: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
    /// Precomputed stats CSV; skips recomputation.
    #[arg(long)]
    stats_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    max_retries: usize,
    #[arg(long, default_value_t = DEFAULT_PARTNER_CAP as u32, value_parser = clap::value_parser!(u32).range(1..))]
    partner_cap: u32,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Pp)]
    variant: VariantArg,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long, value_enum, default_value_t = AlignmentArg::ByEntity)]
    alignment: AlignmentArg,
    #[arg(long, value_enum, default_value_t = MixingArg::EdgeFraction)]
    mixing: MixingArg,
}

impl MetricArgs {
    fn options(&self) -> CompareOptions {
        CompareOptions {
            stats: StatsOptions {
                mixing: match self.mixing {
                    MixingArg::EdgeFraction => MixingMode::EdgeFraction,
                    MixingArg::MeanNodeFraction => MixingMode::MeanNodeFraction,
                },
                ..StatsOptions::default()
            },
            alignment: match self.alignment {
                AlignmentArg::ByEntity => Alignment::ByEntity,
                AlignmentArg::SortedRank => Alignment::SortedRank,
            },
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    synthetic: PathBuf,
    #[arg(long)]
    clustering: PathBuf,
    #[command(flatten)]
    metrics: MetricArgs,
    /// Output directory for metrics.json and metrics.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Input failures exit 2, everything after loading exits 3.
enum Failure {
    Input(Error),
    Stage(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Stage(_) => 3,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Input(e) | Failure::Stage(e) => e,
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

trait Classify<T> {
    fn input(self) -> CliResult<T>;
    fn stage(self) -> CliResult<T>;
}

impl<T> Classify<T> for reccs_core::Result<T> {
    fn input(self) -> CliResult<T> {
        self.map_err(Failure::Input)
    }
    fn stage(self) -> CliResult<T> {
        self.map_err(|e| {
            if matches!(e, Error::Config(_)) {
                Failure::Input(e)
            } else {
                Failure::Stage(e)
            }
        })
    }
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| Failure::Stage(io_error(dir, e)))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> CliResult {
    let mut body = serde_json::to_string_pretty(value).expect("reports serialize");
    body.push('\n');
    fs::write(path, body).map_err(|e| Failure::Stage(io_error(path, e)))
}

fn load(input: &InputArgs) -> CliResult<Network> {
    Network::load(&input.network, &input.clustering).input()
}

fn load_stats(path: Option<&Path>) -> CliResult<Option<Vec<ClusterStats>>> {
    path.map(read_stats_csv).transpose().input()
}

fn pipeline_config(run: &RunArgs, variant: Variant) -> PipelineConfig {
    PipelineConfig {
        variant,
        seed: run.seed,
        workers: run.workers as usize,
        max_retries: run.max_retries,
        partner_cap: run.partner_cap as usize,
        ..PipelineConfig::default()
    }
}

fn write_run(out: &PipelineOutput, net: &Network, dir: &Path) -> CliResult {
    create_dir(dir)?;
    write_edge_list(&out.edges, &net.labels, &dir.join("synthetic.tsv")).stage()?;
    write_clustering(&net.clustering, &net.labels, &dir.join("clustering.tsv")).stage()?;
    write_json(&out.report, &dir.join("report.json"))?;
    write_json(&out.timings, &dir.join("timings.json"))?;
    write_residual_csv(&out.residual, &net.labels, &dir.join("residual.csv")).stage()?;
    write_shortfall_csv(&out.shortfall, &dir.join("shortfall.csv")).stage()?;
    write_cluster_report_csv(&out.clusters, &dir.join("clusters.csv")).stage()
}

fn generate(args: &GenerateArgs) -> CliResult {
    let net = load(&args.input)?;
    let stats = load_stats(args.run.stats_file.as_deref())?;
    let cfg = pipeline_config(&args.run, args.variant.into());
    let out = with_workers(cfg.workers, || {
        let p = prepare(&net.graph, &net.clustering, stats, &cfg)?;
        finish(&p, cfg.variant, &cfg)
    })
    .stage()?
    .stage()?;
    info!(
        "{}: {} edges ({} added by repair)",
        cfg.variant,
        out.report.output_edges,
        out.report.added.total()
    );
    write_run(&out, &net, &args.out_dir)
}

fn split(args: &SplitArgs) -> CliResult {
    let net = load(&args.input)?;
    let parts = reccs_core::splitter::split(&net.graph, &net.clustering).stage()?;
    let dir = &args.out_dir;
    create_dir(dir)?;
    let clustered_labels =
        LabelMap::from_labels(parts.clustered_nodes.iter().map(|&v| net.labels.label(v)));
    write_edge_list(&parts.clustered_edges_global(), &net.labels, &dir.join("g_c.tsv")).stage()?;
    write_edge_list(&parts.singleton_edges, &net.labels, &dir.join("g_s.tsv")).stage()?;
    write_clustering(&parts.clustered_clustering, &clustered_labels, &dir.join("c_c.tsv"))
        .stage()?;
    write_clustering(&parts.singleton_clustering, &net.labels, &dir.join("c_s.tsv")).stage()
}

fn stats(args: &StatsArgs) -> CliResult {
    let net = load(&args.input)?;
    let limit = PipelineConfig::default().size_limit;
    let stats = with_workers(args.workers as usize, || {
        compute_stats(&net.graph, &net.clustering, limit)
    })
    .stage()?
    .stage()?;
    write_stats_csv(&stats, &args.out).stage()
}

fn write_metrics(report: &MetricReport, dir: &Path, name: &str) -> CliResult {
    write_json(report, &dir.join(format!("{name}.json")))?;
    let csv_path = dir.join(format!("{name}.csv"));
    fs::write(&csv_path, report.to_csv()).map_err(|e| Failure::Stage(io_error(&csv_path, e)))
}

fn eval(args: &EvalArgs) -> CliResult {
    let reference = load(&InputArgs {
        network: args.reference.clone(),
        clustering: args.clustering.clone(),
    })?;
    let synthetic = load_edge_list_in(&args.synthetic, &reference.labels).input()?;
    let syn = CsrGraph::from_edge_set(reference.graph.n(), &synthetic.edges).input()?;
    let report: MetricReport =
        compare_networks(&reference.graph, &syn, &reference.clustering, &args.metrics.options())
            .stage()?;
    create_dir(&args.out)?;
    write_metrics(&report, &args.out, "metrics")
}

#[derive(Serialize)]
struct VersionRow {
    statistic: &'static str,
    metric: &'static str,
    reccs_plus: Option<f64>,
    reccs_pp: Option<f64>,
}

fn compare_versions(args: &CompareArgs) -> CliResult {
    let net = load(&args.input)?;
    let stats = load_stats(args.run.stats_file.as_deref())?;
    let cfg = pipeline_config(&args.run, Variant::ReccsPp);
    let opts = args.metrics.options();
    let runs = with_workers(cfg.workers, || -> reccs_core::Result<_> {
        let p = prepare(&net.graph, &net.clustering, stats, &cfg)?;
        [Variant::ReccsPlus, Variant::ReccsPp]
            .into_iter()
            .map(|variant| {
                let out = finish(&p, variant, &cfg)?;
                let syn = CsrGraph::from_edge_set(net.graph.n(), &out.edges)?;
                let report: MetricReport =
                    compare_networks(&net.graph, &syn, &net.clustering, &opts)?;
                Ok((variant, out, report))
            })
            .collect::<reccs_core::Result<Vec<_>>>()
    })
    .stage()?
    .stage()?;

    create_dir(&args.out_dir)?;
    for (variant, out, report) in &runs {
        let dir = args.out_dir.join(variant.to_string());
        write_run(out, &net, &dir)?;
        write_metrics(report, &dir, "metrics")?;
    }
    let (plus, pp) = (&runs[0].2, &runs[1].2);
    let rows: Vec<VersionRow> = plus
        .entries
        .iter()
        .zip(&pp.entries)
        .map(|(a, b)| VersionRow {
            statistic: a.statistic.name(),
            metric: a.metric.name(),
            reccs_plus: a.value,
            reccs_pp: b.value,
        })
        .collect();
    write_json(&rows, &args.out_dir.join("comparison.json"))?;
    let mut csv = String::from("statistic,metric,reccs_plus,reccs_pp\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.statistic,
            r.metric,
            cell(r.reccs_plus),
            cell(r.reccs_pp)
        ));
    }
    let path = args.out_dir.join("comparison.csv");
    fs::write(&path, csv).map_err(|e| Failure::Stage(io_error(&path, e)))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Split(a) => split(a),
        Command::Stats(a) => stats(a),
        Command::Eval(a) => eval(a),
        Command::CompareVersions(a) => compare_versions(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error());
            ExitCode::from(f.code())
        }
    }
}
