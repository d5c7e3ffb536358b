//! Command-line front end.
//!
//! Human-readable reports go to stdout in the format picked by `--format`;
//! `--out` additionally writes the JSON report. Exit codes: 0 on success, 1
//! on data problems (missing models, degenerate input, I/O, or a verifier
//! violation), 2 on schema, configuration, or usage errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::divergence::{
    estimate_l1, exact_l1, restricted_l1, DivergenceReport, EstimatorConfig, Source, DEFAULT_CLUSTERS,
    DEFAULT_RESTARTS,
};
use crate::domain::disagreement_regions;
use crate::error::{Error, Result, SchemaError};
use crate::io_formats::{
    read_instance, read_samples_file, read_traces, report_digits, write_bytes, write_instance, write_report,
    write_scatter_csv, write_traces, Report, ReportFormat, Table, DEFAULT_TABLE_DIGITS,
};
use crate::kmeans::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::rank_analysis::{
    check_pair, falsify_converse, verify_batch, RankReport, TheoremVerdict, VerifyOptions, DEFAULT_TRIGGER_FLOOR,
};
use crate::selection::{
    compare_protocols, es_rss_summary, paired_errors, select_es, select_hps_standard, select_hps_synthetic,
    select_rss, At, Split, StandardScoring, TrainedOn,
};
use crate::trace_sim::{generate_instance, generate_traces, InstanceGenConfig, TraceGenConfig};

#[derive(Debug, Parser)]
#[command(name = "rankguard", version, about = "Model selection with synthetic surrogate data")]
struct Cli {
    /// Output format for the report printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl From<OutputFormat> for ReportFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => ReportFormat::Table,
            OutputFormat::Json => ReportFormat::Json,
            OutputFormat::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the rank-preservation theorem on seeded random instances.
    Verify(VerifyArgs),
    /// Search for rank flips when the preservation condition fails.
    Falsify(FalsifyArgs),
    /// L1 divergences, exact or estimated from samples.
    #[command(subcommand)]
    Tv(TvCommand),
    /// Spearman correlation between two splits of an evaluation trace.
    Rank(RankArgs),
    /// Run one selection procedure on an evaluation trace.
    Select(SelectArgs),
    /// Summary tables over an evaluation trace.
    #[command(subcommand)]
    Summarize(SummarizeCommand),
    /// Generate evaluation traces or verification instances.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

/// An inclusive range written `A..B` (or a single value `A`).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Span<T>([T; 2]);

impl<T: FromStr + PartialOrd + Copy> FromStr for Span<T> {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |p: &str| p.trim().parse::<T>().map_err(|_| format!("cannot parse `{p}` in range `{s}`"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("range `{s}` is empty"));
        }
        Ok(Span([lo, hi]))
    }
}

#[derive(Debug, Args)]
struct InstanceKnobs {
    /// Inclusive domain-size range A..B [default: 2..64]
    #[arg(long, value_name = "A..B")]
    domain_size: Option<Span<usize>>,
    /// Inclusive class-count range A..B [default: 2..10]
    #[arg(long, value_name = "A..B")]
    classes: Option<Span<u32>>,
    /// Weight of the random component in the synthetic pmf [default: 0.3; falsify: 0.9]
    #[arg(long)]
    lambda: Option<f64>,
    /// Probability that a hypothesis copies the true label [default: 0.7; falsify: 0.6]
    #[arg(long)]
    accuracy: Option<f64>,
    /// Hypotheses per instance [default: 4]
    #[arg(long)]
    hypotheses: Option<usize>,
    /// Instance generator config (JSON); explicit flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl InstanceKnobs {
    fn resolve(&self, base: InstanceGenConfig) -> Result<InstanceGenConfig> {
        let mut cfg = match &self.config {
            Some(path) => read_json_config(path)?,
            None => base,
        };
        if let Some(Span(r)) = self.domain_size {
            cfg.domain_size = r;
        }
        if let Some(Span(r)) = self.classes {
            cfg.num_classes = r;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.accuracy {
            cfg.hypothesis_accuracy = v;
        }
        if let Some(v) = self.hypotheses {
            cfg.hypotheses_per_instance = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_json_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| {
        Error::Schema(
            SchemaError::new(format!("line {} column {}", e.line(), e.column()), "config", e.to_string())
                .in_file(path.display().to_string()),
        )
    })
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Number of random instances
    #[arg(long, default_value_t = 100_000)]
    instances: u64,
    #[command(flatten)]
    knobs: InstanceKnobs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    workers: Option<usize>,
    /// Minimum share of pairs meeting the condition for a conclusive run
    #[arg(long, default_value_t = DEFAULT_TRIGGER_FLOOR)]
    trigger_floor: f64,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FalsifyArgs {
    /// Number of random instances
    #[arg(long, default_value_t = 10_000)]
    instances: u64,
    #[command(flatten)]
    knobs: InstanceKnobs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum TvCommand {
    /// Full and pair-restricted L1 divergence of an instance file.
    Exact(TvExactArgs),
    /// Cluster-histogram estimate of the L1 divergence between sample sets.
    Estimate(TvEstimateArgs),
}

#[derive(Debug, Args)]
struct TvExactArgs {
    /// Instance JSON file
    #[arg(long, value_name = "FILE")]
    instance: PathBuf,
    /// Restrict to where hypotheses I and J disagree, and check the pair
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    pair: Option<Vec<usize>>,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TvEstimateArgs {
    /// Sample CSV with header `source,dim0,...`
    #[arg(long, value_name = "FILE", conflicts_with_all = ["real", "synthetic"], required_unless_present_all = ["real", "synthetic"])]
    samples: Option<PathBuf>,
    /// Real samples, header `dim0,...` (use with --synthetic)
    #[arg(long, value_name = "FILE", requires = "synthetic")]
    real: Option<PathBuf>,
    /// Synthetic samples, header `dim0,...` (use with --real)
    #[arg(long, value_name = "FILE", requires = "real")]
    synthetic: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CLUSTERS)]
    clusters: usize,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// k-means iteration cap per restart
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// k-means stops when no centroid moves farther than this
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceInput {
    /// Evaluation trace (.csv, or .json for a record array)
    #[arg(long, value_name = "FILE")]
    traces: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    input: TraceInput,
    #[arg(long, default_value = "synthetic")]
    split_a: Split,
    #[arg(long, default_value = "test")]
    split_b: Split,
    /// Epoch of each curve to compare: `last`, or the best epoch on split A
    #[arg(long, default_value = "last")]
    at: At,
    /// One point per architecture (mean over runs) instead of per run
    #[arg(long)]
    per_arch: bool,
    /// Write the scatter points as CSV here
    #[arg(long, value_name = "FILE")]
    scatter: Option<PathBuf>,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectMode {
    /// Best epoch of one run
    Es,
    /// Best run of one architecture
    Rss,
    /// Best (run, epoch) of one architecture
    EsRss,
    /// Synthetic protocol over all fully-trained models
    HpsSyn,
    /// Standard protocol: validation average over subset-trained runs
    HpsStd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scoring {
    /// Mean test error over the chosen architecture's runs
    Mean,
    /// Test error of one run drawn with --seed
    RandomRun,
}

impl Scoring {
    fn with_seed(self, seed: u64) -> StandardScoring {
        match self {
            Scoring::Mean => StandardScoring::Mean,
            Scoring::RandomRun => StandardScoring::RandomRun { seed },
        }
    }
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(value_enum)]
    mode: SelectMode,
    #[command(flatten)]
    input: TraceInput,
    /// Architecture (es, rss, es-rss)
    #[arg(long)]
    arch: Option<String>,
    /// Run (es)
    #[arg(long)]
    run: Option<u64>,
    /// Epoch compared across runs for rss: `last` or `best`
    #[arg(long, default_value = "last")]
    at: At,
    /// Split the choice is made on (es, rss, es-rss)
    #[arg(long, default_value = "synthetic")]
    split: Split,
    /// Which runs to choose among (es, rss, es-rss)
    #[arg(long, default_value = "full")]
    trained_on: TrainedOn,
    /// How hps-std scores its chosen architecture
    #[arg(long, value_enum, default_value_t = Scoring::Mean)]
    scoring: Scoring,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SummarizeCommand {
    /// Baseline/ES/RSS/ES+RSS average test errors.
    EsRss(SummarizeArgs),
    /// Synthetic vs standard protocol vs the average of all models.
    Protocols(ProtocolArgs),
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    #[command(flatten)]
    input: TraceInput,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    #[command(flatten)]
    input: TraceInput,
    /// How the standard protocol scores its chosen architecture
    #[arg(long, value_enum, default_value_t = Scoring::Mean)]
    scoring: Scoring,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Seeded evaluation traces.
    Traces(SimTracesArgs),
    /// One seeded verification instance.
    Instance(SimInstanceArgs),
}

#[derive(Debug, Args)]
struct SimTracesArgs {
    /// Architectures [default: 64]
    #[arg(long)]
    archs: Option<usize>,
    /// Fully-trained runs per architecture [default: 10]
    #[arg(long)]
    runs: Option<usize>,
    /// Subset-trained runs per architecture [default: 10]
    #[arg(long)]
    subset_runs: Option<usize>,
    /// Epochs per run [default: 100]
    #[arg(long)]
    epochs: Option<usize>,
    /// Synthetic/test quality correlation [default: 0.97]
    #[arg(long)]
    rho: Option<f64>,
    /// Test error floor [default: 0.1]
    #[arg(long)]
    floor_test: Option<f64>,
    /// Std of the architecture quality term [default: 0.02]
    #[arg(long)]
    arch_spread: Option<f64>,
    /// Std of the run quality term [default: 0.01]
    #[arg(long)]
    run_spread: Option<f64>,
    /// Per-epoch test noise [default: 0.002]
    #[arg(long)]
    epoch_noise: Option<f64>,
    /// Offset of synthetic errors over test errors [default: 0.03]
    #[arg(long)]
    synth_bias: Option<f64>,
    /// Per-epoch synthetic noise [default: 0.002]
    #[arg(long)]
    synth_noise: Option<f64>,
    /// Extra error of subset-trained runs [default: 0.03]
    #[arg(long)]
    subset_penalty: Option<f64>,
    /// Height of the learning curve [default: 0.5]
    #[arg(long)]
    amplitude: Option<f64>,
    /// Decay constant of the learning curve in epochs [default: 10]
    #[arg(long)]
    tau: Option<f64>,
    /// Trace generator config (JSON); explicit flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output trace file (.csv, or .json)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

impl SimTracesArgs {
    fn resolve(&self) -> Result<TraceGenConfig> {
        let mut cfg: TraceGenConfig = match &self.config {
            Some(path) => read_json_config(path)?,
            None => TraceGenConfig::default(),
        };
        macro_rules! apply {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        apply!(
            archs => num_archs,
            runs => runs_per_arch,
            subset_runs => subset_runs,
            epochs => epochs,
            rho => rho,
            floor_test => floor_test,
            arch_spread => arch_spread,
            run_spread => run_spread,
            epoch_noise => epoch_noise,
            synth_bias => synth_bias,
            synth_noise => synth_noise,
            subset_penalty => subset_penalty,
            amplitude => amplitude,
            tau => tau,
            seed => seed,
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SimInstanceArgs {
    #[command(flatten)]
    knobs: InstanceKnobs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output instance JSON file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

/// Exact divergences of one instance, with the pair check when requested.
#[derive(Debug, Serialize)]
struct TvExactReport {
    #[serde(flatten)]
    divergence: DivergenceReport,
    pair: Option<(usize, usize)>,
    verdict: Option<TheoremVerdict>,
}

impl Report for TvExactReport {
    fn table(&self) -> Table {
        let mut t = self.divergence.table();
        if let (Some((i, j)), Some(v)) = (self.pair, &self.verdict) {
            t.title = format!("L1 divergence (un-halved), pair ({i}, {j})");
            let extra = v.table();
            t.rows.extend(extra.rows.into_iter().filter(|r| {
                !matches!(&r[0], crate::io_formats::Cell::Text(k) if k == "restricted_l1" || k == "full_l1")
            }));
        }
        t
    }
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    estimate_l1: f64,
    halved_tv: f64,
    real_samples: usize,
    synthetic_samples: usize,
    clusters: usize,
    restarts: usize,
    seed: u64,
}

impl Report for EstimateReport {
    fn table(&self) -> Table {
        Table::new("Estimated L1 divergence (un-halved)", &["metric", "value"])
            .row(vec!["estimate_l1".into(), self.estimate_l1.into()])
            .row(vec!["halved_tv".into(), self.halved_tv.into()])
            .row(vec!["real_samples".into(), self.real_samples.into()])
            .row(vec!["synthetic_samples".into(), self.synthetic_samples.into()])
            .row(vec!["clusters".into(), self.clusters.into()])
            .row(vec!["restarts".into(), self.restarts.into()])
    }
}

struct Output {
    format: ReportFormat,
}

impl Output {
    /// Prints `report` to stdout and, when asked, writes its JSON form.
    fn emit<R: Report>(&self, report: &R, out: Option<&Path>) -> Result<()> {
        let digits = if self.format == ReportFormat::Table {
            report_digits()?
        } else {
            DEFAULT_TABLE_DIGITS
        };
        if let Some(path) = out {
            write_bytes(&write_report(report, ReportFormat::Json, digits), path)?;
        }
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(&write_report(report, self.format, digits))
            .and_then(|()| stdout.flush())
            .map_err(|e| Error::io("<stdout>", e))
    }
}

fn require<T>(value: Option<T>, flag: &str, mode: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidConfig(format!("`select {mode}` requires {flag}")))
}

fn execute(cli: Cli) -> Result<i32> {
    let output = Output {
        format: cli.format.into(),
    };
    match cli.command {
        Command::Verify(a) => {
            let cfg = a.knobs.resolve(InstanceGenConfig::default())?;
            let opts = VerifyOptions {
                workers: a.workers,
                trigger_floor: a.trigger_floor,
            };
            let report = verify_batch(&cfg, a.instances, a.seed, &opts)?;
            output.emit(&report, a.out.as_deref())?;
            if report.inconclusive {
                eprintln!(
                    "warning: only {:.4}% of pairs met the condition (floor {}); the run is inconclusive",
                    100.0 * report.trigger_fraction,
                    report.trigger_floor
                );
            }
            if !report.passed() {
                eprintln!("error: {} pairs violate the rank-preservation theorem", report.violations);
                return Ok(1);
            }
        }
        Command::Falsify(a) => {
            let cfg = a.knobs.resolve(InstanceGenConfig::adversarial())?;
            let report = falsify_converse(&cfg, a.instances, a.seed)?;
            output.emit(&report, a.out.as_deref())?;
        }
        Command::Tv(TvCommand::Exact(a)) => {
            let inst = read_instance(&a.instance)?;
            let full = exact_l1(inst.mu_r(), inst.mu_s())?;
            let (restricted, pair, verdict) = match a.pair.as_deref() {
                Some(&[i, j]) => {
                    let verdict = check_pair(&inst, i, j)?;
                    let (o1, o2) = disagreement_regions(inst.hypothesis(i)?, inst.hypothesis(j)?, inst.f())?;
                    let region = o1.union(&o2).copied().collect();
                    let r = restricted_l1(inst.mu_r(), inst.mu_s(), &region)?;
                    (Some(r), Some((i, j)), Some(verdict))
                }
                _ => (None, None, None),
            };
            let report = TvExactReport {
                divergence: DivergenceReport::new(full, restricted),
                pair,
                verdict,
            };
            output.emit(&report, a.out.as_deref())?;
        }
        Command::Tv(TvCommand::Estimate(a)) => {
            let rows = match (&a.samples, &a.real, &a.synthetic) {
                (Some(p), _, _) => read_samples_file(p, None)?,
                (None, Some(r), Some(s)) => {
                    let mut rows = read_samples_file(r, Some(Source::Real))?;
                    rows.synthetic = read_samples_file(s, Some(Source::Synthetic))?.synthetic;
                    rows
                }
                _ => unreachable!("clap enforces the input flags"),
            };
            if rows.real.is_empty() || rows.synthetic.is_empty() {
                return Err(Error::EmptyInput(
                    "divergence estimation needs both real and synthetic samples".into(),
                ));
            }
            let (real, synthetic) = rows.into_sets()?;
            let config = EstimatorConfig {
                clusters: a.clusters,
                restarts: a.restarts,
                max_iter: a.max_iter,
                tol: a.tol,
            };
            let l1 = estimate_l1(&real, &synthetic, &config, a.seed)?;
            let report = EstimateReport {
                estimate_l1: l1,
                halved_tv: l1 / 2.0,
                real_samples: real.len(),
                synthetic_samples: synthetic.len(),
                clusters: a.clusters,
                restarts: a.restarts,
                seed: a.seed,
            };
            output.emit(&report, a.out.as_deref())?;
        }
        Command::Rank(a) => {
            let traces = read_traces(&a.input.traces, None)?;
            let pairs = paired_errors(&traces, a.split_a, a.split_b, a.at, a.per_arch)?;
            if let Some(path) = &a.scatter {
                let mut buf = Vec::new();
                write_scatter_csv(&pairs, &mut buf).map_err(|e| Error::io(path, e))?;
                write_bytes(&buf, path)?;
            }
            let report = RankReport::from_pairs(pairs)?;
            output.emit(&report, a.out.as_deref())?;
        }
        Command::Select(a) => {
            let traces = read_traces(&a.input.traces, None)?;
            match a.mode {
                SelectMode::Es => {
                    let arch = require(a.arch.as_deref(), "--arch", "es")?;
                    let run = require(a.run, "--run", "es")?;
                    let outcome = select_es(&traces, arch, a.trained_on, run, a.split)?;
                    output.emit(&outcome, a.out.as_deref())?;
                }
                SelectMode::Rss | SelectMode::EsRss => {
                    let (name, at) = match a.mode {
                        SelectMode::Rss => ("rss", a.at),
                        _ => ("es-rss", At::BestEpoch),
                    };
                    let arch = require(a.arch.as_deref(), "--arch", name)?;
                    let outcome = select_rss(&traces, arch, a.trained_on, a.split, at)?;
                    output.emit(&outcome, a.out.as_deref())?;
                }
                SelectMode::HpsSyn => {
                    let outcome = select_hps_synthetic(&traces)?;
                    output.emit(&outcome, a.out.as_deref())?;
                }
                SelectMode::HpsStd => {
                    let outcome = select_hps_standard(&traces, a.scoring.with_seed(a.seed))?;
                    output.emit(&outcome, a.out.as_deref())?;
                }
            }
        }
        Command::Summarize(SummarizeCommand::EsRss(a)) => {
            let traces = read_traces(&a.input.traces, None)?;
            output.emit(&es_rss_summary(&traces)?, a.out.as_deref())?;
        }
        Command::Summarize(SummarizeCommand::Protocols(a)) => {
            let traces = read_traces(&a.input.traces, None)?;
            let report = compare_protocols(&traces, a.scoring.with_seed(a.seed))?;
            output.emit(&report, a.out.as_deref())?;
        }
        Command::Simulate(SimulateCommand::Traces(a)) => {
            let cfg = a.resolve()?;
            let traces = generate_traces(&cfg)?;
            write_traces(&traces, &a.out, None)?;
            println!("wrote {} records to {}", traces.records().len(), a.out.display());
        }
        Command::Simulate(SimulateCommand::Instance(a)) => {
            let cfg = a.knobs.resolve(InstanceGenConfig::default())?;
            let inst = generate_instance(&cfg, a.seed)?;
            write_instance(&inst, &a.out)?;
            println!(
                "wrote instance with {} points and {} hypotheses to {}",
                inst.domain().size(),
                inst.hypotheses().len(),
                a.out.display()
            );
        }
    }
    Ok(0)
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn span_parsing() {
        assert_eq!("2..64".parse::<Span<usize>>(), Ok(Span([2, 64])));
        assert_eq!("2..=5".parse::<Span<usize>>(), Ok(Span([2, 5])));
        assert_eq!("7".parse::<Span<u32>>(), Ok(Span([7, 7])));
        assert!("5..2".parse::<Span<usize>>().is_err());
        assert!("a..2".parse::<Span<usize>>().is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["rankguard", "verify", "--bogus"]), 2);
        assert_eq!(run(["rankguard", "nonsense"]), 2);
        assert_eq!(run(["rankguard", "verify", "--help"]), 0);
    }
}
