use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use newsvendor_core::distributions::{fit_lognormal, fit_triangular_mode};
use newsvendor_core::engine::{demand_stream, run_simulation_observed, write_trace};
use newsvendor_core::experiments::{
    run_robustness_results, run_scenario_with_cache, Distributions, RenderOptions, Statistic,
};
use newsvendor_core::{
    build_periodic_model, critical_fractile, render_report, DemandDistribution, DistributionKind, Metric,
    NewsvendorKind, PolicyKind, QuantileCache, ReportFormat, ReportTable, SampleMoments, ScenarioConfig,
};

/// Batch sizing under uncertain daily demand: newsvendor order quantities
/// and Monte Carlo comparison against a safety stock buffer.
#[derive(Parser)]
#[command(name = "newsvendor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit uniform, triangular and log-normal daily demand from summary statistics.
    Fit(FitArgs),
    /// Print the critical fractile of each newsvendor model.
    Fractile(ConfigArgs),
    /// Order size for a period-demand quantile.
    Quantile(QuantileArgs),
    /// Run one (model, true) scenario.
    Simulate(SimulateArgs),
    /// Run all nine (model, true) pairs.
    Robustness(RobustnessArgs),
    /// Re-render a JSON report as CSV or markdown.
    Report(ReportArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Preset name (sku_a, sku_b) or path to a TOML config.
    #[arg(long, default_value = "sku_a")]
    config: String,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Observed minimum; with --max, --mean and --stdev overrides the config.
    #[arg(long, requires_all = ["max", "mean", "stdev"])]
    min: Option<f64>,
    #[arg(long, requires_all = ["min", "mean", "stdev"])]
    max: Option<f64>,
    #[arg(long, requires_all = ["min", "max", "stdev"])]
    mean: Option<f64>,
    #[arg(long, requires_all = ["min", "max", "mean"])]
    stdev: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuantileArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value = "uniform")]
    dist: DistArg,
    /// Explicit fractile in (0, 1).
    #[arg(long, conflicts_with = "model")]
    fractile: Option<f64>,
    /// Use this model's critical fractile. All three when neither is given.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Period-demand Monte Carlo samples; defaults to the config value.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed of the period-demand samples; defaults to the config value.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name or TOML path; repeat for several SKUs.
    #[arg(long, default_values_t = ["sku_a".to_string()])]
    config: Vec<String>,
    /// Base seed of the demand streams.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: FormatArg,
    /// Metrics to print (csv and markdown); all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    metric: Vec<MetricArg>,
    #[arg(long, value_enum, default_value = "mean")]
    statistic: StatisticArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Distribution used to size orders; defaults to the config value.
    #[arg(long, value_enum)]
    model: Option<DistArg>,
    /// Distribution daily demand is drawn from; defaults to the config value.
    #[arg(long = "true", value_enum)]
    true_dist: Option<DistArg>,
    /// Write a day-by-day CSV trace of run 0 to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Policy traced by --trace.
    #[arg(long, value_enum, default_value = "model3")]
    trace_policy: PolicyArg,
}

#[derive(Args)]
struct RobustnessArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report written by `simulate` or `robustness` with --format json.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    format: FormatArg,
    #[arg(long, value_enum, value_delimiter = ',')]
    metric: Vec<MetricArg>,
    #[arg(long, value_enum, default_value = "mean")]
    statistic: StatisticArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Triangular,
    Lognormal,
}

impl From<DistArg> for DistributionKind {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => DistributionKind::Uniform,
            DistArg::Triangular => DistributionKind::Triangular,
            DistArg::Lognormal => DistributionKind::LogNormal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Model1,
    Model2,
    Model3,
}

impl From<ModelArg> for NewsvendorKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Model1 => NewsvendorKind::Model1,
            ModelArg::Model2 => NewsvendorKind::Model2,
            ModelArg::Model3 => NewsvendorKind::Model3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum PolicyArg {
    SafetyStock,
    Model1,
    Model2,
    Model2Adjusted,
    Model3,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::SafetyStock => PolicyKind::SafetyStock,
            PolicyArg::Model1 => PolicyKind::Model1,
            PolicyArg::Model2 => PolicyKind::Model2,
            PolicyArg::Model2Adjusted => PolicyKind::Model2Adjusted,
            PolicyArg::Model3 => PolicyKind::Model3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MetricArg {
    Profit,
    AvgInventory,
    StockoutDays,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatisticArg {
    Mean,
    Stdev,
    Moe95,
    Median,
}

fn render_options(format: FormatArg, metrics: &[MetricArg], statistic: StatisticArg) -> RenderOptions {
    let metrics = if metrics.is_empty() {
        Metric::ALL.to_vec()
    } else {
        metrics
            .iter()
            .map(|m| match m {
                MetricArg::Profit => Metric::Profit,
                MetricArg::AvgInventory => Metric::AvgInventory,
                MetricArg::StockoutDays => Metric::StockoutDays,
            })
            .collect()
    };
    RenderOptions {
        format: match format {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Markdown => ReportFormat::Markdown,
            FormatArg::Json => ReportFormat::Json,
        },
        metrics,
        statistic: match statistic {
            StatisticArg::Mean => Statistic::Mean,
            StatisticArg::Stdev => Statistic::Stdev,
            StatisticArg::Moe95 => Statistic::Moe95,
            StatisticArg::Median => Statistic::Median,
        },
        ..RenderOptions::default()
    }
}

type CliResult<T = ()> = Result<T, Box<dyn std::error::Error>>;

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(name: &str) -> CliResult<ScenarioConfig> {
    ScenarioConfig::load(name).map_err(|e| format!("{name}: {e}").into())
}

fn load_runs(args: &RunArgs) -> CliResult<Vec<ScenarioConfig>> {
    args.config
        .iter()
        .map(|name| {
            let mut cfg = load(name)?;
            if let Some(seed) = args.seed {
                cfg.experiment.base_seed = seed;
            }
            if let Some(runs) = args.runs {
                cfg.experiment.runs = runs;
            }
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

fn fit(args: &FitArgs) -> CliResult {
    let (min, max, moments) = match (args.min, args.max, args.mean, args.stdev) {
        (Some(min), Some(max), Some(mean), Some(stdev)) => (min, max, SampleMoments::new(mean, stdev)?),
        _ => {
            let obs = load(&args.config.config)?.observed_demand;
            (obs.min, obs.max, obs.moments()?)
        }
    };
    let fitted = Distributions {
        uniform: DemandDistribution::uniform(min, max)?,
        triangular: fit_triangular_mode(min, max, moments)?,
        lognormal: fit_lognormal(moments)?,
    };
    let mut text = String::new();
    for kind in DistributionKind::ALL {
        text.push_str(&format!("[distributions.{}]\n", kind.tag()));
        match *fitted.get(kind) {
            DemandDistribution::Uniform { a, b } => {
                text.push_str(&format!("kind = \"uniform\"\na = {a:?}\nb = {b:?}\n"))
            }
            DemandDistribution::Triangular { a, b, c } => {
                text.push_str(&format!("kind = \"triangular\"\na = {a:?}\nb = {b:?}\nc = {c:.4}\n"))
            }
            DemandDistribution::LogNormal { mu_l, sigma_l } => {
                text.push_str(&format!("kind = \"lognormal\"\nmu_l = {mu_l:.9}\nsigma_l = {sigma_l:.9}\n"))
            }
        }
        text.push('\n');
    }
    text.pop();
    emit(args.out.as_ref(), &text)
}

fn fractile(args: &ConfigArgs) -> CliResult {
    let cfg = load(&args.config)?;
    for kind in NewsvendorKind::ALL {
        println!("{} {:.9}", PolicyKind::from(kind).tag(), critical_fractile(kind, &cfg.economics)?);
    }
    Ok(())
}

fn quantile(args: &QuantileArgs) -> CliResult {
    let cfg = load(&args.config.config)?;
    let x = &cfg.experiment;
    let dist = cfg.distributions.get(args.dist.into());
    let model = build_periodic_model(
        dist,
        cfg.simulation.period_days,
        args.samples.unwrap_or(x.quantile_samples),
        args.seed.unwrap_or(x.quantile_seed),
    )?;
    if let Some(f) = args.fractile {
        println!("{:.2}", model.quantile(f)?);
        return Ok(());
    }
    let kinds: Vec<NewsvendorKind> = match args.model {
        Some(m) => vec![m.into()],
        None => NewsvendorKind::ALL.to_vec(),
    };
    for kind in kinds {
        let f = critical_fractile(kind, &cfg.economics)?;
        println!("{} {:.2}", PolicyKind::from(kind).tag(), model.quantile(f)?);
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> CliResult {
    let cache = QuantileCache::new();
    let mut results = Vec::new();
    for cfg in load_runs(&args.run)? {
        let model = args.model.map_or(cfg.experiment.model, Into::into);
        let true_dist = args.true_dist.map_or(cfg.experiment.true_dist, Into::into);
        let scenario = cfg.scenario(model, true_dist)?;
        if let Some(path) = &args.trace {
            let kind = PolicyKind::from(args.trace_policy);
            let periodic = scenario.periodic_model(&cache)?;
            let policy = scenario
                .build_policies(&periodic)?
                .into_iter()
                .find(|p| p.kind() == kind)
                .ok_or_else(|| format!("policy {} is not configured for {}", kind.tag(), cfg.name))?;
            let sim = newsvendor_core::SimConfig::new(scenario.calendar, scenario.econ, policy)?;
            let mut records = Vec::new();
            run_simulation_observed(&sim, &scenario.true_dist, &mut demand_stream(scenario.base_seed, 0), |r| {
                records.push(*r)
            });
            let mut file = io::BufWriter::new(fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?);
            write_trace(&mut file, &records)?;
            file.flush()?;
        }
        results.push(run_scenario_with_cache(&scenario, &cache)?);
    }
    let table = ReportTable::from_results(&results)?;
    let opts = render_options(args.run.format, &args.run.metric, args.run.statistic);
    emit(args.run.out.as_ref(), &render_report(&table, &opts))
}

fn robustness(args: &RobustnessArgs) -> CliResult {
    let cache = QuantileCache::new();
    let mut table = ReportTable::new();
    for cfg in load_runs(&args.run)? {
        table.extend_results(&run_robustness_results(&cfg, &cache)?)?;
    }
    let opts = render_options(args.run.format, &args.run.metric, args.run.statistic);
    emit(args.run.out.as_ref(), &render_report(&table, &opts))
}

fn report(args: &ReportArgs) -> CliResult {
    let text = fs::read_to_string(&args.input).map_err(|e| format!("{}: {e}", args.input.display()))?;
    let table = ReportTable::from_json(&text)?;
    let opts = render_options(args.format, &args.metric, args.statistic);
    emit(args.out.as_ref(), &render_report(&table, &opts))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fit(a) => fit(a),
        Command::Fractile(a) => fractile(a),
        Command::Quantile(a) => quantile(a),
        Command::Simulate(a) => simulate(a),
        Command::Robustness(a) => robustness(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
