//! Command-line interface. Exit codes: 0 success, 1 configuration or usage
//! error, 2 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::concentration::{separation_radius, theoretical_threshold, ThresholdKind, ThresholdSpec};
use crate::error::{Error, Result};
use crate::estimator::lag_functionals;
use crate::harness::config::{default_horizon, default_sparsity, ExperimentConfig, Scenario};
use crate::harness::data::read_samples;
use crate::harness::scenarios::{run_scenario, CalibrationCache};
use crate::harness::table::{ResultTable, Value};
use crate::model::Placement;
use crate::procedures::{
    aggregate_hs, calibrate_aggregate, run_test, select_from_stats, AggregateCalibration, TestKind,
    TestStatistic, ThresholdSource,
};

#[derive(Debug, Parser)]
#[command(name = "toeplitz", version, about = "Sparse Toeplitz covariance tests, lag selection and Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print closed-form thresholds and separation radii.
    Thresholds(ThresholdArgs),
    /// Calibrate a test threshold by simulation under the null.
    Calibrate(CalibrateArgs),
    /// Apply a test to samples read from CSV.
    Test(TestArgs),
    /// Select significant lags from samples read from CSV.
    Select(SelectArgs),
    /// Power of the tests along a signal grid.
    PowerCurve(ExperimentArgs),
    /// Hamming risk of the lag selector as a function of n.
    SelectionRisk(ExperimentArgs),
    /// Power of the MS test against the moving-average process.
    MaPower(ExperimentArgs),
    /// Monte Carlo check of the concentration bound.
    VerifyBounds(ExperimentArgs),
    /// Run the scenario named in the config file (or by --scenario).
    Run(RunArgs),
}

fn parse_kind(s: &str) -> std::result::Result<ThresholdKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_test_kind(s: &str) -> std::result::Result<TestKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_placement(s: &str) -> std::result::Result<Placement, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_source(s: &str) -> std::result::Result<ThresholdSource, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_aggregate(s: &str) -> std::result::Result<AggregateCalibration, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| format!("unknown scenario '{s}'"))
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: ThresholdKind,
    /// Confidence parameter; defaults to 8 for ms+ and 2 otherwise.
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long = "S", id = "horizon")]
    horizon: Option<usize>,
    #[arg(long = "s", id = "sparsity")]
    sparsity: Option<usize>,
    #[arg(long = "K", id = "split", default_value_t = 0.5)]
    split: f64,
    /// Print full precision instead of six decimals.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long, value_parser = parse_test_kind)]
    kind: TestKind,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    p: usize,
    #[arg(long = "S", id = "horizon")]
    horizon: Option<usize>,
    #[arg(long = "s", id = "sparsity")]
    sparsity: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long = "R", id = "replications", default_value_t = 5000)]
    replications: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[arg(long, value_parser = parse_test_kind)]
    kind: TestKind,
    /// CSV file, one observation per row.
    #[arg(long)]
    data: PathBuf,
    #[arg(long = "S", id = "horizon")]
    horizon: Option<usize>,
    #[arg(long = "s", id = "sparsity")]
    sparsity: Option<usize>,
    /// Scan sizes of an aggregated HS test (kind hs only).
    #[arg(long, value_delimiter = ',')]
    s_grid: Option<Vec<usize>>,
    /// Fixed threshold; overrides --threshold-source.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_parser = parse_source, default_value = "calibrated")]
    threshold_source: ThresholdSource,
    #[arg(long, value_parser = parse_aggregate, default_value = "bonferroni")]
    aggregate_calibration: AggregateCalibration,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long = "R", id = "replications", default_value_t = 5000)]
    replications: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Divide each lag functional by the estimated variance first.
    #[arg(long)]
    studentize: bool,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long = "S", id = "horizon")]
    horizon: Option<usize>,
    #[arg(long = "s", id = "sparsity")]
    sparsity: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    u: f64,
    /// Fixed selection threshold; defaults to the closed-form one.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    one_sided: bool,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// JSON experiment configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long = "S", id = "horizon")]
    horizon: Option<usize>,
    #[arg(long = "s", id = "sparsity")]
    sparsity: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "R", id = "replications")]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_test_kind)]
    kinds: Option<Vec<TestKind>>,
    #[arg(long, value_parser = parse_placement)]
    placement: Option<Placement>,
    #[arg(long, value_parser = parse_source)]
    threshold_source: Option<ThresholdSource>,
    #[arg(long, value_delimiter = ',')]
    sigma_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    phi_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    u_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    s_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    aggregate_grid: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_aggregate)]
    aggregate_calibration: Option<AggregateCalibration>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long = "K", id = "split")]
    split: Option<f64>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    signal_factor: Option<f64>,
    /// Draw alternatives with random signs.
    #[arg(long, conflicts_with = "one_signed")]
    two_sided: bool,
    /// Draw alternatives with positive signs only.
    #[arg(long)]
    one_signed: bool,
    /// Use the one-sided lag selector.
    #[arg(long)]
    one_sided: bool,
    /// Check the tail of the absolute value.
    #[arg(long)]
    absolute: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    #[command(flatten)]
    experiment: ExperimentArgs,
}

impl ExperimentArgs {
    fn build(&self, scenario: Option<Scenario>) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, scenario) {
            (Some(path), _) => ExperimentConfig::from_path(path)?,
            (None, Some(s)) => ExperimentConfig::new(s),
            (None, None) => {
                return Err(Error::Config("run needs --config or --scenario".into()));
            }
        };
        if let Some(s) = scenario {
            cfg.scenario = s;
        }
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            };
            ($field:ident, some) => {
                if let Some(v) = &self.$field {
                    cfg.$field = Some(v.clone());
                }
            };
        }
        set!(n);
        set!(p);
        set!(alpha);
        set!(replications);
        set!(kinds);
        set!(placement);
        set!(threshold_source);
        set!(aggregate_calibration);
        set!(grid_points);
        set!(signal_factor);
        set!(horizon, some);
        set!(sparsity, some);
        set!(sigma_grid, some);
        set!(phi_grid, some);
        set!(n_grid, some);
        set!(p_grid, some);
        set!(u_grid, some);
        set!(s_grid, some);
        set!(aggregate_grid, some);
        set!(u, some);
        set!(w, some);
        set!(threads, some);
        if let Some(seed) = self.seed {
            cfg.master_seed = Some(seed);
        }
        if let Some(k) = self.split {
            cfg.k_split = k;
        }
        if self.two_sided {
            cfg.two_sided = Some(true);
        }
        if self.one_signed {
            cfg.two_sided = Some(false);
        }
        cfg.one_sided |= self.one_sided;
        cfg.absolute |= self.absolute;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(table: &ResultTable, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => table.write_csv_path(path),
        None => table.write_csv(std::io::stdout().lock()),
    }
}

fn format_value(x: f64, exact: bool) -> Value {
    if exact {
        Value::Float(x)
    } else {
        Value::Text(format!("{x:.6}"))
    }
}

fn thresholds(args: &ThresholdArgs) -> Result<ResultTable> {
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(args.p));
    let mut spec = ThresholdSpec::new(args.kind, args.n, args.p, horizon).with_split(args.split);
    if let Some(u) = args.u {
        spec = spec.with_u(u);
    }
    if let Some(s) = args.sparsity {
        spec = spec.with_sparsity(s);
    }
    let t = theoretical_threshold(&spec)?;
    let radius = match spec.sparsity {
        Some(_) => format_value(separation_radius(&spec)?, args.exact),
        None => Value::Text(String::new()),
    };
    let mut table = ResultTable::new(&["kind", "u", "n", "p", "S", "s", "threshold", "separation_radius"]);
    table.push(vec![
        args.kind.to_string().into(),
        spec.u.into(),
        args.n.into(),
        args.p.into(),
        horizon.into(),
        spec.sparsity.map_or(Value::Text(String::new()), Into::into),
        format_value(t, args.exact),
        radius,
    ])?;
    Ok(table)
}

fn seed_or_env(seed: Option<u64>) -> Result<u64> {
    ExperimentConfig { master_seed: seed, ..ExperimentConfig::new(Scenario::Type1) }.seed()
}

fn calibrate(args: &CalibrateArgs) -> Result<ResultTable> {
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(args.p));
    let s = args.sparsity.unwrap_or_else(|| default_sparsity(horizon));
    let st = TestStatistic::new(args.kind, args.kind.is_scan().then_some(s))?;
    let seed = seed_or_env(args.seed)?;
    let run = || {
        CalibrationCache::new().thresholds(&[st], args.n, args.p, horizon, args.alpha, args.replications, seed)
    };
    let t = match args.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)?,
        None => run()?,
    }[0];
    let mut table = ResultTable::new(&["kind", "s", "n", "p", "S", "alpha", "R", "threshold"]);
    table.push(vec![
        args.kind.to_string().into(),
        st.sparsity.map_or(Value::Text(String::new()), Into::into),
        args.n.into(),
        args.p.into(),
        horizon.into(),
        args.alpha.into(),
        args.replications.into(),
        t.into(),
    ])?;
    Ok(table)
}

fn test(args: &TestArgs) -> Result<String> {
    let samples = read_samples(&args.data)?;
    let (n, p) = (samples.n(), samples.p());
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(p));
    let s = args.sparsity.unwrap_or_else(|| default_sparsity(horizon));
    let seed = seed_or_env(args.seed)?;
    let sparsity = args.kind.is_scan().then_some(s);
    let theoretical = |kind: TestKind, s: usize| {
        let mut spec = ThresholdSpec::new(kind.threshold_kind(), n, p, horizon).with_sparsity(s);
        if let Some(u) = args.u {
            spec = spec.with_u(u);
        }
        theoretical_threshold(&spec)
    };
    if let Some(grid) = &args.s_grid {
        if args.kind != TestKind::Hs {
            return Err(Error::Config("--s-grid aggregates HS tests; use --kind hs".into()));
        }
        let (thresholds, source) = match (args.threshold, args.threshold_source) {
            (Some(t), _) => (vec![t; grid.len()], ThresholdSource::Theoretical),
            (None, ThresholdSource::Theoretical) => (
                grid.iter().map(|&s| theoretical(TestKind::Hs, s)).collect::<Result<Vec<_>>>()?,
                ThresholdSource::Theoretical,
            ),
            (None, ThresholdSource::Calibrated) => (
                calibrate_aggregate(
                    grid,
                    n,
                    p,
                    horizon,
                    args.alpha,
                    args.replications,
                    CalibrationCache::null_stream(seed, n, p, horizon),
                    args.aggregate_calibration,
                )?,
                ThresholdSource::Calibrated,
            ),
        };
        let o = aggregate_hs(&samples, horizon, grid, &thresholds, source)?;
        let grid_text: Vec<String> = grid.iter().map(|s| s.to_string()).collect();
        return Ok(format!(
            "kind=hs s_grid={} excess={} thresholds={} source={} decision={}",
            grid_text.join(","),
            o.statistic,
            thresholds.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
            o.threshold_source,
            if o.reject { "reject" } else { "accept" }
        ));
    }
    let (threshold, source) = match (args.threshold, args.threshold_source) {
        (Some(t), _) => (t, ThresholdSource::Theoretical),
        (None, ThresholdSource::Theoretical) => (theoretical(args.kind, s)?, ThresholdSource::Theoretical),
        (None, ThresholdSource::Calibrated) => {
            let st = TestStatistic::new(args.kind, sparsity)?;
            let t = CalibrationCache::new()
                .thresholds(&[st], n, p, horizon, args.alpha, args.replications, seed)?[0];
            (t, ThresholdSource::Calibrated)
        }
    };
    let outcome = if args.studentize {
        let st = TestStatistic::new(args.kind, sparsity)?;
        let statistic = st.evaluate(&lag_functionals(&samples, horizon)?.studentized())?;
        crate::procedures::TestOutcome {
            kind: args.kind,
            sparsity: st.sparsity,
            statistic,
            threshold,
            reject: statistic >= threshold,
            threshold_source: source,
        }
    } else {
        run_test(args.kind, &samples, horizon, sparsity, threshold, source)?
    };
    let s_text = outcome.sparsity.map(|s| format!(" s={s}")).unwrap_or_default();
    Ok(format!(
        "kind={}{} n={n} p={p} S={horizon} statistic={} threshold={} source={} decision={}",
        outcome.kind,
        s_text,
        outcome.statistic,
        outcome.threshold,
        outcome.threshold_source,
        if outcome.reject { "reject" } else { "accept" }
    ))
}

fn select(args: &SelectArgs) -> Result<String> {
    let samples = read_samples(&args.data)?;
    let (n, p) = (samples.n(), samples.p());
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(p));
    let tau = match args.tau {
        Some(t) => t,
        None => {
            let s = args.sparsity.unwrap_or_else(|| default_sparsity(horizon));
            crate::concentration::selector_threshold(n, p, horizon, s, args.u)?
        }
    };
    let sel = select_from_stats(&lag_functionals(&samples, horizon)?, tau, args.one_sided)?;
    let selected: Vec<String> = sel
        .eta_hat
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == 1)
        .map(|(j, _)| (j + 1).to_string())
        .collect();
    let eta: Vec<String> = sel.eta_hat.iter().map(|e| e.to_string()).collect();
    Ok(format!(
        "tau={} one_sided={} eta_hat={} selected={}",
        sel.tau,
        sel.one_sided,
        eta.join(","),
        selected.join(",")
    ))
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Thresholds(a) => thresholds(&a)?.write_csv(stdout)?,
        Command::Calibrate(a) => calibrate(&a)?.write_csv(stdout)?,
        Command::Test(a) => writeln!(stdout, "{}", test(&a)?)?,
        Command::Select(a) => writeln!(stdout, "{}", select(&a)?)?,
        Command::PowerCurve(a) => emit(&run_scenario(&a.build(Some(Scenario::PowerCurve))?)?, a.out.as_ref())?,
        Command::SelectionRisk(a) => {
            emit(&run_scenario(&a.build(Some(Scenario::SelectionRisk))?)?, a.out.as_ref())?
        }
        Command::MaPower(a) => emit(&run_scenario(&a.build(Some(Scenario::MaPower))?)?, a.out.as_ref())?,
        Command::VerifyBounds(a) => {
            emit(&run_scenario(&a.build(Some(Scenario::VerifyConcentration))?)?, a.out.as_ref())?
        }
        Command::Run(a) => emit(&run_scenario(&a.experiment.build(a.scenario)?)?, a.experiment.out.as_ref())?,
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                1
            } else {
                2
            }
        }
    }
}
