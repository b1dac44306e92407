use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use uav_coexist::config::{Scenario, ScenarioFile};
use uav_coexist::design::{self, ComparisonConfig};
use uav_coexist::montecarlo::{FarField, SimConfig};
use uav_coexist::network::{db_to_linear, invert_effective_density, SchemeKind};
use uav_coexist::sweep::{self, Metric, SweepSpec, SweepVar};
use uav_coexist::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "uav-coexist",
    version,
    about = "SRP / TC analysis of coexisting UAV radar and communication networks"
)]
struct Cli {
    /// Scenario JSON file; missing keys take the reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate metrics at one point, along a sweep, or for a figure preset.
    Eval(EvalArgs),
    /// Run a design solver and print its report as JSON.
    Solve(SolveArgs),
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_th")]
    gamma_th_db: Option<f64>,
    /// Linear ranging threshold.
    #[arg(long)]
    gamma_th: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta_th")]
    beta_th_db: Option<f64>,
    /// Linear data threshold.
    #[arg(long)]
    beta_th: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    r0_m: Option<f64>,
    #[arg(long)]
    lambda_d_raw: Option<f64>,
    #[arg(long)]
    lambda_r_raw: Option<f64>,
    #[arg(long)]
    duty_cycle: Option<f64>,
    /// Noise power, W (simulation only).
    #[arg(long)]
    n0_w: Option<f64>,
}

impl Overrides {
    fn apply(&self, s: &mut Scenario) -> Result<()> {
        if let Some(v) = self.gamma_th_db {
            s.gamma_th = db_to_linear(v);
        }
        if let Some(v) = self.gamma_th {
            s.gamma_th = v;
        }
        if let Some(v) = self.beta_th_db {
            s.beta_th = db_to_linear(v);
        }
        if let Some(v) = self.beta_th {
            s.beta_th = v;
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut s.phi, self.phi);
        set(&mut s.tau, self.tau);
        set(&mut s.dens.r0, self.r0_m);
        set(&mut s.dens.lambda_d_raw, self.lambda_d_raw);
        set(&mut s.dens.lambda_r_raw, self.lambda_r_raw);
        set(&mut s.dens.delta, self.duty_cycle);
        set(&mut s.params.n0, self.n0_w);
        s.validate()
    }
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Also run the Monte Carlo simulator.
    #[arg(long)]
    simulate: bool,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// RNG seed, decimal or 0x-prefixed hex.
    #[arg(long, default_value = "0x5EED", value_parser = parse_seed)]
    seed: u64,
    /// Truncation radius of the interferer field, m ("inf" allowed).
    #[arg(long, default_value_t = 5000.0)]
    r_max: f64,
    /// Add the configured noise power to the simulated interference.
    #[arg(long)]
    include_noise: bool,
    /// Sample true Matérn type-II processes instead of effective-density HPPPs.
    #[arg(long)]
    mhcpp: bool,
    /// Sample every interferer up to r_max instead of aggregating the far field.
    #[arg(long)]
    explicit_far_field: bool,
}

fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    let parsed = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

impl SimArgs {
    fn config(&self) -> Option<SimConfig> {
        self.simulate.then(|| SimConfig {
            trials: self.trials,
            r_max: self.r_max,
            seed: self.seed,
            use_mhcpp: self.mhcpp,
            include_noise: self.include_noise,
            far_field: if self.explicit_far_field {
                FarField::Explicit
            } else {
                SimConfig::default().far_field
            },
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Srp,
    Outage,
    Tc,
    All,
}

impl MetricArg {
    fn metrics(self) -> Vec<Metric> {
        match self {
            MetricArg::Srp => vec![Metric::Srp],
            MetricArg::Outage => vec![Metric::Outage],
            MetricArg::Tc => vec![Metric::Tc],
            MetricArg::All => Metric::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Soma,
    Tdma,
    Both,
}

impl SchemeArg {
    fn schemes(self) -> Vec<SchemeKind> {
        match self {
            SchemeArg::Soma => vec![SchemeKind::Soma],
            SchemeArg::Tdma => vec![SchemeKind::Tdma],
            SchemeArg::Both => vec![SchemeKind::Soma, SchemeKind::Tdma],
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[command(flatten)]
    sim: SimArgs,

    #[arg(long, value_enum, default_value_t = MetricArg::All)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
    scheme: SchemeArg,

    /// Figure preset: fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, fig5r, fig6, fig7.
    #[arg(long, conflicts_with = "sweep")]
    preset: Option<String>,
    /// Comm-to-active-radar density ratios for fig5r, comma separated.
    #[arg(long, value_delimiter = ',')]
    ratio: Option<Vec<f64>>,

    /// Sweep variable: gamma_th_db, beta_th_db, phi, tau, lambda_d_raw, lambda_r_raw, r0_m.
    #[arg(long, requires_all = ["start", "stop", "steps"])]
    sweep: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,

    /// Output format; defaults to json for a single point and csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Solver {
    MaxDensitySoma,
    MaxDensityTdma,
    MinGuardRadius,
    OptimalCommDensity,
    Compare,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(value_enum)]
    solver: Solver,
    #[command(flatten)]
    overrides: Overrides,
    /// Target SRP for the density and guard-radius solvers.
    #[arg(long)]
    target: Option<f64>,
    /// Effective comm-to-radar density ratio for max-density-soma.
    #[arg(long, default_value_t = 1.0)]
    ratio: f64,
    /// Scheme for min-guard-radius (defaults to the config's scheme).
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Start from a figure preset's parameters.
    #[arg(long)]
    preset: Option<String>,
}

fn load_scenario(path: Option<&PathBuf>) -> Result<Scenario> {
    match path {
        Some(p) => ScenarioFile::load(p)?.resolve(),
        None => Ok(Scenario::default()),
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Error::Config(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_err(e: io::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

fn run_eval(base: Scenario, args: &EvalArgs) -> Result<()> {
    let sim = args.sim.config();
    let metrics = args.metric.metrics();
    let schemes = args.scheme.schemes();

    let plan = if let Some(name) = &args.preset {
        let mut p = sweep::preset(name, &base, args.ratio.as_deref())?;
        args.overrides.apply(&mut p.scenario)?;
        p.sweep.simulate = sim.is_some();
        Some((Some(p.name), p.scenario, p.series, p.sweep))
    } else if let Some(var) = &args.sweep {
        let mut scenario = base;
        args.overrides.apply(&mut scenario)?;
        let spec = SweepSpec {
            variable: var.parse::<SweepVar>()?,
            start: args.start.unwrap_or_default(),
            stop: args.stop.unwrap_or_default(),
            steps: args.steps.unwrap_or_default(),
            metrics: metrics.clone(),
            schemes: schemes.clone(),
            simulate: sim.is_some(),
        };
        Some((None, scenario, None, spec))
    } else {
        None
    };

    let mut out = open_output(args.output.as_ref())?;
    match plan {
        Some((preset, scenario, series, spec)) => {
            if scenario.params.n0 > 0.0 {
                log::warn!(
                    "n0 = {} W is ignored by the closed forms",
                    scenario.params.n0
                );
            }
            let table = sweep::run_sweep(&scenario, series.as_ref(), &spec, sim.as_ref())?;
            match args.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let header = json!({
                        "preset": preset,
                        "scenario": scenario,
                        "series": series,
                        "sweep": spec,
                        "simulation": sim,
                    });
                    table.write_csv(&header, &mut out)?;
                }
                Format::Json => table.write_json_lines(&mut out)?,
            }
        }
        None => {
            let mut scenario = base;
            args.overrides.apply(&mut scenario)?;
            if scenario.params.n0 > 0.0 {
                log::warn!(
                    "n0 = {} W is ignored by the closed forms",
                    scenario.params.n0
                );
            }
            let records = sweep::evaluate_point(&scenario, &metrics, &schemes, sim.as_ref())?;
            match args.format.unwrap_or(Format::Json) {
                Format::Json => {
                    for r in &records {
                        let line =
                            serde_json::to_string(r).map_err(|e| Error::Numeric(e.to_string()))?;
                        writeln!(out, "{line}").map_err(write_err)?;
                    }
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    for r in &records {
                        w.serialize(r)
                            .map_err(|e| Error::Config(format!("CSV write failed: {e}")))?;
                    }
                    w.flush().map_err(write_err)?;
                }
            }
        }
    }
    out.flush().map_err(write_err)
}

fn require_target(args: &SolveArgs) -> Result<f64> {
    args.target
        .ok_or_else(|| Error::Config(format!("--target is required for {:?}", args.solver)))
}

fn run_solve(base: Scenario, args: &SolveArgs) -> Result<()> {
    let mut s = match &args.preset {
        Some(name) => sweep::preset(name, &base, None)?.scenario,
        None => base,
    };
    args.overrides.apply(&mut s)?;
    let scheme_kind = match args.scheme {
        Some(SchemeArg::Soma) => SchemeKind::Soma,
        Some(SchemeArg::Tdma) => SchemeKind::Tdma,
        Some(SchemeArg::Both) => {
            return Err(Error::Config("solvers take a single scheme".into()));
        }
        None => s.primary,
    };
    let r0 = s.dens.r0;
    let report: Value = match args.solver {
        Solver::MaxDensitySoma => {
            let sol = design::max_density_srp_soma(
                require_target(args)?,
                s.gamma_th,
                s.phi,
                &s.params,
                r0,
                args.ratio,
            )?;
            let mut report = design::report_max_density_soma(&sol, r0);
            let raw_r = invert_effective_density(sol.lambda_r, r0)
                .ok()
                .map(|a| a / s.dens.delta);
            report.details.insert("lambda_r_raw".into(), json!(raw_r));
            serde_json::to_value(report)
        }
        Solver::MaxDensityTdma => {
            let (lambda_r, residual) =
                design::max_density_srp_tdma(require_target(args)?, s.gamma_th, &s.params, r0)?;
            let mut report = design::report_max_density_tdma(lambda_r, residual, r0);
            let multiplier = s.dens.delta / (1.0 - s.tau);
            let raw_r = invert_effective_density(lambda_r, r0)
                .ok()
                .map(|a| a / multiplier);
            report.details.insert("lambda_r_raw".into(), json!(raw_r));
            serde_json::to_value(report)
        }
        Solver::MinGuardRadius => {
            let sol = design::min_guard_radius(
                &s.scheme(scheme_kind),
                require_target(args)?,
                s.gamma_th,
                &s.dens,
                &s.params,
            )?;
            serde_json::to_value(design::report_min_guard_radius(&sol))
        }
        Solver::OptimalCommDensity => {
            let sol =
                design::optimal_comm_density(s.beta_th, &s.params, r0, &s.scheme(scheme_kind))?;
            serde_json::to_value(design::report_optimal_comm_density(&sol))
        }
        Solver::Compare => {
            let cmp = design::compare_schemes(&ComparisonConfig {
                params: s.params,
                dens: s.dens,
                phi: s.phi,
                tau: s.tau,
                gamma_th: s.gamma_th,
                beta_th: s.beta_th,
            })?;
            serde_json::to_value(cmp)
        }
    }
    .map_err(|e| Error::Numeric(e.to_string()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{report}").map_err(write_err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = load_scenario(cli.config.as_ref()).and_then(|base| match &cli.command {
        Command::Eval(args) => run_eval(base, args),
        Command::Solve(args) => run_solve(base, args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
