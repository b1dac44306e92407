//! Parameter sweeps, figure presets and their CSV / JSON-lines emission.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::analytic::{self, MetricInputs};
use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::montecarlo::{self, SimConfig, SimEstimate};
use crate::network::{db_to_linear, SchemeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    GammaThDb,
    BetaThDb,
    Phi,
    Tau,
    LambdaDRaw,
    LambdaRRaw,
    R0M,
}

impl SweepVar {
    pub const ALL: [SweepVar; 7] = [
        SweepVar::GammaThDb,
        SweepVar::BetaThDb,
        SweepVar::Phi,
        SweepVar::Tau,
        SweepVar::LambdaDRaw,
        SweepVar::LambdaRRaw,
        SweepVar::R0M,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::GammaThDb => "gamma_th_db",
            SweepVar::BetaThDb => "beta_th_db",
            SweepVar::Phi => "phi",
            SweepVar::Tau => "tau",
            SweepVar::LambdaDRaw => "lambda_d_raw",
            SweepVar::LambdaRRaw => "lambda_r_raw",
            SweepVar::R0M => "r0_m",
        }
    }

    /// Sets this variable on `scenario`.
    pub fn apply(&self, scenario: &mut Scenario, value: f64) {
        match self {
            SweepVar::GammaThDb => scenario.gamma_th = db_to_linear(value),
            SweepVar::BetaThDb => scenario.beta_th = db_to_linear(value),
            SweepVar::Phi => scenario.phi = value,
            SweepVar::Tau => scenario.tau = value,
            SweepVar::LambdaDRaw => scenario.dens.lambda_d_raw = value,
            SweepVar::LambdaRRaw => scenario.dens.lambda_r_raw = value,
            SweepVar::R0M => scenario.dens.r0 = value,
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVar::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepVar::ALL.iter().map(|v| v.name()).collect();
                Error::config(format!(
                    "unknown sweep variable '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Srp,
    Outage,
    Tc,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Srp, Metric::Outage, Metric::Tc];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Srp => "srp",
            Metric::Outage => "outage",
            Metric::Tc => "tc",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::config(format!("unknown metric '{s}' (expected srp, outage or tc)"))
            })
    }
}

/// A one-dimensional sweep over `steps` evenly spaced values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub metrics: Vec<Metric>,
    pub schemes: Vec<SchemeKind>,
    pub simulate: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::config(format!(
                "a sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        if !(self.start < self.stop) {
            return Err(Error::config(format!(
                "sweep start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.metrics.is_empty() || self.schemes.is_empty() {
            return Err(Error::config(
                "a sweep needs at least one metric and one scheme",
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.start + i as f64 * step)
            .collect()
    }
}

/// An outer loop of discrete values, e.g. one curve per guard radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

/// Rectangular numeric output with named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// CSV preceded by one `#` line holding `header` as compact JSON.
    pub fn write_csv<W: Write>(&self, header: &Value, mut out: W) -> Result<()> {
        writeln!(out, "# {header}").map_err(io_error)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(csv_error)?;
        }
        w.flush().map_err(io_error)
    }

    /// One JSON object per row.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.clone(), json_number(*v)))
                .collect();
            writeln!(out, "{}", Value::Object(obj)).map_err(io_error)?;
        }
        Ok(())
    }
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub(crate) fn io_error(e: std::io::Error) -> Error {
    Error::config(format!("write failed: {e}"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::config(format!("CSV write failed: {e}"))
}

fn inputs_for(scenario: &Scenario, scheme: SchemeKind) -> Result<MetricInputs> {
    MetricInputs::from_raw(
        scenario.params,
        scenario.scheme(scheme),
        &scenario.dens,
        scenario.gamma_th,
        scenario.beta_th,
    )
}

/// Closed-form value of one metric.
pub fn analytic_value(metric: Metric, inputs: &MetricInputs) -> Result<analytic::Evaluated> {
    match metric {
        Metric::Srp => analytic::srp(inputs),
        Metric::Outage => analytic::outage(inputs),
        Metric::Tc => analytic::transmission_capacity(inputs),
    }
}

/// Monte Carlo value of one metric.
pub fn simulated_value(
    metric: Metric,
    inputs: &MetricInputs,
    sim: &SimConfig,
) -> Result<SimEstimate> {
    sim.check_truncation(&inputs.params, inputs.r0);
    match metric {
        Metric::Srp => montecarlo::simulate_srp(inputs, sim),
        Metric::Outage => montecarlo::simulate_outage(inputs, sim),
        Metric::Tc => montecarlo::simulate_capacity(inputs, sim),
    }
}

/// Simulated values of `metric` along a threshold sweep, sharing trials
/// across thresholds where the metric's threshold is the swept one.
fn simulate_column(
    scenario: &Scenario,
    scheme: SchemeKind,
    metric: Metric,
    spec: &SweepSpec,
    values: &[f64],
    sim: &SimConfig,
) -> Result<Vec<SimEstimate>> {
    let batched = matches!(
        (spec.variable, metric),
        (SweepVar::GammaThDb, Metric::Srp) | (SweepVar::BetaThDb, Metric::Outage | Metric::Tc)
    );
    if !batched {
        return values
            .iter()
            .map(|&v| {
                let mut point = *scenario;
                spec.variable.apply(&mut point, v);
                simulated_value(metric, &inputs_for(&point, scheme)?, sim)
            })
            .collect();
    }
    let inputs = inputs_for(scenario, scheme)?;
    sim.check_truncation(&inputs.params, inputs.r0);
    let thresholds: Vec<f64> = values.iter().map(|&v| db_to_linear(v)).collect();
    match metric {
        Metric::Srp => montecarlo::simulate_srp_sweep(&inputs, &thresholds, sim),
        Metric::Outage => montecarlo::simulate_outage_sweep(&inputs, &thresholds, sim),
        Metric::Tc => {
            let outages = montecarlo::simulate_outage_sweep(&inputs, &thresholds, sim)?;
            Ok(outages
                .iter()
                .zip(&thresholds)
                .map(|(o, &b)| montecarlo::capacity_from_outage(&inputs, b, o))
                .collect())
        }
    }
}

/// Evaluates `spec` (once per series value, if any) and returns a long-format
/// table: series column, sweep column, then `<metric>_<scheme>` columns and,
/// when simulating, `<metric>_<scheme>_sim` and `<metric>_<scheme>_se`.
pub fn run_sweep(
    scenario: &Scenario,
    series: Option<&Series>,
    spec: &SweepSpec,
    sim: Option<&SimConfig>,
) -> Result<Table> {
    spec.validate()?;
    if spec.simulate && sim.is_none() {
        return Err(Error::config(
            "simulation requested without a simulation config",
        ));
    }
    let mut columns = Vec::new();
    if let Some(s) = series {
        columns.push(s.variable.name().to_string());
    }
    columns.push(spec.variable.name().to_string());
    for metric in &spec.metrics {
        for scheme in &spec.schemes {
            let base = format!("{}_{}", metric.name(), scheme.as_str());
            if spec.simulate {
                columns.push(base.clone());
                columns.push(format!("{base}_sim"));
                columns.push(format!("{base}_se"));
            } else {
                columns.push(base);
            }
        }
    }

    let values = spec.values();
    let outer: Vec<Option<f64>> = match series {
        Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
        None => vec![None],
    };
    let mut rows = Vec::new();
    for outer_value in outer {
        let mut base = *scenario;
        if let (Some(s), Some(v)) = (series, outer_value) {
            s.variable.apply(&mut base, v);
        }
        let mut block: Vec<Vec<f64>> = values
            .iter()
            .map(|&v| outer_value.into_iter().chain(std::iter::once(v)).collect())
            .collect();
        for metric in &spec.metrics {
            for &scheme in &spec.schemes {
                for (row, &v) in block.iter_mut().zip(&values) {
                    let mut point = base;
                    spec.variable.apply(&mut point, v);
                    row.push(analytic_value(*metric, &inputs_for(&point, scheme)?)?.value);
                }
                if let (true, Some(sim)) = (spec.simulate, sim) {
                    let est = simulate_column(&base, scheme, *metric, spec, &values, sim)?;
                    for (row, e) in block.iter_mut().zip(est) {
                        row.push(e.mean);
                        row.push(e.std_err);
                    }
                }
            }
        }
        rows.extend(block);
    }
    Ok(Table { columns, rows })
}

/// A named figure preset: scenario overrides, optional series and sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub scenario: Scenario,
    pub series: Option<Series>,
    pub sweep: SweepSpec,
}

pub const PRESET_NAMES: [&str; 9] = [
    "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig5r", "fig6", "fig7",
];

/// Builds a preset on top of `base`, overriding only the parameters the
/// figure fixes. `ratios` is used by `fig5r` (comm density over active radar
/// density); `None` gives 0.5, 1 and 2.
pub fn preset(name: &str, base: &Scenario, ratios: Option<&[f64]>) -> Result<Preset> {
    let both = vec![SchemeKind::Soma, SchemeKind::Tdma];
    let mut s = *base;
    s.phi = 0.5;
    s.tau = 0.5;
    let sweep =
        |variable, start, stop, steps, metrics: Vec<Metric>, schemes: Vec<SchemeKind>| SweepSpec {
            variable,
            start,
            stop,
            steps,
            metrics,
            schemes,
            simulate: false,
        };
    let guard_series = Some(Series {
        variable: SweepVar::R0M,
        values: vec![5.0, 15.0, 25.0],
    });
    let (series, spec) = match name {
        "fig3a" | "fig3b" | "fig4a" | "fig4b" => {
            if name.starts_with("fig3") {
                s.dens.lambda_d_raw = 0.01;
                s.dens.lambda_r_raw = 0.1;
            } else {
                s.dens.lambda_d_raw = 0.00025;
                s.dens.lambda_r_raw = 0.005;
                s.dens.r0 = 5.0;
            }
            let series = if name.starts_with("fig3") {
                guard_series
            } else {
                None
            };
            let spec = if name.ends_with('a') {
                sweep(SweepVar::GammaThDb, -20.0, 0.0, 11, vec![Metric::Srp], both)
            } else {
                sweep(SweepVar::BetaThDb, -10.0, 10.0, 11, vec![Metric::Tc], both)
            };
            (series, spec)
        }
        "fig5a" | "fig5b" => {
            s.dens.lambda_d_raw = 0.01;
            s.dens.lambda_r_raw = 0.1;
            s.beta_th = db_to_linear(-5.0);
            s.gamma_th = db_to_linear(-10.0);
            let metrics = vec![Metric::Srp, Metric::Tc];
            let spec = if name == "fig5a" {
                sweep(SweepVar::Phi, 0.0, 1.0, 21, metrics, vec![SchemeKind::Soma])
            } else {
                // tau stops where the active radar fraction delta/(1 - tau) reaches 1.
                let stop = 1.0 - s.dens.delta;
                sweep(
                    SweepVar::Tau,
                    0.0,
                    stop,
                    19,
                    metrics,
                    vec![SchemeKind::Tdma],
                )
            };
            (None, spec)
        }
        "fig5r" => {
            s.gamma_th = db_to_linear(-10.0);
            let active = s.dens.active_radar_density(&s.scheme(SchemeKind::Soma));
            let ratios = ratios.unwrap_or(&[0.5, 1.0, 2.0]);
            if ratios.iter().any(|r| !(*r > 0.0)) {
                return Err(Error::config("fig5r ratios must be positive"));
            }
            let series = Series {
                variable: SweepVar::LambdaDRaw,
                values: ratios.iter().map(|r| r * active).collect(),
            };
            (
                Some(series),
                sweep(
                    SweepVar::Phi,
                    0.05,
                    0.95,
                    19,
                    vec![Metric::Srp],
                    vec![SchemeKind::Soma],
                ),
            )
        }
        "fig6" => {
            s.dens.lambda_r_raw = 0.01;
            s.dens.r0 = 5.0;
            s.beta_th = 1.0;
            s.gamma_th = db_to_linear(-10.0);
            (
                None,
                sweep(
                    SweepVar::LambdaDRaw,
                    0.0005,
                    0.03,
                    60,
                    vec![Metric::Srp, Metric::Tc],
                    both,
                ),
            )
        }
        "fig7" => {
            s.dens.lambda_d_raw = 0.01;
            s.dens.r0 = 5.0;
            s.beta_th = 1.0;
            s.gamma_th = db_to_linear(-10.0);
            (
                None,
                sweep(
                    SweepVar::LambdaRRaw,
                    0.01,
                    0.3,
                    30,
                    vec![Metric::Srp, Metric::Tc],
                    both,
                ),
            )
        }
        other => {
            return Err(Error::config(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let name = PRESET_NAMES
        .into_iter()
        .find(|n| *n == name)
        .expect("matched above");
    Ok(Preset {
        name,
        scenario: s,
        series,
        sweep: spec,
    })
}

/// One metric value for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    pub metric: Metric,
    pub scheme: SchemeKind,
    pub analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub degenerate_split: bool,
}

/// Evaluates every requested metric and scheme at a single operating point.
pub fn evaluate_point(
    scenario: &Scenario,
    metrics: &[Metric],
    schemes: &[SchemeKind],
    sim: Option<&SimConfig>,
) -> Result<Vec<MetricRecord>> {
    let mut records = Vec::new();
    for &scheme in schemes {
        let inputs = inputs_for(scenario, scheme)?;
        for &metric in metrics {
            let value = analytic_value(metric, &inputs)?;
            let est = sim
                .map(|s| simulated_value(metric, &inputs, s))
                .transpose()?;
            records.push(MetricRecord {
                metric,
                scheme,
                analytic: value.value,
                simulated: est.map(|e| e.mean),
                std_err: est.map(|e| e.std_err),
                degenerate_split: value.degenerate_split,
            });
        }
    }
    Ok(records)
}
