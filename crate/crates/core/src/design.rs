//! Network design queries on top of the closed forms: maximum densities under
//! an SRP target, the minimum guard radius, the TC-optimal comm density and
//! the SOMA/TDMA comparison report.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use serde_json::Value;

use crate::analytic::{self, c3_prime, srp_coefficients, MetricInputs};
use crate::error::{Error, Result};
use crate::network::{
    invert_effective_density, AccessScheme, DensityConfig, EffectiveDensities, RadioParams,
};

/// Lower end of the guard-radius bracket, m.
pub const GUARD_RADIUS_MIN: f64 = 1e-3;
/// Upper end of the guard-radius bracket, m.
pub const GUARD_RADIUS_MAX: f64 = 1e6;
const GUARD_RADIUS_TOL: f64 = 1e-6;
const GUARD_RADIUS_MAX_ITER: u32 = 200;

/// Machine-readable outcome of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub quantity: String,
    pub value: f64,
    pub units: String,
    /// Absolute constraint residual after substituting the solution back.
    pub residual: f64,
    pub iterations: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl DesignReport {
    fn new(quantity: &str, value: f64, units: &str, residual: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            value,
            units: units.to_string(),
            residual,
            iterations: 0,
            bracket: None,
            details: BTreeMap::new(),
        }
    }

    fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

fn check_target(target: f64) -> Result<()> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::config(format!(
            "target SRP must lie in (0, 1], got {target}"
        )));
    }
    Ok(())
}

/// Solution of the SOMA maximum-density problem, effective densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SomaDensities {
    pub lambda_d: f64,
    pub lambda_r: f64,
    /// `|srp(lambda_d, lambda_r) - target|`.
    pub residual: f64,
}

fn srp_at(
    params: &RadioParams,
    scheme: AccessScheme,
    eff: EffectiveDensities,
    r0: f64,
    gamma_th: f64,
) -> Result<f64> {
    let inputs = MetricInputs {
        params: *params,
        scheme,
        eff,
        r0,
        gamma_th,
        beta_th: 1.0,
    };
    inputs.validate()?;
    Ok(analytic::srp(&inputs)?.value)
}

/// Largest effective densities with `lambda_d = ratio * lambda_r` that keep
/// the SOMA SRP at `target`. The SRP exponent is linear in the densities, so
/// the boundary is solved in closed form.
pub fn max_density_srp_soma(
    target: f64,
    gamma_th: f64,
    phi: f64,
    params: &RadioParams,
    r0: f64,
    ratio: f64,
) -> Result<SomaDensities> {
    check_target(target)?;
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::config(format!(
            "density ratio must be positive, got {ratio}"
        )));
    }
    let scheme = AccessScheme::Soma { phi };
    scheme.validate()?;
    params.validate()?;
    let coef = srp_coefficients(params, &scheme, gamma_th, r0)?;
    let rhs = -target.ln() / (2.0 * PI * coef.scale);
    let lambda_r = rhs / (ratio * coef.comm_weight * coef.c1 + coef.c2);
    let lambda_d = ratio * lambda_r;
    let eff = EffectiveDensities {
        lambda_d,
        lambda_r,
        lambda_r_active_raw: lambda_r,
    };
    let residual = (srp_at(params, scheme, eff, r0, gamma_th)? - target).abs();
    Ok(SomaDensities {
        lambda_d,
        lambda_r,
        residual,
    })
}

/// Largest effective active-radar density keeping the TDMA SRP at `target`.
/// Returns `(lambda_r, residual)`.
pub fn max_density_srp_tdma(
    target: f64,
    gamma_th: f64,
    params: &RadioParams,
    r0: f64,
) -> Result<(f64, f64)> {
    check_target(target)?;
    params.validate()?;
    let scheme = AccessScheme::Tdma { tau: 0.5 };
    let coef = srp_coefficients(params, &scheme, gamma_th, r0)?;
    let lambda_r = -target.ln() / (2.0 * PI * coef.scale * coef.c2);
    let eff = EffectiveDensities {
        lambda_d: 0.0,
        lambda_r,
        lambda_r_active_raw: lambda_r,
    };
    let residual = (srp_at(params, scheme, eff, r0, gamma_th)? - target).abs();
    Ok((lambda_r, residual))
}

/// Outcome of the guard-radius search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuardRadius {
    pub r0: f64,
    pub srp: f64,
    pub residual: f64,
    pub iterations: u32,
    pub bracket: [f64; 2],
}

/// Smallest guard radius whose SRP reaches `target`, by bisection.
///
/// Effective densities are recomputed from the raw densities in `dens` at
/// every candidate radius; `dens.r0` is ignored. The returned radius is the
/// upper end of the final bracket, so `srp >= target` holds at it.
pub fn min_guard_radius(
    scheme: &AccessScheme,
    target: f64,
    gamma_th: f64,
    dens: &DensityConfig,
    params: &RadioParams,
) -> Result<GuardRadius> {
    check_target(target)?;
    let srp_of = |r0: f64| -> Result<f64> {
        let inputs = MetricInputs::from_raw(
            *params,
            *scheme,
            &DensityConfig { r0, ..*dens },
            gamma_th,
            1.0,
        )?;
        Ok(analytic::srp(&inputs)?.value)
    };
    let (mut lo, mut hi) = (GUARD_RADIUS_MIN, GUARD_RADIUS_MAX);
    let bracket = [lo, hi];
    let crowded = dens.lambda_d_raw > 0.0 || dens.lambda_r_raw > 0.0;
    if target >= 1.0 && crowded {
        return Err(Error::Infeasible(
            "SRP stays below 1 at every finite guard radius when interferers are present".into(),
        ));
    }
    let at_lo = srp_of(lo)?;
    if at_lo >= target {
        return Ok(GuardRadius {
            r0: lo,
            srp: at_lo,
            residual: at_lo - target,
            iterations: 0,
            bracket,
        });
    }
    let at_hi = srp_of(hi)?;
    if at_hi < target {
        return Err(Error::Infeasible(format!(
            "target SRP {target} not reached even at r0 = {hi} m (SRP there is {at_hi})"
        )));
    }
    let mut srp_hi = at_hi;
    let mut iterations = 0;
    while hi - lo > GUARD_RADIUS_TOL && iterations < GUARD_RADIUS_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let value = srp_of(mid)?;
        if value >= target {
            hi = mid;
            srp_hi = value;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(GuardRadius {
        r0: hi,
        srp: srp_hi,
        residual: srp_hi - target,
        iterations,
        bracket,
    })
}

/// TC-optimal communication density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalDensity {
    /// Effective optimum `1 / (2 pi C3')`.
    pub lambda_d: f64,
    /// Raw density thinning to `lambda_d`; `None` when outside the range of
    /// the hard-core map at this guard radius.
    pub lambda_d_raw: Option<f64>,
    pub c3_prime: f64,
}

/// Effective comm density maximising TC. The optimum does not depend on the
/// scheme; `scheme` is only validated.
pub fn optimal_comm_density(
    beta_th: f64,
    params: &RadioParams,
    r0: f64,
    scheme: &AccessScheme,
) -> Result<OptimalDensity> {
    params.validate()?;
    scheme.validate()?;
    if !(beta_th > 0.0) {
        return Err(Error::config(format!(
            "beta_th must be positive, got {beta_th}"
        )));
    }
    let c3p = c3_prime(params, beta_th, r0)?;
    let lambda_d = 1.0 / (2.0 * PI * c3p);
    let lambda_d_raw = match invert_effective_density(lambda_d, r0) {
        Ok(raw) => Some(raw),
        Err(Error::OutOfRange { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(OptimalDensity {
        lambda_d,
        lambda_d_raw,
        c3_prime: c3p,
    })
}

/// Inputs to [`compare_schemes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonConfig {
    pub params: RadioParams,
    pub dens: DensityConfig,
    pub phi: f64,
    pub tau: f64,
    pub gamma_th: f64,
    pub beta_th: f64,
}

/// All four metrics for both schemes plus the case flags, which are only
/// filled in at `phi = tau = 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeComparison {
    pub srp_soma: f64,
    pub srp_tdma: f64,
    pub tc_soma: f64,
    pub tc_tdma: f64,
    pub outage_soma: f64,
    pub outage_tdma: f64,
    pub case1_holds: Option<bool>,
    pub case2_holds: Option<bool>,
    /// `1 - exp(-2 pi lambda_r C3') < 1/2` with the SOMA radar density.
    pub prop5_condition: Option<bool>,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

pub fn compare_schemes(cfg: &ComparisonConfig) -> Result<SchemeComparison> {
    let soma = AccessScheme::Soma { phi: cfg.phi };
    let tdma = AccessScheme::Tdma { tau: cfg.tau };
    let so = MetricInputs::from_raw(cfg.params, soma, &cfg.dens, cfg.gamma_th, cfg.beta_th)?;
    let td = MetricInputs::from_raw(cfg.params, tdma, &cfg.dens, cfg.gamma_th, cfg.beta_th)?;

    let flagged = cfg.phi == 0.5 && cfg.tau == 0.5;
    let (case1, case2, prop5) = if flagged {
        let active = cfg.dens.active_radar_density(&soma);
        let c3p = c3_prime(&cfg.params, cfg.beta_th, cfg.dens.r0)?;
        let prop5 = -(-2.0 * PI * so.eff.lambda_r * c3p).exp_m1() < 0.5;
        (
            Some(near(cfg.dens.lambda_d_raw, active)),
            Some(cfg.dens.lambda_d_raw < active && !near(cfg.dens.lambda_d_raw, active)),
            Some(prop5),
        )
    } else {
        (None, None, None)
    };

    Ok(SchemeComparison {
        srp_soma: analytic::srp(&so)?.value,
        srp_tdma: analytic::srp(&td)?.value,
        tc_soma: analytic::transmission_capacity(&so)?.value,
        tc_tdma: analytic::transmission_capacity(&td)?.value,
        outage_soma: analytic::outage(&so)?.value,
        outage_tdma: analytic::outage(&td)?.value,
        case1_holds: case1,
        case2_holds: case2,
        prop5_condition: prop5,
    })
}

/// Report for [`max_density_srp_soma`], with raw-density equivalents when
/// they exist.
pub fn report_max_density_soma(sol: &SomaDensities, r0: f64) -> DesignReport {
    let raw = |l: f64| invert_effective_density(l, r0).ok();
    DesignReport::new(
        "lambda_r_max_soma",
        sol.lambda_r,
        "nodes/m^2 (effective)",
        sol.residual,
    )
    .detail("lambda_d", sol.lambda_d)
    .detail("lambda_d_raw", raw(sol.lambda_d))
    .detail("lambda_r_active_raw", raw(sol.lambda_r))
}

pub fn report_max_density_tdma(lambda_r: f64, residual: f64, r0: f64) -> DesignReport {
    DesignReport::new(
        "lambda_r_max_tdma",
        lambda_r,
        "nodes/m^2 (effective)",
        residual,
    )
    .detail(
        "lambda_r_active_raw",
        invert_effective_density(lambda_r, r0).ok(),
    )
}

pub fn report_min_guard_radius(sol: &GuardRadius) -> DesignReport {
    let mut report = DesignReport::new("r0_min", sol.r0, "m", sol.residual).detail("srp", sol.srp);
    report.iterations = sol.iterations;
    report.bracket = Some(sol.bracket);
    report
}

pub fn report_optimal_comm_density(sol: &OptimalDensity) -> DesignReport {
    DesignReport::new("lambda_d_opt", sol.lambda_d, "nodes/m^2 (effective)", 0.0)
        .detail("lambda_d_raw", sol.lambda_d_raw)
        .detail("raw_reachable", sol.lambda_d_raw.is_some())
        .detail("c3_prime", sol.c3_prime)
}
