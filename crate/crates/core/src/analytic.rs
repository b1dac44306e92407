//! Closed-form interference Laplace transforms, successful ranging
//! probability (SRP), outage probability and transmission capacity (TC).
//!
//! Every interferer class contributes
//! `2 pi lambda A(s) s^(2/alpha_i) / alpha_i` to the Laplace exponent, where
//! `s = z * fraction * K1` and `A(s)` is the guard-zone-truncated integral
//!
//! ```text
//! A(s) = B(2/a, 1 - 2/a) - B(1 / (1 + s r0^-a); 2/a, 1 - 2/a)
//! ```
//!
//! The closed forms hold in the interference-limited regime; noise power is
//! ignored here even when configured.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::network::{
    effective_densities, AccessScheme, DensityConfig, EffectiveDensities, RadioParams,
    SPEED_OF_LIGHT,
};
use crate::special::{beta, incomplete_beta, incomplete_beta_upper};

/// Everything needed to evaluate one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricInputs {
    pub params: RadioParams,
    pub scheme: AccessScheme,
    pub eff: EffectiveDensities,
    /// Guard radius, m.
    pub r0: f64,
    /// Linear SINR threshold for ranging.
    pub gamma_th: f64,
    /// Linear SINR threshold for data outage.
    pub beta_th: f64,
}

impl MetricInputs {
    /// Builds inputs from raw densities, deriving the effective densities.
    pub fn from_raw(
        params: RadioParams,
        scheme: AccessScheme,
        dens: &DensityConfig,
        gamma_th: f64,
        beta_th: f64,
    ) -> Result<Self> {
        let eff = effective_densities(dens, &scheme)?;
        let inputs = Self {
            params,
            scheme,
            eff,
            r0: dens.r0,
            gamma_th,
            beta_th,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.scheme.validate()?;
        if !(self.r0 > 0.0) || !self.r0.is_finite() {
            return Err(Error::config(format!(
                "r0 must be positive, got {}",
                self.r0
            )));
        }
        if !(self.gamma_th > 0.0) || !(self.beta_th > 0.0) {
            return Err(Error::config(format!(
                "SINR thresholds must be positive (gamma_th = {}, beta_th = {})",
                self.gamma_th, self.beta_th
            )));
        }
        if !(self.eff.lambda_d >= 0.0) || !(self.eff.lambda_r >= 0.0) {
            return Err(Error::config("effective densities must be non-negative"));
        }
        Ok(())
    }

    /// True when a nonzero noise power is configured; the closed forms drop it.
    pub fn noise_ignored(&self) -> bool {
        self.params.n0 > 0.0
    }
}

/// Which typical receiver's interference field to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Receiver {
    /// The typical UAV-radar listening for its echo.
    Radar,
    /// The typical ground user receiving data.
    Data,
}

/// A homogeneous class of interferers: effective density and the share of
/// transmit power each member radiates into the receiver's band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererClass {
    pub density: f64,
    pub power_fraction: f64,
}

/// Interferer classes seen by `receiver`.
///
/// Under SOMA both receivers see the same field: comms at `phi` and active
/// radars at `1 - phi`. Under TDMA the radar sees only radars and the user
/// sees only comms, each at full power.
pub fn interferer_classes(inputs: &MetricInputs, receiver: Receiver) -> Vec<InterfererClass> {
    match (inputs.scheme, receiver) {
        (AccessScheme::Soma { phi }, _) => vec![
            InterfererClass {
                density: inputs.eff.lambda_d,
                power_fraction: phi,
            },
            InterfererClass {
                density: inputs.eff.lambda_r,
                power_fraction: 1.0 - phi,
            },
        ],
        (AccessScheme::Tdma { .. }, Receiver::Radar) => vec![InterfererClass {
            density: inputs.eff.lambda_r,
            power_fraction: 1.0,
        }],
        (AccessScheme::Tdma { .. }, Receiver::Data) => vec![InterfererClass {
            density: inputs.eff.lambda_d,
            power_fraction: 1.0,
        }],
    }
}

/// A metric value plus a flag raised when a power split of 0 or 1 removed the
/// desired signal entirely and the mathematical limit was returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub degenerate_split: bool,
}

impl Evaluated {
    fn regular(value: f64) -> Self {
        Self {
            value,
            degenerate_split: false,
        }
    }

    fn degenerate(value: f64) -> Self {
        Self {
            value,
            degenerate_split: true,
        }
    }
}

/// Guard-zone integral `A(s)` for `s = z * fraction * K1`.
///
/// Computed as the upper incomplete-beta tail with `1 - 1/(1+T) = T/(1+T)`,
/// `T = s r0^-alpha_i`, which avoids cancellation when `T` is small.
pub fn guard_integral(s: f64, r0: f64, alpha_i: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain("guard_integral", "s", s));
    }
    let a = 2.0 / alpha_i;
    let b = 1.0 - a;
    let t = s * r0.powf(-alpha_i);
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return beta(a, b);
    }
    incomplete_beta_upper(t / (1.0 + t), a, b)
}

/// The same integral by the literal difference of complete and incomplete
/// beta functions. Kept as an independent evaluation route for tests.
pub fn guard_integral_by_difference(s: f64, r0: f64, alpha_i: f64) -> Result<f64> {
    let a = 2.0 / alpha_i;
    let b = 1.0 - a;
    let y = 1.0 / (1.0 + s * r0.powf(-alpha_i));
    Ok(beta(a, b)? - incomplete_beta(y, a, b)?)
}

/// `A(z)` for an interferer class transmitting `fraction` of its power.
pub fn a_term(z: f64, fraction: f64, params: &RadioParams, r0: f64) -> Result<f64> {
    guard_integral(z * fraction * params.k1(), r0, params.alpha_i)
}

fn class_exponent(z: f64, class: &InterfererClass, params: &RadioParams, r0: f64) -> Result<f64> {
    if class.density == 0.0 || class.power_fraction == 0.0 || z == 0.0 {
        return Ok(0.0);
    }
    let s = z * class.power_fraction * params.k1();
    let delta = params.spatial_exponent();
    Ok(
        2.0 * PI * class.density * guard_integral(s, r0, params.alpha_i)? * s.powf(delta)
            / params.alpha_i,
    )
}

/// `-ln L_I(z)`, the exponent of the interference Laplace transform.
pub fn laplace_exponent(z: f64, inputs: &MetricInputs, receiver: Receiver) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain("laplace_interference", "z", z));
    }
    interferer_classes(inputs, receiver)
        .iter()
        .map(|class| class_exponent(z, class, &inputs.params, inputs.r0))
        .sum()
}

/// Laplace transform `E[exp(-z I)]` of the aggregate interference at `receiver`.
pub fn laplace_interference(z: f64, inputs: &MetricInputs, receiver: Receiver) -> Result<f64> {
    Ok((-laplace_exponent(z, inputs, receiver)?).exp())
}

/// Laplace argument at which the SRP is evaluated,
/// `(4 pi)^3 f_c^2 R0^(2 alpha) gamma_th / (fraction p_tx g_t g_r g_p c^2 sigma_bar)`.
/// `None` when the radar power fraction is zero.
pub fn srp_laplace_argument(inputs: &MetricInputs) -> Option<f64> {
    let p = &inputs.params;
    let fraction = inputs.scheme.radar_power_fraction();
    if fraction <= 0.0 {
        return None;
    }
    Some(
        (4.0 * PI).powi(3) * p.f_c.powi(2) * p.r_target.powf(2.0 * p.alpha) * inputs.gamma_th
            / (fraction * p.p_tx * p.g_t * p.g_r * p.g_p * SPEED_OF_LIGHT.powi(2) * p.sigma_bar),
    )
}

/// Laplace argument for the outage probability,
/// `(4 pi)^2 f_c^2 R0^alpha beta_th / (fraction p_tx g_t g_r c^2)`.
pub fn outage_laplace_argument(inputs: &MetricInputs) -> Option<f64> {
    let p = &inputs.params;
    let fraction = inputs.scheme.data_power_fraction();
    if fraction <= 0.0 {
        return None;
    }
    Some(
        (4.0 * PI).powi(2) * p.f_c.powi(2) * p.r_target.powf(p.alpha) * inputs.beta_th
            / (fraction * p.p_tx * p.g_t * p.g_r * SPEED_OF_LIGHT.powi(2)),
    )
}

/// Successful ranging probability `Pr(P_r / I_r > gamma_th)`.
pub fn srp(inputs: &MetricInputs) -> Result<Evaluated> {
    match srp_laplace_argument(inputs) {
        None => Ok(Evaluated::degenerate(0.0)),
        Some(z) => Ok(Evaluated::regular(laplace_interference(
            z,
            inputs,
            Receiver::Radar,
        )?)),
    }
}

/// Outage probability `Pr(P_d / I_d < beta_th)`.
pub fn outage(inputs: &MetricInputs) -> Result<Evaluated> {
    match outage_laplace_argument(inputs) {
        None => Ok(Evaluated::degenerate(1.0)),
        Some(z) => {
            let exponent = laplace_exponent(z, inputs, Receiver::Data)?;
            Ok(Evaluated::regular(-(-exponent).exp_m1()))
        }
    }
}

/// Transmission capacity in nats/(s Hz m^2):
/// `duration * lambda_d * ln(1 + beta_th) * (1 - outage)`, with duration 1
/// for SOMA and `tau` for TDMA.
pub fn transmission_capacity(inputs: &MetricInputs) -> Result<Evaluated> {
    let rate = inputs.scheme.data_time_fraction() * inputs.eff.lambda_d * inputs.beta_th.ln_1p();
    // Success taken as exp(-E) directly; 1 - outage cancels when E is large.
    match outage_laplace_argument(inputs) {
        None => Ok(Evaluated::degenerate(0.0)),
        Some(z) => {
            let exponent = laplace_exponent(z, inputs, Receiver::Data)?;
            Ok(Evaluated::regular(rate * (-exponent).exp()))
        }
    }
}

/// SRP threshold group `4 pi g_rI R0^(2 alpha) gamma_th / (g_r g_p sigma_bar)`.
pub fn srp_threshold_scale(params: &RadioParams, gamma_th: f64) -> f64 {
    4.0 * PI * params.g_ri * params.r_target.powf(2.0 * params.alpha) * gamma_th
        / (params.g_r * params.g_p * params.sigma_bar)
}

/// Outage threshold group `g_rI R0^alpha beta_th / g_r`.
pub fn outage_threshold_scale(params: &RadioParams, beta_th: f64) -> f64 {
    params.g_ri * params.r_target.powf(params.alpha) * beta_th / params.g_r
}

/// Density-independent factors of the SRP exponent.
///
/// `-ln SRP = 2 pi (w lambda_d c1 + lambda_r c2) scale` where for SOMA
/// `w = (phi / (1 - phi))^(2/alpha_i)` and for TDMA `w = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrpCoefficients {
    pub comm_weight: f64,
    pub c1: f64,
    pub c2: f64,
    /// `Y^(2/alpha_i) / alpha_i` with `Y` from [`srp_threshold_scale`].
    pub scale: f64,
}

impl SrpCoefficients {
    pub fn exponent(&self, lambda_d: f64, lambda_r: f64) -> f64 {
        let comm = if self.comm_weight == 0.0 {
            0.0
        } else {
            self.comm_weight * lambda_d * self.c1
        };
        2.0 * PI * (comm + lambda_r * self.c2) * self.scale
    }
}

/// Closed-form SRP coefficients. Fails for SOMA with `phi = 1`, where the SRP
/// is identically zero.
pub fn srp_coefficients(
    params: &RadioParams,
    scheme: &AccessScheme,
    gamma_th: f64,
    r0: f64,
) -> Result<SrpCoefficients> {
    let y = srp_threshold_scale(params, gamma_th);
    let delta = params.spatial_exponent();
    let c2 = guard_integral(y, r0, params.alpha_i)?;
    let (comm_weight, c1) = match *scheme {
        AccessScheme::Soma { phi } => {
            if phi >= 1.0 {
                return Err(Error::Infeasible(
                    "SOMA with phi = 1 leaves no radar power; SRP is identically zero".into(),
                ));
            }
            let ratio = phi / (1.0 - phi);
            (
                ratio.powf(delta),
                guard_integral(ratio * y, r0, params.alpha_i)?,
            )
        }
        AccessScheme::Tdma { .. } => (0.0, 0.0),
    };
    Ok(SrpCoefficients {
        comm_weight,
        c1,
        c2,
        scale: y.powf(delta) / params.alpha_i,
    })
}

/// SRP written directly in its expanded closed form with the `C1`, `C2`
/// terms. Must agree with [`srp`].
pub fn srp_closed_form(inputs: &MetricInputs) -> Result<f64> {
    match srp_coefficients(&inputs.params, &inputs.scheme, inputs.gamma_th, inputs.r0) {
        Ok(coef) => Ok((-coef.exponent(inputs.eff.lambda_d, inputs.eff.lambda_r)).exp()),
        Err(Error::Infeasible(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// `C3' = C3 X^(2/alpha_i) / alpha_i`, the per-density outage exponent of
/// full-power comm interferers.
pub fn c3_prime(params: &RadioParams, beta_th: f64, r0: f64) -> Result<f64> {
    let x = outage_threshold_scale(params, beta_th);
    Ok(guard_integral(x, r0, params.alpha_i)? * x.powf(params.spatial_exponent()) / params.alpha_i)
}

/// TC in its expanded closed form with the `C3`, `C4` terms. Must agree with
/// [`transmission_capacity`].
pub fn transmission_capacity_closed_form(inputs: &MetricInputs) -> Result<f64> {
    let p = &inputs.params;
    let x = outage_threshold_scale(p, inputs.beta_th);
    let delta = p.spatial_exponent();
    let c3 = guard_integral(x, inputs.r0, p.alpha_i)?;
    let rate = inputs.eff.lambda_d * inputs.beta_th.ln_1p();
    let scale = x.powf(delta) / p.alpha_i;
    match inputs.scheme {
        AccessScheme::Soma { phi } => {
            if phi <= 0.0 {
                return Ok(0.0);
            }
            let ratio = (1.0 - phi) / phi;
            let radar = if inputs.eff.lambda_r == 0.0 || ratio == 0.0 {
                0.0
            } else {
                ratio.powf(delta)
                    * inputs.eff.lambda_r
                    * guard_integral(ratio * x, inputs.r0, p.alpha_i)?
            };
            Ok(rate * (-2.0 * PI * (inputs.eff.lambda_d * c3 + radar) * scale).exp())
        }
        AccessScheme::Tdma { tau } => {
            Ok(tau * rate * (-2.0 * PI * inputs.eff.lambda_d * c3 * scale).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::db_to_linear;

    fn inputs(scheme: AccessScheme, lambda_d_raw: f64, lambda_r_raw: f64, r0: f64) -> MetricInputs {
        let dens = DensityConfig {
            lambda_d_raw,
            lambda_r_raw,
            delta: 0.1,
            r0,
        };
        MetricInputs::from_raw(
            RadioParams::default(),
            scheme,
            &dens,
            db_to_linear(-10.0),
            db_to_linear(-5.0),
        )
        .unwrap()
    }

    #[test]
    fn a_term_limits() {
        let p = RadioParams::default();
        assert_eq!(a_term(0.0, 0.5, &p, 5.0).unwrap(), 0.0);
        assert_eq!(a_term(3.0, 0.0, &p, 5.0).unwrap(), 0.0);
        // z * fraction * K1 * r0^-alpha_i = 1e12
        let z = 1e12 * 5f64.powf(2.5) / p.k1();
        let big = a_term(z, 1.0, &p, 5.0).unwrap();
        let full = beta(0.8, 0.2).unwrap();
        assert!(((big - full) / full).abs() < 1e-3);
        assert!(big <= full);
    }

    #[test]
    fn guard_integral_routes_agree() {
        for &s in &[0.01, 0.7, 12.0, 400.0, 1e5] {
            for &r0 in &[2.0, 5.0, 25.0] {
                let a = guard_integral(s, r0, 2.5).unwrap();
                let b = guard_integral_by_difference(s, r0, 2.5).unwrap();
                // The difference route cancels against B(a, b).
                let scale = beta(0.8, 0.2).unwrap();
                assert!((a - b).abs() < 1e-10 * scale, "s={s} r0={r0}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn guard_integral_small_argument_series() {
        // For small eps = T/(1+T): eps^b/b - (a-1) eps^(b+1)/(b+1) + O(eps^(b+2)).
        let (a, b) = (0.8, 0.2);
        for &s in &[1e-9, 1e-6, 1e-4] {
            let t = s * 25f64.powf(-2.5);
            let eps = t / (1.0 + t);
            let want = eps.powf(b) / b - (a - 1.0) * eps.powf(b + 1.0) / (b + 1.0);
            let got = guard_integral(s, 25.0, 2.5).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "s={s}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn laplace_at_zero_and_without_interferers() {
        let inp = inputs(AccessScheme::Soma { phi: 0.5 }, 0.01, 0.1, 5.0);
        assert_eq!(
            laplace_interference(0.0, &inp, Receiver::Radar).unwrap(),
            1.0
        );
        let empty = MetricInputs {
            eff: EffectiveDensities::ZERO,
            ..inp
        };
        for z in [1e3, 1e9, 1e15] {
            assert_eq!(
                laplace_interference(z, &empty, Receiver::Data).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn srp_examples() {
        let zero = inputs(AccessScheme::Tdma { tau: 0.5 }, 0.0, 0.0, 5.0);
        assert_eq!(srp(&zero).unwrap().value, 1.0);
        let far = inputs(AccessScheme::Soma { phi: 0.5 }, 0.01, 0.1, 1e6);
        assert!(srp(&far).unwrap().value >= 0.999);

        let so = srp(&inputs(AccessScheme::Soma { phi: 0.5 }, 0.01, 0.1, 5.0)).unwrap();
        let td = srp(&inputs(AccessScheme::Tdma { tau: 0.5 }, 0.01, 0.1, 5.0)).unwrap();
        assert!(so.value < td.value, "{} !< {}", so.value, td.value);
    }

    #[test]
    fn degenerate_splits_are_flagged() {
        let no_radar = inputs(AccessScheme::Soma { phi: 1.0 }, 0.01, 0.1, 5.0);
        let s = srp(&no_radar).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.degenerate_split);
        let no_data = inputs(AccessScheme::Soma { phi: 0.0 }, 0.01, 0.1, 5.0);
        let o = outage(&no_data).unwrap();
        assert_eq!(o.value, 1.0);
        assert!(o.degenerate_split);
        assert_eq!(transmission_capacity(&no_data).unwrap().value, 0.0);
        assert_eq!(transmission_capacity_closed_form(&no_data).unwrap(), 0.0);
        assert_eq!(srp_closed_form(&no_radar).unwrap(), 0.0);
    }

    #[test]
    fn outage_examples() {
        let zero = inputs(AccessScheme::Soma { phi: 0.5 }, 0.0, 0.0, 5.0);
        assert_eq!(outage(&zero).unwrap().value, 0.0);
        let mut tiny = inputs(AccessScheme::Soma { phi: 0.5 }, 0.01, 0.1, 5.0);
        tiny.beta_th = 1e-12;
        assert!(outage(&tiny).unwrap().value < 1e-6);
    }

    #[test]
    fn tc_examples() {
        let none = inputs(AccessScheme::Soma { phi: 0.5 }, 0.0, 0.1, 5.0);
        assert_eq!(transmission_capacity(&none).unwrap().value, 0.0);
        let idle = inputs(AccessScheme::Tdma { tau: 0.0 }, 0.01, 0.1, 5.0);
        assert_eq!(transmission_capacity(&idle).unwrap().value, 0.0);
    }

    #[test]
    fn closed_forms_match_factored_forms() {
        for scheme in [
            AccessScheme::Soma { phi: 0.3 },
            AccessScheme::Soma { phi: 0.5 },
            AccessScheme::Soma { phi: 0.85 },
            AccessScheme::Tdma { tau: 0.4 },
        ] {
            for r0 in [2.0, 5.0, 25.0] {
                let inp = inputs(scheme, 0.01, 0.1, r0);
                let a = srp(&inp).unwrap().value;
                let b = srp_closed_form(&inp).unwrap();
                assert!(
                    ((a - b) / a).abs() < 1e-12,
                    "{scheme:?} r0={r0}: {a} vs {b}"
                );
                let c = transmission_capacity(&inp).unwrap().value;
                let d = transmission_capacity_closed_form(&inp).unwrap();
                assert!(
                    ((c - d) / c).abs() < 1e-12,
                    "{scheme:?} r0={r0}: {c} vs {d}"
                );
            }
        }
    }
}
