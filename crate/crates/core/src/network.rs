//! Scenario parameters and node-density bookkeeping.
//!
//! Raw densities (nodes/m^2) become active densities through the radar duty
//! cycle, and active densities become effective HPPP densities through the
//! hard-core guard-zone map `lambda_eff = (1 - exp(-lambda pi r0^2)) / (pi r0^2)`.
//! Everything here is in linear units; dB conversion happens at config parse.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

/// RF constants of the scenario, all linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transmit power, W.
    pub p_tx: f64,
    pub g_t: f64,
    pub g_r: f64,
    /// Receive gain toward interferers.
    pub g_ri: f64,
    /// Radar processing gain.
    pub g_p: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
    /// Desired-link path-loss exponent.
    pub alpha: f64,
    /// Interference path-loss exponent; must exceed 2.
    pub alpha_i: f64,
    /// Mean radar cross-section, m^2.
    pub sigma_bar: f64,
    /// Desired link distance R0, m.
    pub r_target: f64,
    /// UAV altitude, m. Carried as metadata only; the closed forms use
    /// `r_target` and planar interferer distances.
    pub h_uav: f64,
    /// Noise power, W. Only the simulator uses it.
    pub n0: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            p_tx: dbm_to_watts(20.0),
            g_t: db_to_linear(10.0),
            g_r: db_to_linear(10.0),
            g_ri: db_to_linear(-10.0),
            g_p: db_to_linear(10.0),
            f_c: 35e9,
            alpha: 2.0,
            alpha_i: 2.5,
            sigma_bar: db_to_linear(30.0),
            r_target: 50.0,
            h_uav: 30.0,
            n0: 0.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_tx", self.p_tx),
            ("g_t", self.g_t),
            ("g_r", self.g_r),
            ("g_ri", self.g_ri),
            ("g_p", self.g_p),
            ("f_c", self.f_c),
            ("alpha", self.alpha),
            ("sigma_bar", self.sigma_bar),
            ("r_target", self.r_target),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::config(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !(self.alpha_i > 2.0) || !self.alpha_i.is_finite() {
            return Err(Error::config(format!(
                "alpha_i must exceed 2 for the interference integral to converge, got {}",
                self.alpha_i
            )));
        }
        if !(self.n0 >= 0.0) || !self.n0.is_finite() {
            return Err(Error::config(format!(
                "n0 must be non-negative, got {}",
                self.n0
            )));
        }
        if !(self.h_uav >= 0.0) {
            return Err(Error::config(format!(
                "h_uav must be non-negative, got {}",
                self.h_uav
            )));
        }
        Ok(())
    }

    /// Effective aperture of the radar receiver, `g_r c^2 / (4 pi f_c^2)`.
    pub fn effective_aperture(&self) -> f64 {
        self.g_r * SPEED_OF_LIGHT.powi(2) / (4.0 * PI * self.f_c.powi(2))
    }

    /// Interference link constant `K1 = p_tx g_t g_rI c^2 / ((4 pi)^2 f_c^2)`.
    pub fn k1(&self) -> f64 {
        self.p_tx * self.g_t * self.g_ri * SPEED_OF_LIGHT.powi(2)
            / ((4.0 * PI).powi(2) * self.f_c.powi(2))
    }

    /// Shape parameter `2 / alpha_i` of the incomplete-beta terms.
    pub fn spatial_exponent(&self) -> f64 {
        2.0 / self.alpha_i
    }
}

/// Radar/communication resource sharing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessScheme {
    /// Spectrum overlay: a fraction `phi` of transmit power goes to data,
    /// `1 - phi` to radar.
    Soma { phi: f64 },
    /// Time division: a fraction `tau` of time goes to data.
    Tdma { tau: f64 },
}

impl AccessScheme {
    pub fn validate(&self) -> Result<()> {
        let (name, value) = match *self {
            AccessScheme::Soma { phi } => ("phi", phi),
            AccessScheme::Tdma { tau } => ("tau", tau),
        };
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::config(format!(
                "{name} must lie in [0, 1], got {value}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            AccessScheme::Soma { .. } => SchemeKind::Soma,
            AccessScheme::Tdma { .. } => SchemeKind::Tdma,
        }
    }

    /// Share of transmit power carried by the radar waveform.
    pub fn radar_power_fraction(&self) -> f64 {
        match *self {
            AccessScheme::Soma { phi } => 1.0 - phi,
            AccessScheme::Tdma { .. } => 1.0,
        }
    }

    /// Share of transmit power carried by the data waveform.
    pub fn data_power_fraction(&self) -> f64 {
        match *self {
            AccessScheme::Soma { phi } => phi,
            AccessScheme::Tdma { .. } => 1.0,
        }
    }

    /// Fraction of time spent on data; scales transmission capacity.
    pub fn data_time_fraction(&self) -> f64 {
        match *self {
            AccessScheme::Soma { .. } => 1.0,
            AccessScheme::Tdma { tau } => tau,
        }
    }

    /// Multiplier mapping the duty cycle to the active radar fraction:
    /// `1` for SOMA, `1 / (1 - tau)` for TDMA.
    pub fn radar_activity_multiplier(&self) -> f64 {
        match *self {
            AccessScheme::Soma { .. } => 1.0,
            AccessScheme::Tdma { tau } => 1.0 / (1.0 - tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Soma,
    Tdma,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Soma => "soma",
            SchemeKind::Tdma => "tdma",
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw node densities, duty cycle and guard radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    /// UAV-comm density, nodes/m^2.
    pub lambda_d_raw: f64,
    /// UAV-radar density (active and inactive), nodes/m^2.
    pub lambda_r_raw: f64,
    /// Radar duty cycle in (0, 1].
    pub delta: f64,
    /// Guard-zone radius, m.
    pub r0: f64,
}

impl DensityConfig {
    pub fn validate(&self, scheme: &AccessScheme) -> Result<()> {
        for (name, value) in [
            ("lambda_d_raw", self.lambda_d_raw),
            ("lambda_r_raw", self.lambda_r_raw),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::config(format!(
                    "{name} must be non-negative, got {value}"
                )));
            }
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::config(format!(
                "duty cycle must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if !(self.r0 > 0.0) || !self.r0.is_finite() {
            return Err(Error::config(format!(
                "r0 must be positive, got {}",
                self.r0
            )));
        }
        scheme.validate()?;
        let active = self.delta * scheme.radar_activity_multiplier();
        // Rounding slack so that e.g. delta = 0.1, tau = 0.9 is accepted.
        if !(active <= 1.0 + 1e-12) {
            return Err(Error::config(format!(
                "active radar fraction delta/(1 - tau) = {active} exceeds 1"
            )));
        }
        Ok(())
    }

    /// Active (transmitting) radar density before guard-zone thinning.
    pub fn active_radar_density(&self, scheme: &AccessScheme) -> f64 {
        (self.delta * scheme.radar_activity_multiplier()).min(1.0) * self.lambda_r_raw
    }
}

/// Effective HPPP densities seen by a typical receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDensities {
    /// UAV-comm density after thinning (scheme independent).
    pub lambda_d: f64,
    /// Active UAV-radar density after thinning.
    pub lambda_r: f64,
    /// Active UAV-radar density before thinning.
    pub lambda_r_active_raw: f64,
}

impl EffectiveDensities {
    pub const ZERO: EffectiveDensities = EffectiveDensities {
        lambda_d: 0.0,
        lambda_r: 0.0,
        lambda_r_active_raw: 0.0,
    };
}

/// Retained density of a hard-core (Matérn type-II) process with parent
/// density `lambda` and exclusion radius `r0`.
pub fn hard_core_density(lambda: f64, r0: f64) -> f64 {
    let area = PI * r0 * r0;
    // -expm1 keeps lambda_eff / lambda accurate as lambda -> 0.
    -(-lambda * area).exp_m1() / area
}

/// Effective comm and radar densities for a scheme.
pub fn effective_densities(
    dens: &DensityConfig,
    scheme: &AccessScheme,
) -> Result<EffectiveDensities> {
    dens.validate(scheme)?;
    let active = dens.active_radar_density(scheme);
    Ok(EffectiveDensities {
        lambda_d: hard_core_density(dens.lambda_d_raw, dens.r0),
        lambda_r: hard_core_density(active, dens.r0),
        lambda_r_active_raw: active,
    })
}

/// Inverse of [`hard_core_density`]: the parent density that thins to
/// `lambda_eff` under guard radius `r0`.
pub fn invert_effective_density(lambda_eff: f64, r0: f64) -> Result<f64> {
    if !(lambda_eff >= 0.0) {
        return Err(Error::domain(
            "invert_effective_density",
            "lambda_eff",
            lambda_eff,
        ));
    }
    if !(r0 > 0.0) {
        return Err(Error::domain("invert_effective_density", "r0", r0));
    }
    let area = PI * r0 * r0;
    let packed = lambda_eff * area;
    if packed >= 1.0 {
        return Err(Error::OutOfRange { lambda_eff, r0 });
    }
    Ok(-(-packed).ln_1p() / area)
}
