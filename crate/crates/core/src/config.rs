//! JSON scenario files. Keys carry their units (`_dbm`, `_dbi`, `_dbsm`,
//! `_db`, `_hz`, `_m`, `_w`); everything is converted to linear units once,
//! here. Missing keys take the defaults of the reference parameter table.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{
    db_to_linear, dbm_to_watts, AccessScheme, DensityConfig, RadioParams, SchemeKind,
};

/// Scenario file as written by users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    pub p_tx_dbm: f64,
    pub g_t_dbi: f64,
    pub g_r_dbi: f64,
    pub g_ri_dbi: f64,
    pub g_p_dbi: f64,
    pub f_c_hz: f64,
    pub alpha: f64,
    pub alpha_i: f64,
    pub sigma_bar_dbsm: f64,
    pub r_target_m: f64,
    pub h_uav_m: f64,
    pub n0_w: f64,
    pub duty_cycle: f64,
    pub lambda_d_raw: f64,
    pub lambda_r_raw: f64,
    pub r0_m: f64,
    /// Primary scheme. Its parameter also fixes `phi` or `tau` below.
    pub scheme: AccessScheme,
    /// Power split used whenever SOMA is evaluated.
    pub phi: Option<f64>,
    /// Time split used whenever TDMA is evaluated.
    pub tau: Option<f64>,
    pub gamma_th_db: f64,
    pub beta_th_db: f64,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        Self {
            p_tx_dbm: 20.0,
            g_t_dbi: 10.0,
            g_r_dbi: 10.0,
            g_ri_dbi: -10.0,
            g_p_dbi: 10.0,
            f_c_hz: 35e9,
            alpha: 2.0,
            alpha_i: 2.5,
            sigma_bar_dbsm: 30.0,
            r_target_m: 50.0,
            h_uav_m: 30.0,
            n0_w: 0.0,
            duty_cycle: 0.1,
            lambda_d_raw: 0.01,
            lambda_r_raw: 0.1,
            r0_m: 5.0,
            scheme: AccessScheme::Soma { phi: 0.5 },
            phi: None,
            tau: None,
            gamma_th_db: -10.0,
            beta_th_db: 0.0,
        }
    }
}

impl ScenarioFile {
    /// Parses a scenario document; syntax and unknown-key errors carry the
    /// line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let pick = |name: &str, explicit: Option<f64>, from_scheme: Option<f64>| -> Result<f64> {
            match (explicit, from_scheme) {
                (Some(a), Some(b)) if a != b => Err(Error::config(format!(
                    "{name} = {a} contradicts the scheme object ({name} = {b})"
                ))),
                (Some(a), _) | (None, Some(a)) => Ok(a),
                (None, None) => Ok(0.5),
            }
        };
        let (scheme_phi, scheme_tau) = match self.scheme {
            AccessScheme::Soma { phi } => (Some(phi), None),
            AccessScheme::Tdma { tau } => (None, Some(tau)),
        };
        let scenario = Scenario {
            params: RadioParams {
                p_tx: dbm_to_watts(self.p_tx_dbm),
                g_t: db_to_linear(self.g_t_dbi),
                g_r: db_to_linear(self.g_r_dbi),
                g_ri: db_to_linear(self.g_ri_dbi),
                g_p: db_to_linear(self.g_p_dbi),
                f_c: self.f_c_hz,
                alpha: self.alpha,
                alpha_i: self.alpha_i,
                sigma_bar: db_to_linear(self.sigma_bar_dbsm),
                r_target: self.r_target_m,
                h_uav: self.h_uav_m,
                n0: self.n0_w,
            },
            dens: DensityConfig {
                lambda_d_raw: self.lambda_d_raw,
                lambda_r_raw: self.lambda_r_raw,
                delta: self.duty_cycle,
                r0: self.r0_m,
            },
            phi: pick("phi", self.phi, scheme_phi)?,
            tau: pick("tau", self.tau, scheme_tau)?,
            primary: self.scheme.kind(),
            gamma_th: db_to_linear(self.gamma_th_db),
            beta_th: db_to_linear(self.beta_th_db),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// A resolved scenario in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub params: RadioParams,
    pub dens: DensityConfig,
    pub phi: f64,
    pub tau: f64,
    pub primary: SchemeKind,
    pub gamma_th: f64,
    pub beta_th: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        ScenarioFile::default()
            .resolve()
            .expect("default scenario is valid")
    }
}

impl Scenario {
    pub fn scheme(&self, kind: SchemeKind) -> AccessScheme {
        match kind {
            SchemeKind::Soma => AccessScheme::Soma { phi: self.phi },
            SchemeKind::Tdma => AccessScheme::Tdma { tau: self.tau },
        }
    }

    /// Checks everything except the TDMA duty constraint, which only applies
    /// when TDMA is actually evaluated.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.dens.validate(&self.scheme(SchemeKind::Soma))?;
        self.scheme(SchemeKind::Tdma).validate()?;
        if !(self.gamma_th > 0.0) || !(self.beta_th > 0.0) {
            return Err(Error::config("SINR thresholds must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let s = ScenarioFile::parse("{}").unwrap().resolve().unwrap();
        assert_eq!(s.params, RadioParams::default());
        assert_eq!(s.dens.r0, 5.0);
        assert_eq!((s.phi, s.tau), (0.5, 0.5));
        assert_eq!(s.primary, SchemeKind::Soma);
        assert!((s.gamma_th - 0.1).abs() < 1e-15);
        assert_eq!(s.beta_th, 1.0);
    }

    #[test]
    fn unit_conversion() {
        let s = ScenarioFile::parse(r#"{"p_tx_dbm": 30, "sigma_bar_dbsm": 10, "g_ri_dbi": 0}"#)
            .unwrap()
            .resolve()
            .unwrap();
        assert!((s.params.p_tx - 1.0).abs() < 1e-15);
        assert!((s.params.sigma_bar - 10.0).abs() < 1e-12);
        assert_eq!(s.params.g_ri, 1.0);
    }

    #[test]
    fn scheme_object_sets_its_parameter() {
        let s = ScenarioFile::parse(r#"{"scheme": {"tdma": {"tau": 0.3}}, "phi": 0.7}"#)
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!((s.phi, s.tau), (0.7, 0.3));
        assert_eq!(s.primary, SchemeKind::Tdma);
        let clash =
            ScenarioFile::parse(r#"{"scheme": {"soma": {"phi": 0.2}}, "phi": 0.4}"#).unwrap();
        assert!(matches!(clash.resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn errors_point_at_the_offending_line() {
        let text = "{\n  \"alpha\": 2.0,\n  \"alpah_i\": 3.0\n}";
        let Err(Error::Config(msg)) = ScenarioFile::parse(text) else {
            panic!("expected config error");
        };
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("alpah_i"), "{msg}");

        let Err(Error::Config(msg)) = ScenarioFile::parse("{\n\"alpha\": ,\n}") else {
            panic!("expected config error");
        };
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            r#"{"alpha_i": 2.0}"#,
            r#"{"duty_cycle": 0}"#,
            r#"{"r0_m": -1}"#,
            r#"{"scheme": {"soma": {"phi": 1.5}}}"#,
            r#"{"lambda_d_raw": -0.1}"#,
        ] {
            let file = ScenarioFile::parse(text).unwrap();
            assert!(matches!(file.resolve(), Err(Error::Config(_))), "{text}");
        }
    }
}
