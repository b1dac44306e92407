//! Free-space link budgets for the radar echo, the data link and a single
//! interferer, plus the fading/RCS draws that feed them.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{AccessScheme, RadioParams, SPEED_OF_LIGHT};

/// One realization of the random channel quantities of a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    /// Rayleigh power coefficient, Exp(1).
    pub h: f64,
    /// Swerling-I radar cross-section, Exp(mean sigma_bar), m^2.
    pub sigma: f64,
}

/// Received radar echo power from a target of cross-section `sigma` at `r_target`.
pub fn radar_rx_power(params: &RadioParams, scheme: &AccessScheme, sigma: f64) -> f64 {
    scheme.radar_power_fraction()
        * params.p_tx
        * params.g_t
        * params.g_r
        * params.g_p
        * SPEED_OF_LIGHT.powi(2)
        * sigma
        / ((4.0 * PI).powi(3) * params.f_c.powi(2) * params.r_target.powf(2.0 * params.alpha))
}

/// Received data power at the served user for fading coefficient `h`.
pub fn data_rx_power(params: &RadioParams, scheme: &AccessScheme, h: f64) -> f64 {
    scheme.data_power_fraction()
        * params.p_tx
        * params.g_t
        * params.g_r
        * SPEED_OF_LIGHT.powi(2)
        * h
        / ((4.0 * PI).powi(2) * params.f_c.powi(2) * params.r_target.powf(params.alpha))
}

/// Power received from one interferer at distance `r` transmitting a
/// `power_fraction` share of its power: `power_fraction K1 h r^-alpha_i`.
pub fn interferer_power(params: &RadioParams, power_fraction: f64, r: f64, h: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("interferer_power", "r", r));
    }
    Ok(power_fraction * params.k1() * h * r.powf(-params.alpha_i))
}

/// Exponential variate with the given mean by inverse CDF, `-mean ln(1 - U)`.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    let u: f64 = rng.random();
    -mean * (-u).ln_1p()
}

pub fn sample_fading<R: Rng + ?Sized>(params: &RadioParams, rng: &mut R) -> FadingDraw {
    let h = sample_exponential(rng, 1.0);
    let sigma = sample_exponential(rng, params.sigma_bar);
    FadingDraw { h, sigma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SOMA_HALF: AccessScheme = AccessScheme::Soma { phi: 0.5 };
    const TDMA_HALF: AccessScheme = AccessScheme::Tdma { tau: 0.5 };

    #[test]
    fn radar_power_degenerate_and_tdma_equivalence() {
        let p = RadioParams::default();
        assert_eq!(
            radar_rx_power(&p, &AccessScheme::Soma { phi: 1.0 }, 1000.0),
            0.0
        );
        let soma0 = radar_rx_power(&p, &AccessScheme::Soma { phi: 0.0 }, 750.0);
        let tdma = radar_rx_power(&p, &TDMA_HALF, 750.0);
        assert_eq!(soma0, tdma);
    }

    #[test]
    fn radar_power_direct_evaluation() {
        // Spreadsheet-style: each factor evaluated separately.
        let p = RadioParams::default();
        let numerator = 0.5 * 0.1 * 10.0 * 10.0 * 10.0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT * 1000.0;
        let denominator = (4.0 * PI) * (4.0 * PI) * (4.0 * PI) * 35e9 * 35e9 * 50f64.powi(4);
        let want = numerator / denominator;
        let got = radar_rx_power(&p, &SOMA_HALF, 1000.0);
        assert!(((got - want) / want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn data_power_fractions() {
        let p = RadioParams::default();
        assert_eq!(
            data_rx_power(&p, &AccessScheme::Soma { phi: 0.0 }, 1.3),
            0.0
        );
        assert_eq!(data_rx_power(&p, &SOMA_HALF, 0.0), 0.0);
        assert_eq!(data_rx_power(&p, &TDMA_HALF, 0.0), 0.0);
        let ratio = data_rx_power(&p, &SOMA_HALF, 0.7) / data_rx_power(&p, &TDMA_HALF, 0.7);
        assert_eq!(ratio, 0.5);
    }

    #[test]
    fn distance_scaling() {
        let p = RadioParams::default();
        let far = RadioParams {
            r_target: 100.0,
            ..p
        };
        let radar_ratio =
            radar_rx_power(&far, &TDMA_HALF, 1.0) / radar_rx_power(&p, &TDMA_HALF, 1.0);
        assert!((radar_ratio - 2f64.powf(-4.0)).abs() < 1e-15);
        let data_ratio = data_rx_power(&far, &TDMA_HALF, 1.0) / data_rx_power(&p, &TDMA_HALF, 1.0);
        assert!((data_ratio - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kernels_are_linear_in_power() {
        let p = RadioParams::default();
        let loud = RadioParams {
            p_tx: 3.0 * p.p_tx,
            ..p
        };
        let r = radar_rx_power(&loud, &SOMA_HALF, 10.0) / radar_rx_power(&p, &SOMA_HALF, 10.0);
        let d = data_rx_power(&loud, &SOMA_HALF, 1.0) / data_rx_power(&p, &SOMA_HALF, 1.0);
        let i = interferer_power(&loud, 1.0, 12.0, 1.0).unwrap()
            / interferer_power(&p, 1.0, 12.0, 1.0).unwrap();
        for v in [r, d, i] {
            assert!((v - 3.0).abs() < 1e-14);
        }
        // Each kernel is linear in its own power fraction.
        let r1 = radar_rx_power(&p, &AccessScheme::Soma { phi: 0.2 }, 10.0);
        let r2 = radar_rx_power(&p, &AccessScheme::Soma { phi: 0.6 }, 10.0);
        assert!((r1 / r2 - 0.8 / 0.4).abs() < 1e-14);
    }

    #[test]
    fn interferer_kernel() {
        let p = RadioParams::default();
        assert_eq!(interferer_power(&p, 0.0, 5.0, 1.0).unwrap(), 0.0);
        let a = interferer_power(&p, 1.0, 7.0, 1.0).unwrap();
        let b = interferer_power(&p, 1.0, 14.0, 1.0).unwrap();
        assert!((b / a - 2f64.powf(-2.5)).abs() < 1e-15);
        let want = p.k1() * 5f64.powf(-2.5);
        let got = interferer_power(&p, 1.0, 5.0, 1.0).unwrap();
        assert!(((got - want) / want).abs() < 1e-15);
        assert!(interferer_power(&p, 1.0, 0.0, 1.0).is_err());
        assert!(interferer_power(&p, 1.0, -3.0, 1.0).is_err());
    }

    #[test]
    fn fading_moments_and_cdf() {
        let p = RadioParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut sum_h, mut sum_s, mut below) = (0.0, 0.0, 0usize);
        for _ in 0..n {
            let draw = sample_fading(&p, &mut rng);
            assert!(draw.h >= 0.0 && draw.sigma >= 0.0);
            sum_h += draw.h;
            sum_s += draw.sigma;
            if draw.h <= 1.0 {
                below += 1;
            }
        }
        let mean_h = sum_h / n as f64;
        let mean_s = sum_s / n as f64;
        assert!((0.995..=1.005).contains(&mean_h), "{mean_h}");
        assert!(
            ((mean_s - p.sigma_bar) / p.sigma_bar).abs() < 0.01,
            "{mean_s}"
        );
        let cdf = below as f64 / n as f64;
        assert!((cdf - (1.0 - (-1f64).exp())).abs() < 0.005, "{cdf}");
    }
}
