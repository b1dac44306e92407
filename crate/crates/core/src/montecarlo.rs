//! Seeded Monte Carlo estimation of SRP, outage, TC and interference
//! functionals by sampling interferer point processes, Rayleigh fading and
//! Swerling-I cross-sections.
//!
//! Every trial draws from its own ChaCha8 stream selected by the trial index,
//! so estimates are bit-identical for a given seed regardless of how many
//! worker threads run them. Trials are processed in fixed-size chunks and the
//! chunk results are merged in chunk order.
//!
//! Interferers inside the guard annulus `(r0, r_split]` are sampled point by
//! point. With [`FarField::MomentMatched`] the aggregate from `(r_split, r_max]`
//! is drawn from a gamma law matching its exact mean and variance; the split
//! radius is chosen so that about `explicit_points` interferers are sampled
//! individually per trial.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{interferer_classes, InterfererClass, MetricInputs, Receiver};
use crate::error::{Error, Result};
use crate::network::{hard_core_density, invert_effective_density, RadioParams};
use crate::propagation::{data_rx_power, radar_rx_power, sample_exponential};

const CHUNK_TRIALS: u64 = 1024;

/// Ratio of neglected to retained mean interference above which a truncation
/// radius is reported as biased.
pub const TRUNCATION_BIAS_LIMIT: f64 = 0.01;

/// How interferers far from the receiver are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FarField {
    /// Every interferer in `(r0, r_max]` is drawn individually.
    Explicit,
    /// About `explicit_points` interferers are drawn individually; the rest of
    /// the annulus up to `r_max` is a moment-matched gamma aggregate.
    MomentMatched { explicit_points: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    /// Truncation radius of the interferer field, m. May be infinite with
    /// [`FarField::MomentMatched`].
    pub r_max: f64,
    pub seed: u64,
    /// Sample true Matérn type-II processes instead of HPPPs at the
    /// effective densities.
    pub use_mhcpp: bool,
    /// Add the configured noise power `n0` to the interference.
    pub include_noise: bool,
    pub far_field: FarField,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            r_max: 5000.0,
            seed: 0x5EED,
            use_mhcpp: false,
            include_noise: false,
            far_field: FarField::MomentMatched {
                explicit_points: 1024.0,
            },
        }
    }
}

impl SimConfig {
    pub fn validate(&self, r0: f64) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if !(self.r_max > r0) {
            return Err(Error::config(format!(
                "r_max = {} must exceed the guard radius {r0}",
                self.r_max
            )));
        }
        let needs_finite = self.use_mhcpp || matches!(self.far_field, FarField::Explicit);
        if needs_finite && !self.r_max.is_finite() {
            return Err(Error::config(
                "an infinite r_max requires the moment-matched far field without MHCPP sampling",
            ));
        }
        if let FarField::MomentMatched { explicit_points } = self.far_field {
            if !(explicit_points >= 1.0) {
                return Err(Error::config(format!(
                    "explicit_points must be at least 1, got {explicit_points}"
                )));
            }
        }
        Ok(())
    }

    /// Truncation bias ratio for this configuration; logs a warning when it
    /// exceeds [`TRUNCATION_BIAS_LIMIT`].
    pub fn check_truncation(&self, params: &RadioParams, r0: f64) -> f64 {
        let ratio = truncation_bias_ratio(r0, self.r_max, params.alpha_i);
        if ratio > TRUNCATION_BIAS_LIMIT {
            log::warn!(
                "r_max = {} m neglects {:.2}% of the mean interference beyond the truncation radius (limit {:.0}%)",
                self.r_max,
                100.0 * ratio,
                100.0 * TRUNCATION_BIAS_LIMIT
            );
        }
        ratio
    }
}

/// Monte Carlo estimate of a mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimEstimate {
    fn proportion(successes: u64, trials: u64, seed: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            mean: p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

/// Planar points relative to a typical receiver at the origin.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    pub points: Vec<PolarPoint>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Mean interference (in units of `K1`-scaled power) that an HPPP of density
/// `lambda` beyond `r_max` contributes: `2 pi lambda K1 r_max^(2-a) / (a-2)`.
pub fn tail_interference_mean(lambda: f64, k1: f64, r_max: f64, alpha_i: f64) -> f64 {
    if r_max.is_infinite() {
        return 0.0;
    }
    2.0 * PI * lambda * k1 * r_max.powf(2.0 - alpha_i) / (alpha_i - 2.0)
}

/// Mean interference contributed by `(r0, r_max]`.
pub fn in_range_interference_mean(lambda: f64, k1: f64, r0: f64, r_max: f64, alpha_i: f64) -> f64 {
    2.0 * PI * lambda * k1 * (r0.powf(2.0 - alpha_i) - far_power(r_max, 2.0 - alpha_i))
        / (alpha_i - 2.0)
}

/// Neglected-to-retained mean interference ratio of a truncated field. The
/// density and link constant cancel.
pub fn truncation_bias_ratio(r0: f64, r_max: f64, alpha_i: f64) -> f64 {
    if r_max.is_infinite() {
        return 0.0;
    }
    let tail = r_max.powf(2.0 - alpha_i);
    tail / (r0.powf(2.0 - alpha_i) - tail)
}

/// `r^e` for a negative exponent, treating an infinite radius as zero.
fn far_power(r: f64, e: f64) -> f64 {
    if r.is_infinite() {
        0.0
    } else {
        r.powf(e)
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only rejects non-positive or non-finite means.
    let dist: Poisson<f64> = Poisson::new(mean).expect("positive finite Poisson mean");
    dist.sample(rng) as u64
}

/// Homogeneous Poisson points in the annulus `(r0, r_max]`.
pub fn sample_hppp_annulus<R: Rng + ?Sized>(
    lambda: f64,
    r0: f64,
    r_max: f64,
    rng: &mut R,
) -> PointSet {
    let (inner, outer) = (r0 * r0, r_max * r_max);
    let n = poisson_count(lambda * PI * (outer - inner), rng);
    let points = (0..n)
        .map(|_| {
            // 1 - U lies in (0, 1], so r lands in (r0, r_max].
            let u: f64 = rng.random();
            let r = (inner + (1.0 - u) * (outer - inner)).sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            PolarPoint { r, theta }
        })
        .collect();
    PointSet { points }
}

/// Matérn type-II hard-core process observed in the square `[-w, w]^2`,
/// `w = window_half`.
///
/// Parents are drawn on the enlarged square of half-width `w + r0` so that
/// points near the window edge see all of their competitors. Each parent gets
/// a uniform mark and survives iff no other parent within `r0` has a smaller
/// mark. Returned coordinates are polar about the window centre.
pub fn sample_mhcpp_type2<R: Rng + ?Sized>(
    lambda_parent: f64,
    r0: f64,
    window_half: f64,
    rng: &mut R,
) -> PointSet {
    let half = window_half + r0;
    let side = 2.0 * half;
    let n = poisson_count(lambda_parent * side * side, rng) as usize;
    if n == 0 {
        return PointSet::default();
    }
    let parents: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| {
            let x = side * rng.random::<f64>() - half;
            let y = side * rng.random::<f64>() - half;
            let mark: f64 = rng.random();
            (x, y, mark)
        })
        .collect();

    // Bucket grid with cell size r0: competitors lie in the 3x3 neighbourhood.
    let cells = ((side / r0).ceil() as usize).max(1);
    let cell_of = |v: f64| (((v + half) / r0) as usize).min(cells - 1);
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for (i, &(x, y, _)) in parents.iter().enumerate() {
        grid[cell_of(y) * cells + cell_of(x)].push(i);
    }

    let r0_sq = r0 * r0;
    let mut points = Vec::new();
    for &(x, y, mark) in &parents {
        if x.abs() > window_half || y.abs() > window_half {
            continue;
        }
        let (cx, cy) = (cell_of(x), cell_of(y));
        let beaten = (cy.saturating_sub(1)..=(cy + 1).min(cells - 1)).any(|gy| {
            (cx.saturating_sub(1)..=(cx + 1).min(cells - 1)).any(|gx| {
                grid[gy * cells + gx].iter().any(|&j| {
                    let (ox, oy, other) = parents[j];
                    let d2 = (ox - x).powi(2) + (oy - y).powi(2);
                    other < mark && d2 < r0_sq
                })
            })
        });
        if !beaten {
            points.push(PolarPoint {
                r: x.hypot(y),
                theta: y.atan2(x),
            });
        }
    }
    PointSet { points }
}

/// Average retained Matérn type-II density over `windows` independent windows.
pub fn empirical_retention<R: Rng + ?Sized>(
    lambda_parent: f64,
    r0: f64,
    windows: usize,
    rng: &mut R,
) -> Result<f64> {
    if windows == 0 {
        return Err(Error::config("windows must be at least 1"));
    }
    if !(r0 > 0.0) || !(lambda_parent >= 0.0) {
        return Err(Error::config(
            "empirical_retention needs r0 > 0 and lambda >= 0",
        ));
    }
    let window_half = 10.0 * r0;
    let retained: usize = (0..windows)
        .map(|_| sample_mhcpp_type2(lambda_parent, r0, window_half, rng).len())
        .sum();
    let area = (2.0 * window_half).powi(2);
    Ok(retained as f64 / (windows as f64 * area))
}

#[derive(Debug, Clone)]
struct ClassSampler {
    density: f64,
    parent_density: f64,
    weight: f64,
}

/// Draws the aggregate interference of one receiver's field.
#[derive(Debug, Clone)]
struct FieldSampler {
    classes: Vec<ClassSampler>,
    alpha_i: f64,
    r0: f64,
    r_split: f64,
    r_max: f64,
    use_mhcpp: bool,
    far: Option<Gamma<f64>>,
}

impl FieldSampler {
    fn new(inputs: &MetricInputs, receiver: Receiver, sim: &SimConfig) -> Result<Self> {
        let params = &inputs.params;
        let k1 = params.k1();
        let r0 = inputs.r0;
        let classes: Vec<ClassSampler> = interferer_classes(inputs, receiver)
            .into_iter()
            .filter(|c: &InterfererClass| c.density > 0.0 && c.power_fraction > 0.0)
            .map(|c| {
                let parent_density = if sim.use_mhcpp {
                    invert_effective_density(c.density, r0)?
                } else {
                    c.density
                };
                Ok(ClassSampler {
                    density: c.density,
                    parent_density,
                    weight: c.power_fraction * k1,
                })
            })
            .collect::<Result<_>>()?;

        let total_density: f64 = classes.iter().map(|c| c.density).sum();
        let r_split = match sim.far_field {
            FarField::MomentMatched { explicit_points }
                if !sim.use_mhcpp && total_density > 0.0 =>
            {
                (r0 * r0 + explicit_points / (PI * total_density))
                    .sqrt()
                    .min(sim.r_max)
            }
            _ => sim.r_max,
        };

        let far = if r_split < sim.r_max {
            let alpha = params.alpha_i;
            let (mut mean, mut var) = (0.0, 0.0);
            for c in &classes {
                mean += c.weight
                    * 2.0
                    * PI
                    * c.density
                    * (r_split.powf(2.0 - alpha) - far_power(sim.r_max, 2.0 - alpha))
                    / (alpha - 2.0);
                // E[h^2] = 2 for unit-mean exponential fading.
                var += c.weight
                    * c.weight
                    * 2.0
                    * PI
                    * c.density
                    * 2.0
                    * (r_split.powf(2.0 - 2.0 * alpha) - far_power(sim.r_max, 2.0 - 2.0 * alpha))
                    / (2.0 * alpha - 2.0);
            }
            if mean > 0.0 && var > 0.0 {
                Some(Gamma::new(mean * mean / var, var / mean).map_err(|e| {
                    Error::Numeric(format!("far-field gamma law (mean {mean}, var {var}): {e}"))
                })?)
            } else {
                None
            }
        } else {
            None
        };

        Ok(Self {
            classes,
            alpha_i: params.alpha_i,
            r0,
            r_split,
            r_max: sim.r_max,
            use_mhcpp: sim.use_mhcpp,
            far,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let half_alpha = 0.5 * self.alpha_i;
        let mut total = 0.0;
        for class in &self.classes {
            let mut sum = 0.0;
            if self.use_mhcpp {
                let set = sample_mhcpp_type2(class.parent_density, self.r0, self.r_max, rng);
                for p in set
                    .points
                    .iter()
                    .filter(|p| p.r > self.r0 && p.r <= self.r_max)
                {
                    sum += sample_exponential(rng, 1.0) * p.r.powf(-self.alpha_i);
                }
            } else {
                let inner = self.r0 * self.r0;
                let span = self.r_split * self.r_split - inner;
                let n = poisson_count(class.density * PI * span, rng);
                for _ in 0..n {
                    let u: f64 = rng.random();
                    let r_sq = inner + (1.0 - u) * span;
                    let h = sample_exponential(rng, 1.0);
                    sum += h * r_sq.powf(-half_alpha);
                }
            }
            total += class.weight * sum;
        }
        if let Some(far) = &self.far {
            total += far.sample(rng);
        }
        total
    }
}

fn trial_stream(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng.set_word_pos(0);
    rng
}

/// Runs `sim.trials` trials in fixed chunks; returns one accumulator per
/// chunk in chunk order.
fn run_chunked<A, M, F>(sim: &SimConfig, make: M, body: F) -> Vec<A>
where
    A: Send,
    M: Fn() -> A + Sync,
    F: Fn(&mut ChaCha8Rng, &mut A) + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(sim.seed);
    let chunks = sim.trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = make();
            let start = chunk * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(sim.trials);
            for trial in start..end {
                let mut rng = trial_stream(&base, trial);
                body(&mut rng, &mut acc);
            }
            acc
        })
        .collect()
}

fn prepare(inputs: &MetricInputs, receiver: Receiver, sim: &SimConfig) -> Result<FieldSampler> {
    inputs.validate()?;
    sim.validate(inputs.r0)?;
    FieldSampler::new(inputs, receiver, sim)
}

fn noise(inputs: &MetricInputs, sim: &SimConfig) -> f64 {
    if sim.include_noise {
        inputs.params.n0
    } else {
        0.0
    }
}

/// Counts, per threshold, the trials whose desired power exceeds
/// `threshold * (I + N)`.
fn success_counts<D>(
    inputs: &MetricInputs,
    receiver: Receiver,
    thresholds: &[f64],
    sim: &SimConfig,
    desired: D,
) -> Result<Vec<u64>>
where
    D: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let field = prepare(inputs, receiver, sim)?;
    let n0 = noise(inputs, sim);
    let chunks = run_chunked(
        sim,
        || vec![0u64; thresholds.len()],
        |rng, counts| {
            // Interference first so both receivers of a shared field see the
            // same draws at equal seeds.
            let impairment = field.sample(rng) + n0;
            let power = desired(rng);
            for (count, &th) in counts.iter_mut().zip(thresholds) {
                if power > th * impairment {
                    *count += 1;
                }
            }
        },
    );
    let mut total = vec![0u64; thresholds.len()];
    for chunk in chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            *t += c;
        }
    }
    Ok(total)
}

/// SRP estimates for several linear thresholds from one set of trials. Entry
/// `k` equals `simulate_srp` at `gamma_th = thresholds[k]` with the same seed.
pub fn simulate_srp_sweep(
    inputs: &MetricInputs,
    thresholds: &[f64],
    sim: &SimConfig,
) -> Result<Vec<SimEstimate>> {
    let params = inputs.params;
    let scheme = inputs.scheme;
    let counts = success_counts(inputs, Receiver::Radar, thresholds, sim, |rng| {
        let sigma = sample_exponential(rng, params.sigma_bar);
        radar_rx_power(&params, &scheme, sigma)
    })?;
    Ok(counts
        .into_iter()
        .map(|c| SimEstimate::proportion(c, sim.trials, sim.seed))
        .collect())
}

/// Monte Carlo SRP at `inputs.gamma_th`.
pub fn simulate_srp(inputs: &MetricInputs, sim: &SimConfig) -> Result<SimEstimate> {
    Ok(simulate_srp_sweep(inputs, &[inputs.gamma_th], sim)?[0])
}

/// Outage estimates for several linear thresholds from one set of trials.
pub fn simulate_outage_sweep(
    inputs: &MetricInputs,
    thresholds: &[f64],
    sim: &SimConfig,
) -> Result<Vec<SimEstimate>> {
    let params = inputs.params;
    let scheme = inputs.scheme;
    let counts = success_counts(inputs, Receiver::Data, thresholds, sim, |rng| {
        let h0 = sample_exponential(rng, 1.0);
        data_rx_power(&params, &scheme, h0)
    })?;
    Ok(counts
        .into_iter()
        .map(|c| SimEstimate::proportion(sim.trials - c, sim.trials, sim.seed))
        .collect())
}

/// Monte Carlo outage probability at `inputs.beta_th`.
pub fn simulate_outage(inputs: &MetricInputs, sim: &SimConfig) -> Result<SimEstimate> {
    Ok(simulate_outage_sweep(inputs, &[inputs.beta_th], sim)?[0])
}

/// Transmission capacity implied by a simulated outage at `beta_th`.
pub fn capacity_from_outage(
    inputs: &MetricInputs,
    beta_th: f64,
    outage: &SimEstimate,
) -> SimEstimate {
    let scale = inputs.scheme.data_time_fraction() * inputs.eff.lambda_d * beta_th.ln_1p();
    SimEstimate {
        mean: scale * (1.0 - outage.mean),
        std_err: scale * outage.std_err,
        trials: outage.trials,
        seed: outage.seed,
    }
}

/// Monte Carlo transmission capacity at `inputs.beta_th`.
pub fn simulate_capacity(inputs: &MetricInputs, sim: &SimConfig) -> Result<SimEstimate> {
    let out = simulate_outage(inputs, sim)?;
    Ok(capacity_from_outage(inputs, inputs.beta_th, &out))
}

fn mean_of<F>(
    inputs: &MetricInputs,
    receiver: Receiver,
    sim: &SimConfig,
    f: F,
) -> Result<SimEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    let field = prepare(inputs, receiver, sim)?;
    let chunks = run_chunked(
        sim,
        || (0.0f64, 0.0f64),
        |rng, (sum, sum_sq)| {
            let v = f(field.sample(rng));
            *sum += v;
            *sum_sq += v * v;
        },
    );
    let (sum, sum_sq) = chunks
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = sim.trials as f64;
    let mean = sum / n;
    let var = if sim.trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimEstimate {
        mean,
        std_err: (var / n).sqrt(),
        trials: sim.trials,
        seed: sim.seed,
    })
}

/// Monte Carlo estimate of `E[exp(-z I)]` at `receiver`.
pub fn simulate_laplace(
    z: f64,
    inputs: &MetricInputs,
    receiver: Receiver,
    sim: &SimConfig,
) -> Result<SimEstimate> {
    mean_of(inputs, receiver, sim, |i| (-z * i).exp())
}

/// Monte Carlo mean of the aggregate interference power at `receiver`, W.
pub fn simulate_interference_mean(
    inputs: &MetricInputs,
    receiver: Receiver,
    sim: &SimConfig,
) -> Result<SimEstimate> {
    mean_of(inputs, receiver, sim, |i| i)
}

/// Matérn type-II retention predicted by the hard-core density map.
pub fn predicted_retention(lambda_parent: f64, r0: f64) -> f64 {
    hard_core_density(lambda_parent, r0)
}
