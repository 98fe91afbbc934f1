//! Synthetic two-regime scenarios for benchmarking the estimators.
//!
//! A scenario draws, per series: a smooth trend (Gaussian process or
//! random polynomial) carrying heteroscedastic noise up to the change
//! point, then an FI or ARFIMA equilibrium about zero. All randomness
//! derives from the single scenario seed through fixed substreams, so
//! replicates and series are independent yet exactly reproducible.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiproc::{simulate_arfima, simulate_fi};
use crate::series::{MultiSeries, TimeSeries};

/// Substream tags for per-series seed derivation.
pub const STREAM_TREND: u64 = 1;
pub const STREAM_NOISE: u64 = 2;
pub const STREAM_EQUILIBRIUM: u64 = 3;
/// Substream tag for replicate seeds in batch generation.
pub const STREAM_REPLICATE: u64 = 4;
/// Substream tag for per-replicate random equilibrium coefficients.
pub const STREAM_ARFIMA_PARAMS: u64 = 5;

/// Trend family of the first regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrendModel {
    /// Mean-zero Gaussian process with squared exponential kernel
    /// `variance * exp(-0.5 ((s - t) / lengthscale)^2)` in hours.
    GaussianProcess { variance: f64, lengthscale_hours: f64 },
    /// Degree-five polynomial with N(0, 0.1^2) coefficients, shrunk by
    /// `0.1^j` for degrees `j >= 3`.
    Polynomial,
}

impl Default for TrendModel {
    fn default() -> Self {
        TrendModel::GaussianProcess {
            variance: 10.0,
            lengthscale_hours: 1.0,
        }
    }
}

/// Equilibrium family of the second regime (always mean zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EquilibriumModel {
    Fi,
    Arfima { phi: f64, theta_ma: f64 },
}

impl Default for EquilibriumModel {
    fn default() -> Self {
        EquilibriumModel::Fi
    }
}

/// Noise level of the trend regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseSchedule {
    /// Standard deviation follows the trend shape, mapped affinely onto
    /// `[0.1, 2.0]`.
    Ramp,
    Constant(f64),
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        NoiseSchedule::Ramp
    }
}

/// Complete description of one synthetic experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub t_len: usize,
    pub horizon_hours: f64,
    /// One change point per series; a single entry is broadcast to all.
    pub tau_hours: Vec<f64>,
    pub d: f64,
    pub trend: TrendModel,
    pub equilibrium: EquilibriumModel,
    pub eps_sd: f64,
    pub noise: NoiseSchedule,
    /// Number of series.
    pub p: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// The standard univariate setup: T = 400 samples over 70 hours, GP
    /// trend with ramped noise, FI equilibrium with innovation sd 0.5.
    pub fn univariate_gp(tau_hours: f64, d: f64, seed: u64) -> Self {
        Self {
            t_len: 400,
            horizon_hours: 70.0,
            tau_hours: vec![tau_hours],
            d,
            trend: TrendModel::default(),
            equilibrium: EquilibriumModel::Fi,
            eps_sd: 0.5,
            noise: NoiseSchedule::Ramp,
            p: 1,
            seed,
        }
    }

    pub fn dt_hours(&self) -> f64 {
        self.horizon_hours / self.t_len as f64
    }

    /// The same scenario reseeded for replicate `rep`.
    pub fn replicate(&self, rep: u64) -> Self {
        let mut spec = self.clone();
        spec.seed = subseed(self.seed, STREAM_REPLICATE, rep);
        spec
    }

    /// Change point of series `j`.
    pub fn tau_of(&self, j: usize) -> f64 {
        if self.tau_hours.len() == 1 {
            self.tau_hours[0]
        } else {
            self.tau_hours[j]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_len < 50 {
            return Err(Error::InvalidConfig(format!(
                "scenario length must be at least 50, got {}",
                self.t_len
            )));
        }
        if !(self.horizon_hours > 0.0) {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        if self.p == 0 {
            return Err(Error::InvalidConfig("need at least one series".into()));
        }
        if self.tau_hours.len() != 1 && self.tau_hours.len() != self.p {
            return Err(Error::InvalidConfig(format!(
                "got {} change points for {} series",
                self.tau_hours.len(),
                self.p
            )));
        }
        for &tau in &self.tau_hours {
            if !(tau >= 0.0 && tau < self.horizon_hours) {
                return Err(Error::InvalidConfig(format!(
                    "change point {tau} h outside [0, {}) h",
                    self.horizon_hours
                )));
            }
        }
        if !(self.eps_sd > 0.0) {
            return Err(Error::InvalidConfig("innovation sd must be positive".into()));
        }
        if let NoiseSchedule::Constant(s) = self.noise {
            if !(s > 0.0) {
                return Err(Error::InvalidConfig("noise sd must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Ground truth carried alongside generated data, sufficient to score
/// estimates without re-reading the spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTruth {
    pub taus_hours: Vec<f64>,
    pub tau_indices: Vec<usize>,
    pub d: f64,
    /// Noiseless trend curve of each series over its trend range.
    pub trends: Vec<Vec<f64>>,
}

/// Nine-point survey grid over the long-memory order: -0.25 to 1.35 in
/// steps of 0.2.
pub fn d_grid_coarse() -> Vec<f64> {
    (0..9).map(|k| -0.25 + 0.2 * k as f64).collect()
}

/// Twenty-point survey grid over the long-memory order: -0.45 to 1.45 in
/// steps of 0.1.
pub fn d_grid_fine() -> Vec<f64> {
    (0..20).map(|k| -0.45 + 0.1 * k as f64).collect()
}

/// SplitMix64-style derivation of independent substream seeds.
pub fn subseed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add(index.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Draw a mean-zero Gaussian process with squared exponential kernel on
/// the given hour grid, by covariance factorization with a jittered
/// diagonal (escalating tenfold from 1e-8 to 1e-4 before giving up).
pub fn gen_trend_gp(
    hours: &[f64],
    variance: f64,
    lengthscale_hours: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = hours.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty hour grid".into()));
    }
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let z = (hours[i] - hours[j]) / lengthscale_hours;
            cov[(i, j)] = variance * (-0.5 * z * z).exp();
        }
    }
    let mut jitter = 1e-8;
    let chol = loop {
        let mut jittered = cov.clone();
        for i in 0..n {
            jittered[(i, i)] += jitter * variance;
        }
        match nalgebra::Cholesky::new(jittered) {
            Some(c) => break c,
            None if jitter < 1e-4 => jitter *= 10.0,
            None => {
                return Err(Error::Numerical(
                    "covariance factorization failed even with maximal jitter".into(),
                ))
            }
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let draws = chol.l() * nalgebra::DVector::from_column_slice(&z);
    Ok(draws.as_slice().to_vec())
}

/// Draw a degree-five polynomial trend on the hour grid: coefficients
/// `c_j ~ N(0, 0.1^2)`, further shrunk by `0.1^j` for degrees `j >= 3`.
pub fn gen_trend_poly(hours: &[f64], seed: u64) -> Result<Vec<f64>> {
    if hours.is_empty() {
        return Err(Error::InvalidConfig("empty hour grid".into()));
    }
    let coef = poly_coefficients(seed);
    Ok(hours
        .iter()
        .map(|h| {
            let mut acc = 0.0;
            let mut power = 1.0;
            for c in coef.iter() {
                acc += c * power;
                power *= h;
            }
            acc
        })
        .collect())
}

/// Shrunk polynomial coefficients `c_0..c_5` (exposed for tests).
pub fn poly_coefficients(seed: u64) -> [f64; 6] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coef = [0.0; 6];
    for (j, c) in coef.iter_mut().enumerate() {
        let draw: f64 = rng.sample(StandardNormal);
        let mut v = 0.1 * draw;
        if j >= 3 {
            v *= 0.1_f64.powi(j as i32);
        }
        *c = v;
    }
    coef
}

/// Map the trend curve affinely onto standard deviations in [0.1, 2.0].
pub fn apply_noise_schedule(trend: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = trend
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    if !(hi > lo) {
        return Err(Error::InvalidConfig(
            "noise schedule needs a non-constant trend".into(),
        ));
    }
    let scale = (2.0 - 0.1) / (hi - lo);
    Ok(trend.iter().map(|f| scale * (f - lo) + 0.1).collect())
}

/// Generate the series of a scenario together with its ground truth.
pub fn gen_scenario(spec: &ScenarioSpec) -> Result<(MultiSeries, ScenarioTruth)> {
    spec.validate()?;
    let dt = spec.dt_hours();
    let mut series = Vec::with_capacity(spec.p);
    let mut truth = ScenarioTruth {
        taus_hours: Vec::new(),
        tau_indices: Vec::new(),
        d: spec.d,
        trends: Vec::new(),
    };
    for j in 0..spec.p {
        let tau = spec.tau_of(j);
        let tau_index = ((tau / dt).round() as usize).min(spec.t_len - 1);
        let mut values = Vec::with_capacity(spec.t_len);

        let trend = if tau_index > 0 {
            let hours: Vec<f64> = (0..tau_index).map(|t| t as f64 * dt).collect();
            let trend_seed = subseed(spec.seed, STREAM_TREND, j as u64);
            let f = match spec.trend {
                TrendModel::GaussianProcess {
                    variance,
                    lengthscale_hours,
                } => gen_trend_gp(&hours, variance, lengthscale_hours, trend_seed)?,
                TrendModel::Polynomial => gen_trend_poly(&hours, trend_seed)?,
            };
            let sds = match spec.noise {
                NoiseSchedule::Ramp => apply_noise_schedule(&f)?,
                NoiseSchedule::Constant(s) => vec![s; f.len()],
            };
            let mut rng = ChaCha8Rng::seed_from_u64(subseed(spec.seed, STREAM_NOISE, j as u64));
            for (ft, sd) in f.iter().zip(sds.iter()) {
                values.push(ft + sd * rng.sample::<f64, _>(StandardNormal));
            }
            f
        } else {
            Vec::new()
        };

        let eq_len = spec.t_len - tau_index;
        let eq_seed = subseed(spec.seed, STREAM_EQUILIBRIUM, j as u64);
        let eq = match spec.equilibrium {
            EquilibriumModel::Fi => simulate_fi(eq_len, spec.d, 0.0, spec.eps_sd, eq_seed)?,
            EquilibriumModel::Arfima { phi, theta_ma } => {
                simulate_arfima(eq_len, spec.d, phi, theta_ma, spec.eps_sd, eq_seed)?
            }
        };
        values.extend_from_slice(&eq);

        series.push(TimeSeries::new(
            values,
            0.0,
            dt,
            Some(format!("series{j}")),
        )?);
        truth.taus_hours.push(tau_index as f64 * dt);
        truth.tau_indices.push(tau_index);
        truth.trends.push(trend);
    }
    Ok((MultiSeries::new(series)?, truth))
}
