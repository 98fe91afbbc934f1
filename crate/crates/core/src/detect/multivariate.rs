//! Pooled multivariate estimation with a shared long-memory order.
//!
//! Stage one fits each series alone. Stage two freezes every per-series
//! change point (or transition) and trend, then maximizes the summed
//! equilibrium log-likelihoods over a single `d`, re-optimizing each
//! series' level closed-form and profiling each innovation variance. The
//! shared `d` starts from the mean of the univariate estimates and stays
//! in the `d` range containing that initializer.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fiproc::{frac_weights, sigmoid_design, step_design, D_RANGE_HIGH, D_RANGE_LOW, NU2_FLOOR};
use crate::model::{ChangePointFit, FIFit, MultiFit};
use crate::optim::grid_then_golden;
use crate::series::MultiSeries;

use super::{fit_sigmoid, fit_step, SigmoidConfig, StepSearchConfig};

/// Which univariate estimator drives stage one.
#[derive(Debug, Clone)]
pub enum BaseEstimator {
    Step(StepSearchConfig),
    Sigmoid(SigmoidConfig),
}

/// Pooled fit across the series of `ms`; needs at least two series.
pub fn fit_multivariate(ms: &MultiSeries, base: &BaseEstimator) -> Result<MultiFit> {
    if ms.width() < 2 {
        return Err(Error::InvalidInput(format!(
            "pooled estimation needs at least 2 series, got {}",
            ms.width()
        )));
    }

    // Stage one: univariate fits, labeled on failure.
    let fits: Vec<ChangePointFit> = ms
        .series()
        .par_iter()
        .enumerate()
        .map(|(j, ts)| {
            let fit = match base {
                BaseEstimator::Step(cfg) => fit_step(ts, cfg),
                BaseEstimator::Sigmoid(cfg) => fit_sigmoid(ts, cfg),
            };
            fit.map_err(|e| {
                let label = ts.label().map(str::to_string).unwrap_or_else(|| format!("#{j}"));
                Error::Estimation(format!("series {label}: {e}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Stage two: shared-d profile likelihood.
    let univariate_d: Vec<f64> = fits.iter().map(|f| f.equilibrium.d).collect();
    let d_init = univariate_d.iter().sum::<f64>() / univariate_d.len() as f64;
    let range = if d_init < 0.5 { D_RANGE_LOW } else { D_RANGE_HIGH };
    let parts: Vec<SeriesPart> = ms
        .series()
        .iter()
        .zip(fits.iter())
        .map(|(ts, fit)| SeriesPart::new(ts.values(), ts.start_hours(), ts.dt_hours(), fit))
        .collect();

    let (d_shared, _) = grid_then_golden(
        |d| -parts.iter().map(|p| p.profile_loglik(d).0).sum::<f64>(),
        range.0,
        range.1,
        41,
        1e-7,
    );

    let mut per_series = Vec::with_capacity(fits.len());
    let mut objective = 0.0;
    for (part, fit) in parts.iter().zip(fits.into_iter()) {
        let (loglik, mu, nu2) = part.profile_loglik(d_shared);
        let trend_part = fit.objective - fit.equilibrium.loglik;
        let mut updated = fit;
        updated.equilibrium = FIFit {
            d: d_shared,
            mu,
            nu2,
            loglik,
        };
        updated.objective = trend_part + loglik;
        objective += updated.objective;
        per_series.push(updated);
    }

    Ok(MultiFit {
        d_shared,
        per_series,
        objective,
        univariate_d,
    })
}

/// Frozen per-series quantities entering the stage-two likelihood.
enum SeriesPart {
    /// Step split: equilibrium segment, standardized.
    Step {
        z: Vec<f64>,
        mean: f64,
        sd: f64,
    },
    /// Sigmoid transition: whole standardized series and its lag weights.
    Sigmoid {
        z: Vec<f64>,
        weights: Vec<f64>,
        mean: f64,
        sd: f64,
    },
}

impl SeriesPart {
    fn new(y: &[f64], start_hours: f64, dt_hours: f64, fit: &ChangePointFit) -> Self {
        match fit.alpha {
            None => {
                let tau_index = (((fit.tau_hours - start_hours) / dt_hours).round() as usize)
                    .min(y.len() - 1);
                let seg = &y[tau_index..];
                let (z, mean, sd) = standardize(seg);
                SeriesPart::Step { z, mean, sd }
            }
            Some(alpha) => {
                let weights: Vec<f64> = (0..y.len())
                    .map(|t| alpha.weight_at(start_hours + t as f64 * dt_hours))
                    .collect();
                let (z, mean, sd) = standardize(y);
                SeriesPart::Sigmoid {
                    z,
                    weights,
                    mean,
                    sd,
                }
            }
        }
    }

    /// Equilibrium log-likelihood at `d` with the level closed-form and
    /// the innovation variance profiled; returns `(loglik, mu, nu2)` in
    /// original units.
    fn profile_loglik(&self, d: f64) -> (f64, f64, f64) {
        match self {
            SeriesPart::Step { z, mean, sd } => {
                let n = z.len() as f64;
                let pi = frac_weights(d, z.len()).pi;
                let (a, b) = step_design(z, &pi);
                let denom: f64 = b.iter().map(|v| v * v).sum();
                let mu_z = if denom > 0.0 {
                    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>() / denom
                } else {
                    0.0
                };
                let sse_z: f64 = a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| {
                        let r = x - mu_z * y;
                        r * r
                    })
                    .sum();
                let sse = sse_z * sd * sd;
                let nu2 = (sse / n).max(NU2_FLOOR);
                let ll = -sse / (2.0 * nu2) - 0.5 * n * nu2.ln();
                (ll, mean + sd * mu_z, nu2)
            }
            SeriesPart::Sigmoid {
                z,
                weights,
                mean,
                sd,
            } => {
                let pi = frac_weights(d, z.len()).pi;
                let (a, b) = sigmoid_design(z, &pi, weights);
                let sw: f64 = weights.iter().sum();
                let denom: f64 = weights
                    .iter()
                    .zip(b.iter())
                    .map(|(w, bv)| w * bv * bv)
                    .sum();
                let mu_z = if denom > 0.0 {
                    weights
                        .iter()
                        .zip(a.iter().zip(b.iter()))
                        .map(|(w, (av, bv))| w * av * bv)
                        .sum::<f64>()
                        / denom
                } else {
                    0.0
                };
                let wsse_z: f64 = weights
                    .iter()
                    .zip(a.iter().zip(b.iter()))
                    .map(|(w, (av, bv))| {
                        let r = av - mu_z * bv;
                        w * r * r
                    })
                    .sum();
                let wsse = wsse_z * sd * sd;
                let nu2 = (wsse / sw).max(NU2_FLOOR);
                let ll = -wsse / (2.0 * nu2) - 0.5 * sw * nu2.ln();
                (ll, mean + sd * mu_z, nu2)
            }
        }
    }
}

fn standardize(y: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd_raw = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let sd = if sd_raw > 1e-150 { sd_raw } else { 1.0 };
    (y.iter().map(|v| (v - mean) / sd).collect(), mean, sd)
}
