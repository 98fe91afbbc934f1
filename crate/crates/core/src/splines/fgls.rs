//! Iterative feasible generalized least squares for the trend regime.
//!
//! The mean curve is fit by penalized least squares, the noise profile by
//! a second penalized spline on the log squared residuals, and the mean is
//! then refit with the estimated variances as weights; the variance and
//! mean steps repeat until the fitted means stabilize. Both smoothness
//! levels are re-selected by leave-one-out cross validation every pass,
//! under the weights current at that pass.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::TrendFit;
use crate::series::TimeSeries;

use super::basis::{build_basis, SplineBasisSpec};
use super::pwls::select_and_fit;
use super::build_penalty;

/// Squared residuals are clamped below at this value before taking logs,
/// so exact interpolation points cannot produce infinities.
pub const SQUARED_RESIDUAL_FLOOR: f64 = 1e-12;

/// Noise-variance model used inside the FGLS loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceModel {
    /// Penalized spline on the log squared residuals.
    #[default]
    Spline,
    /// A single constant level (homoscedastic fit).
    Constant,
}

#[derive(Debug, Clone)]
pub struct FglsControls {
    pub max_iters: usize,
    /// Convergence threshold on the maximum change in fitted means,
    /// relative to their magnitude.
    pub tol: f64,
    pub variance: VarianceModel,
}

impl Default for FglsControls {
    fn default() -> Self {
        Self {
            max_iters: 10,
            tol: 1e-6,
            variance: VarianceModel::Spline,
        }
    }
}

/// Fit the trend mean and log-variance curves on `range` of `ts`.
///
/// Interior knots of the supplied specs falling outside the range are
/// dropped (and thinned further if the basis would outnumber the data);
/// ranges shorter than `degree + 2` points are refused.
pub fn fit_fgls(
    ts: &TimeSeries,
    range: Range<usize>,
    spec_f: &SplineBasisSpec,
    spec_h: &SplineBasisSpec,
    controls: &FglsControls,
) -> Result<TrendFit> {
    let n = range.len();
    let needed = spec_f.degree + 2;
    if n < needed {
        return Err(Error::InsufficientData { needed, got: n });
    }
    if range.end > ts.len() {
        return Err(Error::InvalidInput(format!(
            "range {range:?} exceeds series length {}",
            ts.len()
        )));
    }
    let times: Vec<f64> = range.clone().map(|t| ts.time_of(t)).collect();
    let y = &ts.values()[range];
    let (lo, hi) = (times[0], times[n - 1]);

    let basis_f = spec_f.restricted(lo, hi, n)?;
    let basis_h = spec_h.restricted(lo, hi, n)?;
    let x = build_basis(&basis_f, &times)?;
    let v = build_basis(&basis_h, &times)?;
    let m_f = build_penalty(&basis_f)?;
    let m_h = build_penalty(&basis_h)?;

    // Pass 1: homoscedastic penalized least squares.
    let unit = vec![1.0; n];
    let (mut lambda_f, mut beta) = select_and_fit(&x, y, &unit, &m_f)?;
    let mut fitted = x.apply(&beta);

    let mut lambda_h = 1.0;
    let mut theta = vec![0.0; basis_h.dim()];

    for _ in 0..controls.max_iters {
        // Variance step on the log squared residuals.
        let log_sq: Vec<f64> = y
            .iter()
            .zip(fitted.iter())
            .map(|(yt, ft)| {
                let r = yt - ft;
                (r * r).max(SQUARED_RESIDUAL_FLOOR).ln()
            })
            .collect();
        match controls.variance {
            VarianceModel::Spline => {
                let (lh, th) = select_and_fit(&v, &log_sq, &unit, &m_h)?;
                lambda_h = lh;
                theta = th;
            }
            VarianceModel::Constant => {
                // Rows of `v` sum to one, so equal coefficients give a flat
                // curve at that level.
                let level = log_sq.iter().sum::<f64>() / n as f64;
                theta = vec![level; basis_h.dim()];
                lambda_h = 1.0;
            }
        }
        let log_var = v.apply(&theta);
        // Weights are scale-free: only the variance *profile* matters for
        // the weighted fit, and normalizing keeps λ selection comparable
        // across passes (a flat profile reduces exactly to unit weights).
        let mean_lv = log_var.iter().sum::<f64>() / n as f64;
        let flat = log_var.iter().all(|lv| (lv - mean_lv).abs() < 1e-12);
        let weights: Vec<f64> = if flat {
            vec![1.0; n]
        } else {
            log_var.iter().map(|lv| (lv - mean_lv).exp()).collect()
        };

        // Mean step under the estimated noise profile.
        let (lf, b) = select_and_fit(&x, y, &weights, &m_f)?;
        let new_fitted = x.apply(&b);
        let scale = fitted.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let delta = fitted
            .iter()
            .zip(new_fitted.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        lambda_f = lf;
        beta = b;
        fitted = new_fitted;
        if delta <= controls.tol * scale {
            break;
        }
    }

    Ok(TrendFit {
        beta,
        theta,
        lambda_f,
        lambda_h,
        basis_f,
        basis_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn smooth_series(n: usize, sigma: impl Fn(f64) -> f64, seed: u64) -> TimeSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dt = 70.0 / n as f64;
        let values: Vec<f64> = (0..n)
            .map(|t| {
                let h = t as f64 * dt;
                3.0 * (0.3 * h).sin() + 0.05 * h * h / 7.0
                    + sigma(h) * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        TimeSeries::new(values, 0.0, dt, None).unwrap()
    }

    fn default_specs(ts: &TimeSeries) -> (SplineBasisSpec, SplineBasisSpec) {
        let hi = ts.time_of(ts.len() - 1);
        (
            SplineBasisSpec::uniform(3, [0.0, hi], 1.0).unwrap(),
            SplineBasisSpec::uniform(3, [0.0, hi], 5.0).unwrap(),
        )
    }

    #[test]
    fn refuses_too_short_ranges() {
        let ts = smooth_series(400, |_| 0.3, 1);
        let (f, h) = default_specs(&ts);
        let err = fit_fgls(&ts, 0..4, &f, &h, &FglsControls::default());
        assert!(matches!(err, Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn single_iteration_with_constant_variance_matches_initial_fit() {
        let ts = smooth_series(300, |_| 0.4, 2);
        let (f, h) = default_specs(&ts);
        let one = FglsControls {
            max_iters: 1,
            variance: VarianceModel::Constant,
            ..Default::default()
        };
        let fit = fit_fgls(&ts, 0..300, &f, &h, &one).unwrap();
        // With a flat variance profile the normalized weights are exactly
        // one, so the refit reproduces the homoscedastic pass.
        let times = ts.times();
        let x = build_basis(&fit.basis_f, &times).unwrap();
        let m_f = build_penalty(&fit.basis_f).unwrap();
        let unit = vec![1.0; ts.len()];
        let (lambda0, beta0) = select_and_fit(&x, ts.values(), &unit, &m_f).unwrap();
        assert_eq!(fit.lambda_f, lambda0);
        assert_eq!(fit.beta, beta0);
    }

    #[test]
    fn homoscedastic_second_iteration_is_idempotent() {
        let ts = smooth_series(250, |_| 0.5, 3);
        let (f, h) = default_specs(&ts);
        let once = FglsControls {
            max_iters: 1,
            variance: VarianceModel::Constant,
            ..Default::default()
        };
        let twice = FglsControls {
            max_iters: 2,
            variance: VarianceModel::Constant,
            ..Default::default()
        };
        let a = fit_fgls(&ts, 0..250, &f, &h, &once).unwrap();
        let b = fit_fgls(&ts, 0..250, &f, &h, &twice).unwrap();
        let times = ts.times();
        let ma = a.mean_at(&times).unwrap();
        let mb = b.mean_at(&times).unwrap();
        let scale = ma.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let delta = ma
            .iter()
            .zip(mb.iter())
            .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
        assert!(delta / scale < 1e-8, "relative change {}", delta / scale);
    }

    #[test]
    fn recovers_heteroscedastic_profile() {
        // σ ramps linearly from 0.1 to 2.0 across the range; the fitted
        // standard-deviation curve should track it within 25% in median.
        let n = 400;
        let mut rel_errors = Vec::new();
        for seed in 0..50 {
            let ts = smooth_series(n, |h| 0.1 + (2.0 - 0.1) * h / 70.0, 100 + seed);
            let (f, h) = default_specs(&ts);
            let fit = fit_fgls(&ts, 0..n, &f, &h, &FglsControls::default()).unwrap();
            let times = ts.times();
            let sd = fit.noise_sd_at(&times).unwrap();
            let mut errs: Vec<f64> = times
                .iter()
                .zip(sd.iter())
                .map(|(t, sd)| {
                    let truth = 0.1 + (2.0 - 0.1) * t / 70.0;
                    (sd - truth).abs() / truth
                })
                .collect();
            errs.sort_by(f64::total_cmp);
            rel_errors.push(errs[errs.len() / 2]);
        }
        rel_errors.sort_by(f64::total_cmp);
        let median = rel_errors[rel_errors.len() / 2];
        assert!(median < 0.25, "median relative sd error {median}");
    }
}
