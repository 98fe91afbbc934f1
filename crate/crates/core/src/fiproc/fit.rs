//! Maximum-likelihood fit of the FI equilibrium parameters with the
//! dual-range search over the long-memory order.
//!
//! The conditional mean takes a first difference for `d` above one half,
//! so the profile likelihood is discontinuous across 0.5. The fit
//! therefore maximizes separately over `(-0.49, 0.49)` and `(0.51, 1.49)`
//! (each end buffered from the seam and the outer boundaries) and reports
//! the candidate whose `d` sits further from 0.5.

use crate::error::{Error, Result};
use crate::model::FIFit;
use crate::optim::{nelder_mead_min, NelderMeadOptions};

use super::likelihood::{profile_step_loglik, NU2_FLOOR};
use super::weights::frac_weights;

/// Stationary-side search range for `d`.
pub const D_RANGE_LOW: (f64, f64) = (-0.49, 0.49);
/// Nonstationary-side search range for `d`.
pub const D_RANGE_HIGH: (f64, f64) = (0.51, 1.49);

const MIN_EQUILIBRIUM_POINTS: usize = 20;

/// Fit `(d, mu, nu2)` on the equilibrium segment `y[tau..]`, maximizing
/// the conditional likelihood over both `d` ranges and keeping the
/// estimate further from 0.5.
pub fn fit_fi(y: &[f64], tau: usize) -> Result<FIFit> {
    fit_fi_both_ranges(y, tau).map(|(chosen, _)| chosen)
}

/// Both range winners: `(chosen, other)` with `|chosen.d - 0.5| >= |other.d - 0.5|`.
pub fn fit_fi_both_ranges(y: &[f64], tau: usize) -> Result<(FIFit, FIFit)> {
    let n = y.len().saturating_sub(tau);
    if n < MIN_EQUILIBRIUM_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_EQUILIBRIUM_POINTS,
            got: n,
        });
    }
    let segment = &y[tau..];

    // Standardize the segment; the likelihood geometry over (d, mu) is
    // unchanged and the optimizer sees O(1) scales.
    let nf = n as f64;
    let mean = segment.iter().sum::<f64>() / nf;
    let sd_raw = (segment.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf).sqrt();
    let sd = if sd_raw > 1e-150 { sd_raw } else { 1.0 };
    let z: Vec<f64> = segment.iter().map(|v| (v - mean) / sd).collect();

    let low = fit_range(&z, D_RANGE_LOW)?;
    let high = fit_range(&z, D_RANGE_HIGH)?;
    let (chosen, other) = if (low.d - 0.5).abs() >= (high.d - 0.5).abs() {
        (low, high)
    } else {
        (high, low)
    };
    Ok((
        destandardize(chosen, mean, sd, nf),
        destandardize(other, mean, sd, nf),
    ))
}

struct RangeFit {
    d: f64,
    mu_z: f64,
    sse_z: f64,
}

fn fit_range(z: &[f64], range: (f64, f64)) -> Result<RangeFit> {
    let n = z.len();
    let zmin = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (zmax - zmin).max(1.0);
    let lower = [range.0, zmin - span];
    let upper = [range.1, zmax + span];
    let mid = 0.5 * (range.0 + range.1);

    let opts = NelderMeadOptions {
        max_iters: 300,
        init_steps: vec![0.15, 0.25],
        x_tols: vec![1e-6, 1e-6],
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start_d in [mid - 0.3, mid + 0.3] {
        let mut scratch = Vec::with_capacity(n);
        let objective = |x: &[f64]| {
            let pi = frac_weights(x[0], n).pi;
            let (ll, _, _) = profile_step_loglik(z, &pi, x[1], &mut scratch);
            -ll
        };
        let (x, f) = nelder_mead_min(objective, &[start_d, 0.0], &lower, &upper, &opts);
        if !f.is_finite() {
            continue;
        }
        match &best {
            Some((fb, _)) if *fb <= f => {}
            _ => best = Some((f, x)),
        }
    }
    let (_, x) = best.ok_or_else(|| {
        Error::Estimation(format!(
            "likelihood maximization failed on d range ({}, {})",
            range.0, range.1
        ))
    })?;
    let pi = frac_weights(x[0], n).pi;
    let mut scratch = Vec::new();
    let (_, sse_z, _) = profile_step_loglik(z, &pi, x[1], &mut scratch);
    Ok(RangeFit {
        d: x[0],
        mu_z: x[1],
        sse_z,
    })
}

fn destandardize(fit: RangeFit, mean: f64, sd: f64, n: f64) -> FIFit {
    let sse = fit.sse_z * sd * sd;
    let nu2 = (sse / n).max(NU2_FLOOR);
    let loglik = -sse / (2.0 * nu2) - 0.5 * n * nu2.ln();
    FIFit {
        d: fit.d,
        mu: mean + sd * fit.mu_z,
        nu2,
        loglik,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiproc::simulate_fi;

    #[test]
    fn constant_segment_floors_variance() {
        let y = vec![3.25; 40];
        let fit = fit_fi(&y, 5).unwrap();
        assert!((fit.mu - 3.25).abs() < 1e-4, "mu {}", fit.mu);
        assert_eq!(fit.nu2, NU2_FLOOR);
    }

    #[test]
    fn refuses_short_segments() {
        let y = vec![0.0; 30];
        assert!(matches!(
            fit_fi(&y, 15),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn dual_range_selection_invariant() {
        for seed in 0..8 {
            let y = simulate_fi(120, 0.3, 0.0, 0.5, 1000 + seed).unwrap();
            let (chosen, other) = fit_fi_both_ranges(&y, 0).unwrap();
            assert!((chosen.d - 0.5).abs() >= (other.d - 0.5).abs());
        }
    }

    #[test]
    fn recovers_moderate_long_memory() {
        // Light check here; the full Monte Carlo lives in the acceptance suite.
        let mut errs = Vec::new();
        for seed in 0..20 {
            let y = simulate_fi(350, 0.25, 0.0, 0.5, 7000 + seed).unwrap();
            let fit = fit_fi(&y, 0).unwrap();
            errs.push(fit.d - 0.25);
        }
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        assert!(mean.abs() < 0.12, "mean d error {mean}");
    }

    #[test]
    fn likelihood_profile_is_continuous_within_ranges() {
        let y = simulate_fi(150, 0.35, 0.0, 0.5, 99).unwrap();
        let n = y.len();
        let mut scratch = Vec::new();
        for range in [D_RANGE_LOW, D_RANGE_HIGH] {
            let grid = 200;
            let mut prev: Option<f64> = None;
            let mut max_jump = 0.0_f64;
            for i in 0..=grid {
                let d = range.0 + (range.1 - range.0) * i as f64 / grid as f64;
                let pi = frac_weights(d, n).pi;
                let (ll, _, _) = profile_step_loglik(&y, &pi, 0.0, &mut scratch);
                if let Some(p) = prev {
                    max_jump = max_jump.max((ll - p).abs());
                }
                prev = Some(ll);
            }
            // No discontinuities inside a range: successive values on a
            // fine grid move smoothly.
            assert!(max_jump < 5.0, "jump {max_jump} within {range:?}");
        }
    }
}
