//! Conditional Gaussian log-likelihood of the equilibrium segment.

use crate::error::{Error, Result};

use super::mean::step_residuals;
use super::weights::frac_weights;

/// Floor applied to the profiled innovation variance so degenerate
/// zero-residual segments stay finite.
pub const NU2_FLOOR: f64 = 1e-12;

/// Conditional log-likelihood of `y[tau..]` under an FI(d) equilibrium
/// about `mu` with innovation variance `nu2` (additive constant dropped):
/// `-(1 / 2 nu2) * SSE - (n / 2) ln nu2` over the `n = len - tau`
/// equilibrium observations.
pub fn fi_loglik(y: &[f64], tau: usize, mu: f64, d: f64, nu2: f64) -> Result<f64> {
    if tau + 2 > y.len() {
        return Err(Error::InsufficientData {
            needed: 2,
            got: y.len().saturating_sub(tau),
        });
    }
    if !(nu2 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "innovation variance must be positive, got {nu2}"
        )));
    }
    let segment = &y[tau..];
    let pi = frac_weights(d, segment.len()).pi;
    let mut residuals = Vec::new();
    step_residuals(segment, &pi, mu, &mut residuals);
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let n = segment.len() as f64;
    Ok(-sse / (2.0 * nu2) - 0.5 * n * nu2.ln())
}

/// Log-likelihood with the innovation variance profiled out analytically
/// at `nu2* = SSE / n`; returns `(loglik, sse, nu2*)`.
pub(crate) fn profile_step_loglik(segment: &[f64], pi: &[f64], mu: f64, scratch: &mut Vec<f64>) -> (f64, f64, f64) {
    step_residuals(segment, pi, mu, scratch);
    let sse: f64 = scratch.iter().map(|r| r * r).sum();
    let n = segment.len() as f64;
    let nu2 = (sse / n).max(NU2_FLOOR);
    let ll = -sse / (2.0 * nu2) - 0.5 * n * nu2.ln();
    (ll, sse, nu2)
}
