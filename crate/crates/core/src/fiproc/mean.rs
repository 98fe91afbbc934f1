//! Conditional mean of the equilibrium regime under step and sigmoid
//! transitions, plus the residual sweeps the estimators are built on.
//!
//! Indices are zero-based throughout: observation `t` conditions on
//! `y[0..t]`, and a change point `tau` marks the first equilibrium index.

use crate::error::{Error, Result};

use super::weights::frac_weights;

/// Conditional mean of `y[t]` for an FI(d) equilibrium starting at `tau`:
/// `mu - sum_{i=1}^{t} pi[i] (y[t-i] - mu)` with lags before `tau`
/// excluded by the step indicator.
pub fn fi_conditional_mean_step(y: &[f64], t: usize, mu: f64, d: f64, tau: usize) -> Result<f64> {
    if t < tau {
        return Err(Error::InvalidInput(format!(
            "conditional mean requested at t = {t} before the change point tau = {tau}"
        )));
    }
    if t >= y.len() {
        return Err(Error::InvalidInput(format!(
            "index {t} out of range for series of length {}",
            y.len()
        )));
    }
    let max_lag = t - tau;
    let w = frac_weights(d, max_lag);
    let mut acc = 0.0;
    for i in 1..=max_lag {
        acc += w.pi[i] * (y[t - i] - mu);
    }
    Ok(mu - acc)
}

/// Conditional mean with the step indicator replaced by a logistic weight
/// on the lagged index: `w(u) = 1 / (1 + exp(-(alpha0 + alpha1 u)))`.
pub fn fi_conditional_mean_sigmoid(
    y: &[f64],
    t: usize,
    mu: f64,
    d: f64,
    alpha0: f64,
    alpha1: f64,
) -> f64 {
    assert!(t < y.len());
    let w = frac_weights(d, t);
    let mut acc = 0.0;
    for i in 1..=t {
        let u = (t - i) as f64;
        let weight = 1.0 / (1.0 + (-(alpha0 + alpha1 * u)).exp());
        acc += w.pi[i] * (y[t - i] - mu) * weight;
    }
    mu - acc
}

/// One-step residuals of a segment under the step transition with the
/// change point at the segment start: `r[u] = sum_{i<=u} pi[i] (seg[u-i] - mu)`
/// (the truncated fractional difference of the centered segment).
pub(crate) fn step_residuals(segment: &[f64], pi: &[f64], mu: f64, out: &mut Vec<f64>) {
    let n = segment.len();
    debug_assert!(pi.len() >= n);
    out.clear();
    out.reserve(n);
    for u in 0..n {
        let acc: f64 = pi[..=u]
            .iter()
            .zip(segment[..=u].iter().rev())
            .map(|(p, v)| p * (v - mu))
            .sum();
        out.push(acc);
    }
}

/// Level-free decomposition of the step residuals: `r[u] = a[u] - mu * b[u]`
/// with `a` the truncated fractional difference of the raw segment and
/// `b` the running weight sums.
pub(crate) fn step_design(segment: &[f64], pi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = segment.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut cum = 0.0;
    for u in 0..n {
        let conv: f64 = pi[..=u]
            .iter()
            .zip(segment[..=u].iter().rev())
            .map(|(p, v)| p * v)
            .sum();
        cum += pi[u];
        a.push(conv);
        b.push(cum);
    }
    (a, b)
}

/// Residuals over the whole series under sigmoid lag weights `w` (one
/// weight per sample index): `r[t] = (y[t] - mu) + sum_{i=1}^{t} pi[i] w[t-i] (y[t-i] - mu)`.
pub(crate) fn sigmoid_residuals(y: &[f64], pi: &[f64], w: &[f64], mu: f64, out: &mut Vec<f64>) {
    let n = y.len();
    debug_assert!(pi.len() >= n && w.len() == n);
    // q[u] = w[u] * (y[u] - mu); the lag sum is then a plain convolution.
    let q: Vec<f64> = y.iter().zip(w.iter()).map(|(v, wu)| wu * (v - mu)).collect();
    out.clear();
    out.reserve(n);
    for t in 0..n {
        let acc: f64 = pi[1..=t]
            .iter()
            .zip(q[..t].iter().rev())
            .map(|(p, qv)| p * qv)
            .sum();
        out.push((y[t] - mu) + acc);
    }
}

/// Level-free decomposition of the sigmoid residuals:
/// `r[t] = a[t] - mu * b[t]`.
pub(crate) fn sigmoid_design(y: &[f64], pi: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let wy: Vec<f64> = y.iter().zip(w.iter()).map(|(v, wu)| wu * v).collect();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for t in 0..n {
        let conv_y: f64 = pi[1..=t]
            .iter()
            .zip(wy[..t].iter().rev())
            .map(|(p, v)| p * v)
            .sum();
        let conv_w: f64 = pi[1..=t]
            .iter()
            .zip(w[..t].iter().rev())
            .map(|(p, v)| p * v)
            .sum();
        a.push(y[t] + conv_y);
        b.push(1.0 + conv_w);
    }
    (a, b)
}
