//! Recursive simulation of FI(d) and ARFIMA(1, d, 1) processes.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::weights::frac_weights;

/// Simulate an FI(d) process about `mu`: innovations are integrated
/// through the inverted fractional difference, starting from an empty
/// history. Deterministic given the seed.
pub fn simulate_fi(n: usize, d: f64, mu: f64, eps_sd: f64, seed: u64) -> Result<Vec<f64>> {
    let eps = gaussian_innovations(n, eps_sd, seed)?;
    Ok(fractional_integrate(&eps, d, mu))
}

/// Simulate an ARFIMA(1, d, 1) process about zero:
/// `(1 - phi B)(1 - B)^d y_t = (1 + theta_ma B) eps_t`. The ARMA filter is
/// applied to the innovations first and the result fractionally
/// integrated, which matches the operator composition exactly. With
/// `phi = theta_ma = 0` the stream is identical to [`simulate_fi`] at
/// `mu = 0` under the same seed.
pub fn simulate_arfima(
    n: usize,
    d: f64,
    phi: f64,
    theta_ma: f64,
    eps_sd: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(phi.abs() < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "autoregressive coefficient must satisfy |phi| < 1, got {phi}"
        )));
    }
    let eps = gaussian_innovations(n, eps_sd, seed)?;
    let mut arma = Vec::with_capacity(n);
    let mut prev_u = 0.0;
    let mut prev_e = 0.0;
    for &e in &eps {
        let u = phi * prev_u + e + theta_ma * prev_e;
        arma.push(u);
        prev_u = u;
        prev_e = e;
    }
    Ok(fractional_integrate(&arma, d, 0.0))
}

/// Invert `(1 - B)^d` against an innovation stream:
/// `y_t = mu - sum_{i=1}^{t} pi[i] (y[t-i] - mu) + innov[t]`.
pub(crate) fn fractional_integrate(innovations: &[f64], d: f64, mu: f64) -> Vec<f64> {
    let n = innovations.len();
    let pi = frac_weights(d, n).pi;
    let mut y = Vec::with_capacity(n);
    for (t, &e) in innovations.iter().enumerate() {
        let acc: f64 = pi[1..=t]
            .iter()
            .zip(y[..t].iter().rev())
            .map(|(p, v): (&f64, &f64)| p * (v - mu))
            .sum();
        y.push(mu - acc + e);
    }
    y
}

fn gaussian_innovations(n: usize, eps_sd: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidConfig("cannot simulate an empty series".into()));
    }
    if !(eps_sd > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "innovation standard deviation must be positive, got {eps_sd}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| eps_sd * rng.sample::<f64, _>(StandardNormal))
        .collect())
}
