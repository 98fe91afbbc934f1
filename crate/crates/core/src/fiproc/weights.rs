//! Fractional differencing weights and the autocorrelation asymptote.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Coefficients of the binomial expansion of `(1 - B)^d`:
/// `pi[i] = (-1)^i * C(d, i)`, built by the stable multiplicative
/// recursion `pi[i] = pi[i-1] * (i - 1 - d) / i` from `pi[0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracWeights {
    pub d: f64,
    pub pi: Vec<f64>,
}

impl FracWeights {
    /// Running sums `sum_{i<=u} pi[i]`; the coefficient of `-mu` in the
    /// truncated fractional difference.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pi
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

/// Weights up to lag `max_lag` inclusive.
pub fn frac_weights(d: f64, max_lag: usize) -> FracWeights {
    let mut pi = Vec::with_capacity(max_lag + 1);
    pi.push(1.0);
    for i in 1..=max_lag {
        let prev = pi[i - 1];
        pi.push(prev * ((i - 1) as f64 - d) / i as f64);
    }
    FracWeights { d, pi }
}

/// Large-lag autocorrelation of a stationary FI(d) process:
/// `Gamma(1 - d) / Gamma(d) * k^(2d - 1)`. Defined for `0 < d < 0.5`.
pub fn acf_asymptote(d: f64, k: usize) -> Result<f64> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "autocorrelation asymptote needs d in (0, 0.5), got {d}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("lag must be at least 1".into()));
    }
    Ok(gamma(1.0 - d) / gamma(d) * (k as f64).powf(2.0 * d - 1.0))
}
