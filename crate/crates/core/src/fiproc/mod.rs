//! Fractionally integrated (FI) process tools.
//!
//! An FI(d) process satisfies `(1 - B)^d (y_t - mu) = eps_t` with backshift
//! operator `B` and real differencing order `d`. Everything here works off
//! the binomial expansion of `(1 - B)^d`: its coefficients give the
//! conditional mean of the next observation, the conditional Gaussian
//! likelihood of a segment, and (inverted) a recursive simulator.

mod fit;
mod likelihood;
mod mean;
mod simulate;
mod weights;

pub use fit::{fit_fi, fit_fi_both_ranges, D_RANGE_HIGH, D_RANGE_LOW};
pub use likelihood::{fi_loglik, NU2_FLOOR};
pub use mean::{fi_conditional_mean_sigmoid, fi_conditional_mean_step};
pub use simulate::{simulate_arfima, simulate_fi};
pub use weights::{acf_asymptote, frac_weights, FracWeights};

pub(crate) use mean::{sigmoid_design, sigmoid_residuals, step_design};
