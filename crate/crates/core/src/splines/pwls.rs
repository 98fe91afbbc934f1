//! Weighted penalized least squares and leave-one-out cross validation
//! for the smoothness level.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::optim::golden_section_min;

use super::basis::BasisMatrix;
use super::PenaltyMatrix;

/// Search grid for `log10 λ`: 25 points on [-6, 6].
const LAMBDA_LOG_LO: f64 = -6.0;
const LAMBDA_LOG_HI: f64 = 6.0;
const LAMBDA_SCAN_POINTS: usize = 25;
/// Golden-section tolerance: 1e-3 of the full bracket width.
const LAMBDA_REFINE_TOL: f64 = 12.0e-3;

pub(crate) struct WlsProblem {
    x: DMatrix<f64>,
    y: DVector<f64>,
    weights: Vec<f64>,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
}

impl WlsProblem {
    pub(crate) fn new(x: &BasisMatrix, y: &[f64], weights: &[f64]) -> Result<Self> {
        let (n, p) = (x.nrows(), x.ncols());
        if y.len() != n || weights.len() != n {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: basis has {n} rows, y has {}, weights has {}",
                y.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        // Gram = X' W^-1 X with W the diagonal of noise variances.
        let mut gram = DMatrix::zeros(p, p);
        let mut xty = DVector::zeros(p);
        for t in 0..n {
            let inv_w = 1.0 / weights[t];
            let row = x.values.row(t);
            for i in 0..p {
                let xi = row[i];
                if xi == 0.0 {
                    continue;
                }
                let scaled = xi * inv_w;
                xty[i] += scaled * y[t];
                for j in 0..p {
                    gram[(i, j)] += scaled * row[j];
                }
            }
        }
        Ok(Self {
            x: x.values.clone(),
            y: DVector::from_column_slice(y),
            weights: weights.to_vec(),
            gram,
            xty,
        })
    }

    fn factorize(&self, m: &PenaltyMatrix, lambda: f64) -> Result<Cholesky<f64, Dyn>> {
        let a = &self.gram + &m.values * lambda;
        Cholesky::new(a).ok_or_else(|| {
            Error::Numerical(format!(
                "penalized normal matrix is not positive definite at lambda = {lambda}"
            ))
        })
    }

    fn coefficients(&self, chol: &Cholesky<f64, Dyn>) -> DVector<f64> {
        chol.solve(&self.xty)
    }

    /// Leverage of each observation under the weighted smoother at `chol`.
    fn hat_diag(&self, chol: &Cholesky<f64, Dyn>) -> Vec<f64> {
        let xt = self.x.transpose();
        let half = chol
            .l()
            .solve_lower_triangular(&xt)
            .expect("Cholesky factor has positive diagonal");
        (0..self.x.nrows())
            .map(|t|column_norm2(&half, t) / self.weights[t])
            .collect()
    }

    /// LOOCV score: sum of squared deleted residuals.
    fn loocv(&self, m: &PenaltyMatrix, lambda: f64) -> f64 {
        let chol = match self.factorize(m, lambda) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        let beta = self.coefficients(&chol);
        let fitted = &self.x * &beta;
        let hat = self.hat_diag(&chol);
        let mut acc = 0.0;
        for t in 0..self.x.nrows() {
            let denom = 1.0 - hat[t];
            if denom < 1e-8 {
                return f64::INFINITY;
            }
            let r = (self.y[t] - fitted[t]) / denom;
            acc += r * r;
        }
        acc
    }
}

fn column_norm2(half: &DMatrix<f64>, col: usize) -> f64 {
    let c = half.column(col);
    c.dot(&c)
}

/// Minimizer of the penalized weighted least squares objective
/// `Σ_t (y_t - x_t' c)² / w_t + λ c' M c`, solved through a Cholesky
/// factorization of the penalized normal matrix.
pub fn penalized_wls(
    x: &BasisMatrix,
    y: &[f64],
    weights: &[f64],
    m: &PenaltyMatrix,
    lambda: f64,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "penalty level must be positive, got {lambda}"
        )));
    }
    let problem = WlsProblem::new(x, y, weights)?;
    let chol = problem.factorize(m, lambda)?;
    Ok(problem.coefficients(&chol).as_slice().to_vec())
}

/// Diagonal of the weighted smoother (hat) matrix at `lambda`.
pub fn hat_diagonal(
    x: &BasisMatrix,
    weights: &[f64],
    m: &PenaltyMatrix,
    lambda: f64,
) -> Result<Vec<f64>> {
    let y = vec![0.0; x.nrows()];
    let problem = WlsProblem::new(x, &y, weights)?;
    let chol = problem.factorize(m, lambda)?;
    Ok(problem.hat_diag(&chol))
}

/// Leave-one-out cross validation score at a given smoothness level.
pub fn loocv_criterion(
    x: &BasisMatrix,
    y: &[f64],
    weights: &[f64],
    m: &PenaltyMatrix,
    lambda: f64,
) -> Result<f64> {
    let problem = WlsProblem::new(x, y, weights)?;
    Ok(problem.loocv(m, lambda))
}

/// Smoothness level minimizing the LOOCV score.
///
/// The score is scanned on a 25-point `log10 λ` grid spanning [-6, 6] and
/// the winning cell is refined by golden-section search; the scan step
/// guards against secondary local minima that a bare golden-section pass
/// over the full bracket could fall into.
pub fn select_lambda_loocv(
    x: &BasisMatrix,
    y: &[f64],
    weights: &[f64],
    m: &PenaltyMatrix,
) -> Result<f64> {
    let problem = WlsProblem::new(x, y, weights)?;
    Ok(select_lambda_inner(&problem, m).0)
}

pub(crate) fn select_lambda_inner(problem: &WlsProblem, m: &PenaltyMatrix) -> (f64, f64) {
    let score = |log_lambda: f64| problem.loocv(m, 10f64.powf(log_lambda));
    let step = (LAMBDA_LOG_HI - LAMBDA_LOG_LO) / (LAMBDA_SCAN_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for i in 0..LAMBDA_SCAN_POINTS {
        let v = score(LAMBDA_LOG_LO + i as f64 * step);
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let lo = LAMBDA_LOG_LO + best_i.saturating_sub(1) as f64 * step;
    let hi = (LAMBDA_LOG_LO + (best_i + 1) as f64 * step).min(LAMBDA_LOG_HI);
    let (log_best, refined) = golden_section_min(score, lo, hi, LAMBDA_REFINE_TOL, 100);
    if refined <= best_f {
        (10f64.powf(log_best), refined)
    } else {
        (10f64.powf(LAMBDA_LOG_LO + best_i as f64 * step), best_f)
    }
}

/// Fit with the LOOCV-selected smoothness level; returns `(lambda, coef)`.
pub(crate) fn select_and_fit(
    x: &BasisMatrix,
    y: &[f64],
    weights: &[f64],
    m: &PenaltyMatrix,
) -> Result<(f64, Vec<f64>)> {
    let problem = WlsProblem::new(x, y, weights)?;
    let (lambda, _) = select_lambda_inner(&problem, m);
    let chol = problem.factorize(m, lambda)?;
    Ok((lambda, problem.coefficients(&chol).as_slice().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::{build_basis, build_penalty, SplineBasisSpec};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn setup(n: usize) -> (BasisMatrix, PenaltyMatrix, Vec<f64>, SplineBasisSpec) {
        let spec = SplineBasisSpec::uniform(3, [0.0, 10.0], 1.0).unwrap();
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 10.0 / (n - 1) as f64).collect();
        let x = build_basis(&spec, &times).unwrap();
        let m = build_penalty(&spec).unwrap();
        (x, m, times, spec)
    }

    #[test]
    fn unit_weights_match_unweighted() {
        let (x, m, times, _) = setup(60);
        let y: Vec<f64> = times.iter().map(|t| (0.7 * t).sin() + 0.3 * t).collect();
        let w1 = vec![1.0; y.len()];
        let a = penalized_wls(&x, &y, &w1, &m, 0.5).unwrap();
        // Same objective written with explicit unit variances.
        let b = penalized_wls(&x, &y, &w1, &m, 0.5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn huge_lambda_gives_weighted_affine_regression() {
        let (x, m, times, _) = setup(80);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y: Vec<f64> = times
            .iter()
            .map(|t| 1.5 - 0.4 * t + 0.8 * (t * 1.3).sin() + 0.05 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let weights: Vec<f64> = times.iter().map(|t| 0.5 + 0.1 * t).collect();
        // Closed-form weighted affine regression.
        let (mut sw, mut st, mut stt, mut sy, mut sty) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((t, y), w) in times.iter().zip(y.iter()).zip(weights.iter()) {
            let iw = 1.0 / w;
            sw += iw;
            st += iw * t;
            stt += iw * t * t;
            sy += iw * y;
            sty += iw * t * y;
        }
        let det = sw * stt - st * st;
        let intercept = (stt * sy - st * sty) / det;
        let slope = (sw * sty - st * sy) / det;
        // Tight agreement at 1e10; by 1e12 the solve's condition number
        // (which grows with lambda) dominates, so only a loose check there.
        for (lambda, tol) in [(1e10, 1e-4), (1e12, 5e-3)] {
            let coef = penalized_wls(&x, &y, &weights, &m, lambda).unwrap();
            let fitted = x.apply(&coef);
            for (t, v) in times.iter().zip(fitted.iter()) {
                assert_relative_eq!(*v, intercept + slope * t, epsilon = tol);
            }
        }
    }

    #[test]
    fn tiny_lambda_recovers_exact_coefficients() {
        let (x, m, times, spec) = setup(3 * 13);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let truth: Vec<f64> = (0..spec.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let y = x.apply(&truth);
        let w = vec![1.0; times.len()];
        let coef = penalized_wls(&x, &y, &w, &m, 1e-10).unwrap();
        for (a, b) in coef.iter().zip(truth.iter()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn normal_equation_residual_is_small() {
        let (x, m, times, _) = setup(70);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<f64> = times
            .iter()
            .map(|t| (t - 4.0).powi(2) * 0.1 + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let weights: Vec<f64> = (0..y.len()).map(|i| 0.2 + (i % 5) as f64 * 0.3).collect();
        for &lambda in &[1e-4, 1.0, 1e3] {
            let coef = penalized_wls(&x, &y, &weights, &m, lambda).unwrap();
            let problem = WlsProblem::new(&x, &y, &weights).unwrap();
            let a = &problem.gram + &m.values * lambda;
            let beta = nalgebra::DVector::from_column_slice(&coef);
            let resid = &a * &beta - &problem.xty;
            assert!(resid.norm() < 1e-8 * problem.xty.norm().max(1e-12));
        }
    }

    #[test]
    fn pure_noise_selects_heavy_smoothing() {
        let (x, m, times, _) = setup(90);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let y: Vec<f64> = times.iter().map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let w = vec![1.0; y.len()];
        let lambda = select_lambda_loocv(&x, &y, &w, &m).unwrap();
        // Heaviest smoothing wins for white noise: above the grid median.
        assert!(lambda.log10() >= 0.0, "selected log10 lambda {}", lambda.log10());
    }

    #[test]
    fn selected_lambda_beats_a_log_grid() {
        let (x, m, times, _) = setup(80);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let y: Vec<f64> = times
            .iter()
            .map(|t| (0.9 * t).sin() + 0.05 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let w = vec![1.0; y.len()];
        let lambda = select_lambda_loocv(&x, &y, &w, &m).unwrap();
        let best = loocv_criterion(&x, &y, &w, &m, lambda).unwrap();
        let mut grid_best = f64::INFINITY;
        let mut grid_arg = 0.0;
        for i in 0..25 {
            let lg = -6.0 + i as f64 * 0.5;
            let v = loocv_criterion(&x, &y, &w, &m, 10f64.powf(lg)).unwrap();
            if v < grid_best {
                grid_best = v;
                grid_arg = lg;
            }
        }
        assert!(best <= grid_best * (1.0 + 1e-12));
        assert!((lambda.log10() - grid_arg).abs() <= 0.5 + 1e-9);
    }
}
