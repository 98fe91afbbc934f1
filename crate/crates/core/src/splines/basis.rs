//! Clamped B-spline basis: knot vectors, Cox–de Boor evaluation,
//! derivatives, and exact Gram/penalty integrals.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Description of a clamped B-spline basis over an hour interval.
///
/// The knot vector repeats each domain endpoint `degree + 1` times around
/// the strictly increasing interior knots, so the basis has dimension
/// `interior_knots.len() + degree + 1` and satisfies partition of unity on
/// the closed domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineBasisSpec {
    pub degree: usize,
    pub interior_knots: Vec<f64>,
    pub domain: [f64; 2],
}

impl SplineBasisSpec {
    pub fn new(degree: usize, interior_knots: Vec<f64>, domain: [f64; 2]) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidConfig("spline degree must be >= 1".into()));
        }
        if !(domain[0] < domain[1]) {
            return Err(Error::InvalidConfig(format!(
                "spline domain must satisfy low < high, got [{}, {}]",
                domain[0], domain[1]
            )));
        }
        for pair in interior_knots.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::InvalidConfig(
                    "interior knots must be strictly increasing".into(),
                ));
            }
        }
        if interior_knots
            .iter()
            .any(|&k| !(k > domain[0] && k < domain[1]))
        {
            return Err(Error::InvalidConfig(
                "interior knots must lie strictly inside the domain".into(),
            ));
        }
        Ok(Self {
            degree,
            interior_knots,
            domain,
        })
    }

    /// Uniform interior knots every `spacing` hours, strictly inside `domain`.
    pub fn uniform(degree: usize, domain: [f64; 2], spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidConfig("knot spacing must be positive".into()));
        }
        let mut knots = Vec::new();
        // First multiple of `spacing` strictly above the left edge.
        let mut k = (domain[0] / spacing).floor() * spacing;
        while k <= domain[0] {
            k += spacing;
        }
        while k < domain[1] {
            knots.push(k);
            k += spacing;
        }
        Self::new(degree, knots, domain)
    }

    /// Basis dimension `Q + D + 1`.
    pub fn dim(&self) -> usize {
        self.interior_knots.len() + self.degree + 1
    }

    /// Full clamped knot vector.
    pub fn knot_vector(&self) -> Vec<f64> {
        let mut knots = Vec::with_capacity(self.interior_knots.len() + 2 * (self.degree + 1));
        knots.extend(std::iter::repeat(self.domain[0]).take(self.degree + 1));
        knots.extend_from_slice(&self.interior_knots);
        knots.extend(std::iter::repeat(self.domain[1]).take(self.degree + 1));
        knots
    }

    /// Restrict the spec to `[lo, hi]`, keeping interior knots strictly
    /// inside and thinning them until the basis dimension is at most
    /// `max_dim`. Used when fitting candidate trend ranges shorter than the
    /// full series.
    pub fn restricted(&self, lo: f64, hi: f64, max_dim: usize) -> Result<Self> {
        let mut knots: Vec<f64> = self
            .interior_knots
            .iter()
            .copied()
            .filter(|&k| k > lo && k < hi)
            .collect();
        while knots.len() + self.degree + 1 > max_dim.max(self.degree + 1) && !knots.is_empty() {
            // Drop every other knot, keeping the first.
            knots = knots.iter().copied().step_by(2).collect();
            if knots.len() + self.degree + 1 <= max_dim {
                break;
            }
            if knots.len() == 1 {
                knots.clear();
            }
        }
        Self::new(self.degree, knots, [lo, hi])
    }
}

/// Dense matrix of basis function values, one row per evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    pub values: DMatrix<f64>,
}

impl BasisMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Fitted values `X c`.
    pub fn apply(&self, coef: &[f64]) -> Vec<f64> {
        assert_eq!(coef.len(), self.ncols());
        (0..self.nrows())
            .map(|t| (0..self.ncols()).map(|j| self.values[(t, j)] * coef[j]).sum())
            .collect()
    }
}

/// Evaluate all basis functions of `spec` at each time; rows satisfy
/// partition of unity. Errors when a time lies outside the domain.
pub fn build_basis(spec: &SplineBasisSpec, times: &[f64]) -> Result<BasisMatrix> {
    let knots = spec.knot_vector();
    let dim = spec.dim();
    let mut values = DMatrix::zeros(times.len(), dim);
    for (row, &u) in times.iter().enumerate() {
        if !(u >= spec.domain[0] && u <= spec.domain[1]) {
            return Err(Error::OutOfSpan {
                hours: u,
                lo: spec.domain[0],
                hi: spec.domain[1],
            });
        }
        let b = eval_all(&knots, spec.degree, u);
        for (j, v) in b.iter().enumerate() {
            values[(row, j)] = *v;
        }
    }
    Ok(BasisMatrix { values })
}

/// All degree-`degree` basis function values at `u` over `knots`.
fn eval_all(knots: &[f64], degree: usize, u: f64) -> Vec<f64> {
    let m = knots.len();
    let mut b = vec![0.0; m - 1];
    b[locate_span(knots, u)] = 1.0;
    for q in 1..=degree {
        let n_q = m - q - 1;
        let mut next = vec![0.0; n_q];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            let d1 = knots[j + q] - knots[j];
            if d1 > 0.0 {
                acc += (u - knots[j]) / d1 * b[j];
            }
            let d2 = knots[j + q + 1] - knots[j + 1];
            if d2 > 0.0 {
                acc += (knots[j + q + 1] - u) / d2 * b[j + 1];
            }
            *slot = acc;
        }
        b = next;
    }
    b
}

/// All `order`-th derivatives of the degree-`degree` basis at `u`.
fn eval_all_derivative(knots: &[f64], degree: usize, u: f64, order: usize) -> Vec<f64> {
    if order == 0 {
        return eval_all(knots, degree, u);
    }
    if order > degree {
        return vec![0.0; knots.len() - degree - 1];
    }
    let mut vals = eval_all(knots, degree - order, u);
    for q in (degree - order + 1)..=degree {
        let n_q = knots.len() - q - 1;
        let mut next = vec![0.0; n_q];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            let d1 = knots[j + q] - knots[j];
            if d1 > 0.0 {
                acc += vals[j] / d1;
            }
            let d2 = knots[j + q + 1] - knots[j + 1];
            if d2 > 0.0 {
                acc -= vals[j + 1] / d2;
            }
            *slot = q as f64 * acc;
        }
        vals = next;
    }
    vals
}

/// Index of the half-open knot span containing `u`; the right domain edge
/// closes onto the last nondegenerate span.
fn locate_span(knots: &[f64], u: f64) -> usize {
    let m = knots.len();
    if u >= knots[m - 1] {
        // Last span with positive width.
        for j in (0..m - 1).rev() {
            if knots[j] < knots[j + 1] {
                return j;
            }
        }
        return 0;
    }
    let mut j = knots.partition_point(|&k| k <= u);
    j = j.saturating_sub(1);
    j
}

/// Exact integral matrix of products of `order`-th basis derivatives:
/// entry `(i, j)` is `∫ B_i^(order) B_j^(order) du` over the domain,
/// computed span by span with Gauss–Legendre rules exact for the piecewise
/// polynomial degree.
pub fn derivative_product_integral(spec: &SplineBasisSpec, order: usize) -> DMatrix<f64> {
    let knots = spec.knot_vector();
    let dim = spec.dim();
    let mut m = DMatrix::zeros(dim, dim);
    if order > spec.degree {
        return m;
    }
    // Product of two piecewise polynomials of degree D - order.
    let poly_degree = 2 * (spec.degree - order);
    let g = poly_degree / 2 + 1;
    let (nodes, weights) = gauss_legendre(g);
    for s in 0..knots.len() - 1 {
        let (a, b) = (knots[s], knots[s + 1]);
        if !(b > a) {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let u = mid + half * x;
            let vals = eval_all_derivative(&knots, spec.degree, u, order);
            let scale = w * half;
            // At most degree + 1 entries are nonzero; restrict the outer
            // product to that window.
            let lo = vals.iter().position(|v| *v != 0.0).unwrap_or(0);
            let hi = vals.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
            for i in lo..hi {
                for j in lo..hi {
                    m[(i, j)] += scale * vals[i] * vals[j];
                }
            }
        }
    }
    // Enforce exact symmetry against accumulation-order noise.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    m
}

/// Gauss–Legendre nodes and weights on [-1, 1] via Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Greville abscissae: the spline with coefficients `a + b * greville_i`
/// reproduces the affine function `a + b u` exactly.
pub fn greville_abscissae(spec: &SplineBasisSpec) -> Vec<f64> {
    let knots = spec.knot_vector();
    let d = spec.degree;
    (0..spec.dim())
        .map(|i| knots[i + 1..i + d + 1].iter().sum::<f64>() / d as f64)
        .collect()
}
