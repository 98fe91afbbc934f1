//! Small deterministic optimizers: golden-section search on an interval
//! and a box-constrained Nelder–Mead simplex.

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`. Stops when the bracket width drops below
/// `tol` or after `max_iters` shrink steps.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iters: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iters {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Scan `grid_points` equally spaced points on `[a, b]`, then refine with
/// golden-section search inside the cell bracketing the best point.
/// Returns the better of the scan winner and the refined point.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    grid_points: usize,
    tol: f64,
) -> (f64, f64) {
    let n = grid_points.max(2);
    let step = (b - a) / (n - 1) as f64;
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    let mut best_x = a;
    for i in 0..n {
        let x = a + i as f64 * step;
        let v = f(x);
        if v < best_f {
            best_f = v;
            best_i = i;
            best_x = x;
        }
    }
    let lo = a + best_i.saturating_sub(1) as f64 * step;
    let hi = (a + (best_i + 1) as f64 * step).min(b);
    let (x, v) = golden_section_min(&mut f, lo, hi, tol, 200);
    if v < best_f {
        (x, v)
    } else {
        (best_x, best_f)
    }
}

/// Controls for [`nelder_mead_min`]. `init_steps` sets the edge lengths of
/// the starting simplex per coordinate; `x_tols` are per-coordinate
/// absolute spreads below which the simplex counts as converged.
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    pub init_steps: Vec<f64>,
    pub x_tols: Vec<f64>,
}

/// Nelder–Mead minimization of `f` inside the box `[lower, upper]`.
///
/// Trial points are projected onto the box before evaluation, so `f` is
/// never called outside it. Ties are broken by vertex insertion order,
/// keeping runs deterministic.
pub fn nelder_mead_min<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    assert!(dim >= 1);
    assert_eq!(lower.len(), dim);
    assert_eq!(upper.len(), dim);
    assert_eq!(opts.init_steps.len(), dim);
    assert_eq!(opts.x_tols.len(), dim);

    let clamp = |x: &mut [f64]| {
        for i in 0..dim {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };

    // Initial simplex: the start plus a step along each axis, flipped when
    // the step would leave the box.
    let mut start = x0.to_vec();
    clamp(&mut start);
    let mut vertices: Vec<Vec<f64>> = vec![start.clone()];
    for i in 0..dim {
        let mut v = start.clone();
        let step = opts.init_steps[i].abs().max(1e-12);
        if v[i] + step <= upper[i] {
            v[i] += step;
        } else {
            v[i] -= step;
        }
        clamp(&mut v);
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| f(v)).collect();

    let order = |values: &[f64]| {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        idx
    };

    for _ in 0..opts.max_iters {
        let idx = order(&values);
        let best = idx[0];
        let worst = idx[dim];
        let second_worst = idx[dim - 1];

        let converged = (0..dim).all(|i| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for v in &vertices {
                lo = lo.min(v[i]);
                hi = hi.max(v[i]);
            }
            hi - lo <= opts.x_tols[i]
        });
        if converged {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for &j in idx.iter().take(dim) {
            for i in 0..dim {
                centroid[i] += vertices[j][i];
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |t: f64| -> Vec<f64> {
            let mut x = vec![0.0; dim];
            for i in 0..dim {
                x[i] = centroid[i] + t * (centroid[i] - vertices[worst][i]);
            }
            clamp(&mut x);
            x
        };

        let reflected = blend(1.0);
        let f_r = f(&reflected);
        if f_r < values[best] {
            let expanded = blend(2.0);
            let f_e = f(&expanded);
            if f_e < f_r {
                vertices[worst] = expanded;
                values[worst] = f_e;
            } else {
                vertices[worst] = reflected;
                values[worst] = f_r;
            }
        } else if f_r < values[second_worst] {
            vertices[worst] = reflected;
            values[worst] = f_r;
        } else {
            let contracted = if f_r < values[worst] {
                blend(0.5)
            } else {
                blend(-0.5)
            };
            let f_c = f(&contracted);
            if f_c < values[worst].min(f_r) {
                vertices[worst] = contracted;
                values[worst] = f_c;
            } else {
                // Shrink toward the best vertex.
                let best_vertex = vertices[best].clone();
                for (j, v) in vertices.iter_mut().enumerate() {
                    if j == best {
                        continue;
                    }
                    for i in 0..dim {
                        v[i] = best_vertex[i] + 0.5 * (v[i] - best_vertex[i]);
                    }
                    clamp(v);
                    values[j] = f(v);
                }
            }
        }
    }

    let idx = order(&values);
    (vertices[idx[0]].clone(), values[idx[0]])
}
