//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with the measured numbers (run with `--nocapture` to see
//! them). The Monte Carlo criteria parallelize across replicates and keep
//! every individual fit single-threaded, so medians are reproducible and
//! runtimes honest.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use t2cd_core::classify::{
    leave_one_group_out, rda_fit, rda_fit_with_ridge, FeatureVector,
};
use t2cd_core::detect::{
    fit_fixed_tau, fit_multivariate, fit_sigmoid, fit_step, BaseEstimator, FitSettings,
    SigmoidConfig, StepSearchConfig,
};
use t2cd_core::fiproc::{fit_fi, frac_weights, simulate_fi};
use t2cd_core::model::FitDocument;
use t2cd_core::series::{CandidateWindow, TimeSeries};
use t2cd_core::simgen::{
    gen_scenario, subseed, EquilibriumModel, ScenarioSpec, STREAM_ARFIMA_PARAMS,
};
use t2cd_core::splines::{
    build_basis, build_penalty, fit_fgls, greville_abscissae, loocv_criterion,
    select_lambda_loocv, FglsControls, SplineBasisSpec, VarianceModel,
};

fn median(values: &mut Vec<f64>) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn window() -> CandidateWindow {
    CandidateWindow::new(10.0, 50.0).unwrap()
}

fn serial_step_config(grid_step: Option<f64>) -> StepSearchConfig {
    let mut config = StepSearchConfig::new(window());
    config.tau_grid_step_hours = grid_step;
    config.parallel = false;
    config
}

/// Criterion 1: the multiplicative weight recursion matches the
/// Gamma-function form to 1e-10 relative across orders and lags, in
/// under a second.
#[test]
fn c01_fractional_weight_recursion_matches_gamma_form() {
    let start = Instant::now();
    let mut max_rel = 0.0_f64;
    for &d in &[-0.45, -0.25, 0.25, 0.75, 1.25, 1.45] {
        let w = frac_weights(d, 100);
        let gamma_neg_d = gamma(-d);
        for i in 1..=100usize {
            let reference = gamma(i as f64 - d) / (gamma(i as f64 + 1.0) * gamma_neg_d);
            let rel = (w.pi[i] - reference).abs() / reference.abs().max(1e-300);
            max_rel = max_rel.max(rel);
        }
    }
    let elapsed = start.elapsed();
    assert!(max_rel < 1e-10, "max relative error {max_rel}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("C01 weight recursion vs Gamma form: PASS (max rel err {max_rel:.2e}, {elapsed:?})");
}

/// Criterion 2: with the change point known, the dual-range likelihood
/// fit recovers the long-memory order on average: 100 replicates of
/// length 350 give mean(d_hat) within 0.10 of 0.25 and within 0.15
/// of 0.95.
#[test]
fn c02_long_memory_estimation_at_known_change_point() {
    let start = Instant::now();
    let mut lines = Vec::new();
    for (d_true, tol, seed0) in [(0.25, 0.10, 20_000u64), (0.95, 0.15, 21_000u64)] {
        let estimates: Vec<f64> = (0..100u64)
            .into_par_iter()
            .map(|rep| {
                let y = simulate_fi(350, d_true, 0.0, 0.5, seed0 + rep).unwrap();
                fit_fi(&y, 0).unwrap().d
            })
            .collect();
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        assert!(
            (mean - d_true).abs() <= tol,
            "mean d_hat {mean} vs {d_true} (tol {tol})"
        );
        lines.push(format!("d={d_true}: mean {mean:.3} (tol ±{tol})"));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!("C02 known-τ d recovery: PASS ({}; {elapsed:?})", lines.join("; "));
}

fn tau_errors_for(
    d: f64,
    tau_hours: f64,
    reps: u64,
    seed0: u64,
    equilibrium: Option<u64>, // when set, random ARFIMA coefficients per replicate
) -> (Vec<f64>, Vec<f64>) {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut spec = ScenarioSpec::univariate_gp(tau_hours, d, seed0).replicate(rep);
            if equilibrium.is_some() {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(subseed(spec.seed, STREAM_ARFIMA_PARAMS, 0));
                spec.equilibrium = EquilibriumModel::Arfima {
                    phi: rng.gen::<f64>(),
                    theta_ma: rng.gen::<f64>(),
                };
            }
            let (ms, truth) = gen_scenario(&spec).unwrap();
            let ts = &ms.series()[0];
            let step = fit_step(ts, &serial_step_config(None)).unwrap();
            let sigmoid = fit_sigmoid(ts, &SigmoidConfig::new(window())).unwrap();
            (
                step.tau_hours - truth.taus_hours[0],
                sigmoid.tau_hours - truth.taus_hours[0],
            )
        })
        .unzip()
}

/// Criterion 3: at strongly stationary d the change point is recovered
/// well by both estimators — median |τ_hat − τ| within 2 hours over 50
/// replicates of the standard scenario at τ = 20 h, d = -0.25.
#[test]
fn c03_change_point_recovery_small_d() {
    let start = Instant::now();
    let (step_errs, sigmoid_errs) = tau_errors_for(-0.25, 20.0, 50, 30_000, None);
    let mut step_abs: Vec<f64> = step_errs.iter().map(|e| e.abs()).collect();
    let mut sigmoid_abs: Vec<f64> = sigmoid_errs.iter().map(|e| e.abs()).collect();
    let (med_step, med_sigmoid) = (median(&mut step_abs), median(&mut sigmoid_abs));
    let elapsed = start.elapsed();
    assert!(med_step <= 2.0, "step median |tau err| {med_step} h");
    assert!(med_sigmoid <= 2.0, "sigmoid median |tau err| {med_sigmoid} h");
    assert!(elapsed.as_secs_f64() < 1800.0, "took {elapsed:?}");
    println!(
        "C03 τ recovery at d=-0.25: PASS (median |err| step {med_step:.2} h, sigmoid {med_sigmoid:.2} h; {elapsed:?})"
    );
}

/// Criterion 4: at strongly nonstationary d the exhaustive search
/// overestimates the change point and the smooth transition is less
/// biased: over 50 paired replicates at d = 1.35, τ = 25 h, the step
/// median signed error exceeds the sigmoid's and is positive.
#[test]
fn c04_step_overestimates_at_large_d() {
    let start = Instant::now();
    let (mut step_errs, mut sigmoid_errs) = tau_errors_for(1.35, 25.0, 50, 40_000, None);
    let med_step = median(&mut step_errs);
    let med_sigmoid = median(&mut sigmoid_errs);
    let elapsed = start.elapsed();
    assert!(
        med_step > med_sigmoid,
        "step median {med_step} h not above sigmoid {med_sigmoid} h"
    );
    assert!(med_step > 0.0, "step median {med_step} h not positive");
    println!(
        "C04 bias ordering at d=1.35: PASS (median err step {med_step:+.2} h > sigmoid {med_sigmoid:+.2} h; {elapsed:?})"
    );
}

/// Criterion 5: for early change points the searched split estimates d at
/// least as well as the conservative fixed split at 50 h, in median, at
/// both d = -0.25 and d = 0.95 (τ = 15 h, 50 replicates each).
#[test]
fn c05_d_estimation_beats_fixed_tau_for_early_change_points() {
    let start = Instant::now();
    let settings = FitSettings::new(window());
    let mut lines = Vec::new();
    for (d_true, seed0) in [(-0.25, 50_000u64), (0.95, 51_000u64)] {
        let errs: Vec<(f64, f64)> = (0..50u64)
            .into_par_iter()
            .map(|rep| {
                let spec = ScenarioSpec::univariate_gp(15.0, d_true, seed0).replicate(rep);
                let (ms, truth) = gen_scenario(&spec).unwrap();
                let ts = &ms.series()[0];
                let step = fit_step(ts, &serial_step_config(None)).unwrap();
                let fixed = fit_fixed_tau(ts, 50.0, &settings).unwrap();
                (
                    (step.equilibrium.d - truth.d).abs(),
                    (fixed.equilibrium.d - truth.d).abs(),
                )
            })
            .collect();
        let mut step_errs: Vec<f64> = errs.iter().map(|e| e.0).collect();
        let mut fixed_errs: Vec<f64> = errs.iter().map(|e| e.1).collect();
        let med_step = median(&mut step_errs);
        let med_fixed = median(&mut fixed_errs);
        assert!(
            med_step <= med_fixed,
            "d={d_true}: step median |d err| {med_step} above fixed {med_fixed}"
        );
        lines.push(format!(
            "d={d_true}: step {med_step:.3} <= fixed {med_fixed:.3}"
        ));
    }
    let elapsed = start.elapsed();
    println!("C05 early-τ d accuracy vs fixed split: PASS ({}; {elapsed:?})", lines.join("; "));
}

/// Criterion 6: pooling three series with a shared long-memory order is
/// at least as accurate, in median, as the univariate estimates it
/// started from (τ = {15, 25, 45} h, d ∈ {0.15, 0.95}, 50 replicates).
#[test]
fn c06_multivariate_pooling_reduces_d_error() {
    let start = Instant::now();
    // The candidate grid runs at two-sample resolution here: the pooled
    // and univariate estimates share it, and d accuracy is insensitive to
    // sub-hour τ resolution.
    let grid = Some(0.35);
    let mut lines = Vec::new();
    for (d_true, seed0) in [(0.15, 60_000u64), (0.95, 61_000u64)] {
        let errs: Vec<(f64, Vec<f64>)> = (0..50u64)
            .into_par_iter()
            .map(|rep| {
                let mut spec = ScenarioSpec::univariate_gp(15.0, d_true, seed0).replicate(rep);
                spec.p = 3;
                spec.tau_hours = vec![15.0, 25.0, 45.0];
                let (ms, truth) = gen_scenario(&spec).unwrap();
                let base = BaseEstimator::Step(serial_step_config(grid));
                let pooled = fit_multivariate(&ms, &base).unwrap();
                let uni_errs: Vec<f64> = pooled
                    .univariate_d
                    .iter()
                    .map(|d| (d - truth.d).abs())
                    .collect();
                ((pooled.d_shared - truth.d).abs(), uni_errs)
            })
            .collect();
        let mut shared: Vec<f64> = errs.iter().map(|e| e.0).collect();
        let mut univariate: Vec<f64> = errs.iter().flat_map(|e| e.1.iter().copied()).collect();
        let med_shared = median(&mut shared);
        let med_uni = median(&mut univariate);
        assert!(
            med_shared <= med_uni,
            "d={d_true}: pooled median {med_shared} above univariate {med_uni}"
        );
        lines.push(format!(
            "d={d_true}: pooled {med_shared:.3} <= univariate {med_uni:.3}"
        ));
    }
    let elapsed = start.elapsed();
    println!("C06 pooled d accuracy: PASS ({}; {elapsed:?})", lines.join("; "));
}

/// Criterion 7: the smooth-transition estimator is much cheaper than the
/// exhaustive search — mean per-series wall time at most 0.3 of the
/// step search at full index resolution on T = 400 series.
#[test]
fn c07_runtime_ordering() {
    let reps = 3u64;
    let mut step_total = 0.0;
    let mut sigmoid_total = 0.0;
    for rep in 0..reps {
        let spec = ScenarioSpec::univariate_gp(25.0, 0.25, 70_000).replicate(rep);
        let (ms, _) = gen_scenario(&spec).unwrap();
        let ts = &ms.series()[0];
        let t0 = Instant::now();
        let _ = fit_step(ts, &serial_step_config(None)).unwrap();
        step_total += t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let _ = fit_sigmoid(ts, &SigmoidConfig::new(window())).unwrap();
        sigmoid_total += t1.elapsed().as_secs_f64();
    }
    let (step_mean, sigmoid_mean) = (step_total / reps as f64, sigmoid_total / reps as f64);
    let ratio = sigmoid_mean / step_mean;
    assert!(
        ratio <= 0.3,
        "sigmoid/step runtime ratio {ratio:.3} (sigmoid {sigmoid_mean:.2}s, step {step_mean:.2}s)"
    );
    println!(
        "C07 runtime ordering: PASS (step {step_mean:.2} s, sigmoid {sigmoid_mean:.2} s, ratio {ratio:.3})"
    );
}

/// Criterion 8: τ recovery is robust to short-memory misspecification of
/// the equilibrium — with random ARFIMA coefficients at d = -0.25 the
/// median |τ_hat − τ| stays within 4 hours for both estimators.
#[test]
fn c08_arfima_robustness() {
    let start = Instant::now();
    let (step_errs, sigmoid_errs) = tau_errors_for(-0.25, 20.0, 50, 80_000, Some(1));
    let mut step_abs: Vec<f64> = step_errs.iter().map(|e| e.abs()).collect();
    let mut sigmoid_abs: Vec<f64> = sigmoid_errs.iter().map(|e| e.abs()).collect();
    let (med_step, med_sigmoid) = (median(&mut step_abs), median(&mut sigmoid_abs));
    let elapsed = start.elapsed();
    assert!(med_step <= 4.0, "step median |tau err| {med_step} h");
    assert!(med_sigmoid <= 4.0, "sigmoid median |tau err| {med_sigmoid} h");
    println!(
        "C08 ARFIMA robustness: PASS (median |err| step {med_step:.2} h, sigmoid {med_sigmoid:.2} h; {elapsed:?})"
    );
}

/// Criterion 9: spline and FGLS property suite on 1000 randomized cases
/// per property.
#[test]
fn c09_spline_and_fgls_property_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(90_000);

    // Partition of unity at random specs and evaluation points.
    let mut max_unity_gap = 0.0_f64;
    for _ in 0..1000 {
        let spec = random_spec(&mut rng);
        let u = rng.gen_range(spec.domain[0]..=spec.domain[1]);
        let basis = build_basis(&spec, &[u]).unwrap();
        let sum: f64 = (0..basis.ncols()).map(|j| basis.values[(0, j)]).sum();
        max_unity_gap = max_unity_gap.max((sum - 1.0).abs());
    }
    assert!(max_unity_gap < 1e-12, "partition of unity gap {max_unity_gap}");

    // Penalty positive semidefiniteness and affine null space.
    let mut min_quadratic = f64::INFINITY;
    let mut max_affine = 0.0_f64;
    for case in 0..1000 {
        let spec = random_spec(&mut rng);
        let penalty = build_penalty(&spec).unwrap();
        if case % 2 == 0 {
            let coef: Vec<f64> = (0..spec.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            min_quadratic = min_quadratic.min(penalty.quadratic_form(&coef));
        } else {
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5));
            let mut coef: Vec<f64> = greville_abscissae(&spec).iter().map(|g| a + b * g).collect();
            // The null-space property is scale-free; unit-normalize so the
            // float-cancellation floor stays comparable across cases.
            let peak = coef.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            if peak > 0.0 {
                for c in coef.iter_mut() {
                    *c /= peak;
                }
            }
            max_affine = max_affine.max(penalty.quadratic_form(&coef).abs());
        }
    }
    assert!(min_quadratic >= -1e-10, "penalty quadratic form dipped to {min_quadratic}");
    assert!(max_affine < 1e-10, "affine null space violated: {max_affine}");

    // FGLS idempotence under a constant variance model: the second pass
    // must not move the fitted means.
    let mut max_idem = 0.0_f64;
    for case in 0..1000u64 {
        let n = 60;
        let mut case_rng = ChaCha8Rng::seed_from_u64(91_000 + case);
        let dt = 0.2;
        let values: Vec<f64> = (0..n)
            .map(|t| {
                let h = t as f64 * dt;
                (0.8 * h).sin() * 2.0 + 0.4 * case_rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        let ts = TimeSeries::new(values, 0.0, dt, None).unwrap();
        let hi = ts.time_of(n - 1);
        let spec_f = SplineBasisSpec::uniform(3, [0.0, hi], 1.5).unwrap();
        let spec_h = SplineBasisSpec::uniform(3, [0.0, hi], 4.0).unwrap();
        let once = FglsControls { max_iters: 1, variance: VarianceModel::Constant, ..Default::default() };
        let twice = FglsControls { max_iters: 2, variance: VarianceModel::Constant, ..Default::default() };
        let a = fit_fgls(&ts, 0..n, &spec_f, &spec_h, &once).unwrap();
        let b = fit_fgls(&ts, 0..n, &spec_f, &spec_h, &twice).unwrap();
        let times = ts.times();
        let ma = a.mean_at(&times).unwrap();
        let mb = b.mean_at(&times).unwrap();
        let scale = ma.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let delta = ma.iter().zip(mb.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
        max_idem = max_idem.max(delta / scale);
    }
    assert!(max_idem < 1e-8, "FGLS idempotence violated: {max_idem}");

    // LOOCV selection lands within one grid bracket of a 25-point scan.
    let mut max_gap_cells = 0.0_f64;
    for case in 0..1000u64 {
        let n = 60;
        let mut case_rng = ChaCha8Rng::seed_from_u64(92_000 + case);
        let freq = case_rng.gen_range(0.2..1.4);
        let noise = case_rng.gen_range(0.02..0.6);
        let times: Vec<f64> = (0..n).map(|t| t as f64 * 10.0 / (n - 1) as f64).collect();
        let y: Vec<f64> = times
            .iter()
            .map(|t| (freq * t).sin() + noise * case_rng.sample::<f64, _>(StandardNormal))
            .collect();
        let spec = SplineBasisSpec::uniform(3, [0.0, 10.0], 1.0).unwrap();
        let basis = build_basis(&spec, &times).unwrap();
        let penalty = build_penalty(&spec).unwrap();
        let weights = vec![1.0; n];
        let lambda = select_lambda_loocv(&basis, &y, &weights, &penalty).unwrap();
        let mut best = (0.0_f64, f64::INFINITY);
        for i in 0..25 {
            let lg = -6.0 + 0.5 * i as f64;
            let crit = loocv_criterion(&basis, &y, &weights, &penalty, 10f64.powf(lg)).unwrap();
            if crit < best.1 {
                best = (lg, crit);
            }
        }
        max_gap_cells = max_gap_cells.max((lambda.log10() - best.0).abs() / 0.5);
    }
    assert!(
        max_gap_cells <= 1.0 + 1e-9,
        "LOOCV selection {max_gap_cells} grid cells from the scan argmin"
    );

    let elapsed = start.elapsed();
    println!(
        "C09 spline/FGLS properties: PASS (unity {max_unity_gap:.1e}, psd min {min_quadratic:.1e}, affine {max_affine:.1e}, idempotence {max_idem:.1e}, loocv gap {max_gap_cells:.2} cells; {elapsed:?})"
    );
}

fn random_spec(rng: &mut ChaCha8Rng) -> SplineBasisSpec {
    let degree = rng.gen_range(2..=5);
    let lo = rng.gen_range(-5.0..0.0);
    let width = rng.gen_range(4.0..20.0);
    let hi = lo + width;
    let n_knots = rng.gen_range(0..12usize);
    // Keep knots separated the way real configurations are; nearly
    // coincident knots blow up the curvature scale 1/h^2 and with it the
    // float-cancellation floor of the quadratic form.
    let min_gap = width / 24.0;
    let mut knots: Vec<f64> = (0..n_knots)
        .map(|_| rng.gen_range(lo + min_gap..hi - min_gap))
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < min_gap);
    SplineBasisSpec::new(degree, knots, [lo, hi]).unwrap()
}

/// Criterion 10: classifier correctness — exact nearest-mean reduction
/// under spherical covariance at rho = 1, near-Bayes accuracy on a
/// separable Gaussian pair, the leave-one-group-out fold count, and
/// chance-level behavior under permuted labels.
#[test]
fn c10_classifier_correctness() {
    let start = Instant::now();
    let feature = |values: Vec<f64>, group: &str, class: &str| FeatureVector {
        names: vec!["x".into(), "y".into()],
        values,
        group: group.into(),
        class: class.into(),
    };

    // Exact reduction: symmetric cross-shaped classes have spherical
    // standardized covariances, so rho = 1 scores order by Euclidean
    // distance to the class means.
    let mut train = Vec::new();
    for (class, center) in [("a", (-2.0, -2.0)), ("b", (2.0, 2.0))] {
        for _ in 0..2 {
            for offset in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                train.push(feature(
                    vec![center.0 + offset.0, center.1 + offset.1],
                    "g",
                    class,
                ));
            }
        }
    }
    let model = rda_fit(&train, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(100_000);
    let mut checked = 0;
    for _ in 0..1000 {
        let z = feature(
            vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
            "g",
            "?",
        );
        let d_a = (z.values[0] + 2.0).powi(2) + (z.values[1] + 2.0).powi(2);
        let d_b = (z.values[0] - 2.0).powi(2) + (z.values[1] - 2.0).powi(2);
        if (d_a - d_b).abs() < 1e-9 {
            continue; // skip measure-zero ties
        }
        let oracle = if d_a < d_b { "a" } else { "b" };
        let (label, _) = model.classify(&z).unwrap();
        assert_eq!(label, oracle, "probe {:?}", z.values);
        checked += 1;
    }
    assert!(checked > 900);

    // Ridge-scale limit: decisions are ridge-independent away from
    // singularity.
    let low = rda_fit_with_ridge(&train, 1.0, 1e-10).unwrap();
    let mut agree = true;
    for _ in 0..200 {
        let z = feature(
            vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
            "g",
            "?",
        );
        agree &= model.classify(&z).unwrap().0 == low.classify(&z).unwrap().0;
    }
    assert!(agree, "ridge scale changed decisions");

    // Near-Bayes accuracy on a separable Gaussian pair.
    let mut gauss_train = Vec::new();
    let mut gauss_test = Vec::new();
    for (class, mx) in [("a", -2.0), ("b", 2.0)] {
        for i in 0..400 {
            let v = vec![
                mx + rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ];
            let fv = feature(v, "g", class);
            if i < 200 {
                gauss_train.push(fv);
            } else {
                gauss_test.push(fv);
            }
        }
    }
    let lda = rda_fit(&gauss_train, 1.0).unwrap();
    let correct = gauss_test
        .iter()
        .filter(|fv| lda.classify(fv).unwrap().0 == fv.class)
        .count();
    let accuracy = correct as f64 / gauss_test.len() as f64;
    assert!(accuracy >= 0.95, "held-out accuracy {accuracy}");

    // Fold count and permutation-null behavior.
    let mut labeled = Vec::new();
    for g in 0..4 {
        for i in 0..20 {
            let class = if rng.gen::<bool>() { "a" } else { "b" };
            labeled.push(FeatureVector {
                names: vec!["x".into(), "y".into()],
                values: vec![
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ],
                group: format!("e{g}"),
                class: class.into(),
            });
            let _ = i;
        }
    }
    let report = leave_one_group_out(&labeled, 1.0).unwrap();
    assert_eq!(report.folds.len(), 4, "expected one fold per group");
    assert!(
        (report.mean_accuracy - 0.5).abs() <= 0.15,
        "permutation-null accuracy {}",
        report.mean_accuracy
    );

    let elapsed = start.elapsed();
    println!(
        "C10 classifier correctness: PASS (nearest-mean exact on {checked} probes, accuracy {accuracy:.3}, null {:.3}; {elapsed:?})",
        report.mean_accuracy
    );
}

/// Criterion 11: the step objective decomposes exactly into its trend and
/// equilibrium components (checked through the serialized document), and
/// repeated runs of the parallel search reproduce the serial result.
#[test]
fn c11_objective_decomposition_and_determinism() {
    let start = Instant::now();
    let window = CandidateWindow::new(5.0, 60.0).unwrap();
    let settings = FitSettings::new(window);
    let mut max_gap = 0.0_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(110_000);
    for case in 0..100u64 {
        let d = rng.gen_range(-0.45..1.45);
        let tau = rng.gen_range(8.0..45.0);
        let spec = ScenarioSpec::univariate_gp(tau, d, 111_000 + case);
        let (ms, _) = gen_scenario(&spec).unwrap();
        let ts = &ms.series()[0];
        let split = rng.gen_range(10.0..50.0);
        let fit = fit_fixed_tau(ts, split, &settings).unwrap();
        // Recompute both components independently from the document.
        let doc = FitDocument::new(&fit, ts, window).unwrap();
        let back = FitDocument::from_json(&doc.to_json().unwrap()).unwrap();
        let restored = back.to_fit();
        let tau_index = back.tau_index;
        let times: Vec<f64> = (0..tau_index).map(|t| ts.time_of(t)).collect();
        let trend_ll = restored
            .trend
            .penalized_loglik(&times, &ts.values()[..tau_index])
            .unwrap();
        let eq_ll = t2cd_core::fiproc::fi_loglik(
            ts.values(),
            tau_index,
            restored.equilibrium.mu,
            restored.equilibrium.d,
            restored.equilibrium.nu2,
        )
        .unwrap();
        let gap = (restored.objective - (trend_ll + eq_ll)).abs();
        max_gap = max_gap.max(gap);
    }
    assert!(max_gap < 1e-10, "objective decomposition gap {max_gap}");

    // Parallel and serial searches agree exactly, run to run.
    let spec = ScenarioSpec::univariate_gp(20.0, 0.25, 112_000);
    let (ms, _) = gen_scenario(&spec).unwrap();
    let ts = &ms.series()[0];
    let mut config = StepSearchConfig::new(CandidateWindow::new(10.0, 50.0).unwrap());
    config.tau_grid_step_hours = Some(1.0);
    config.parallel = true;
    let a = fit_step(ts, &config).unwrap();
    let b = fit_step(ts, &config).unwrap();
    config.parallel = false;
    let c = fit_step(ts, &config).unwrap();
    assert_eq!(a, b, "parallel search not reproducible");
    assert_eq!(a, c, "parallel and serial searches disagree");

    let elapsed = start.elapsed();
    println!(
        "C11 decomposition and determinism: PASS (max gap {max_gap:.2e}; parallel == serial; {elapsed:?})"
    );
}
