//! `t2cd benchmark`: sweep scenario cells × methods, aggregating τ and d
//! errors and wall-clock runtimes into a CSV report.
//!
//! Work parallelizes across (cell, replicate) units with each individual
//! fit kept single-threaded, so per-fit runtimes are honest and the
//! aggregated estimates are byte-identical across reruns and worker
//! counts; runtime columns are wall-clock and vary run to run.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use t2cd_core::detect::{fit_fixed_tau, fit_sigmoid, fit_step};
use t2cd_core::simgen::{
    gen_scenario, subseed, EquilibriumModel, ScenarioSpec, STREAM_ARFIMA_PARAMS,
};
use t2cd_core::{Error, Result};

use crate::config::{sweep_from_config, EquilibriumSweep, KvConfig, SweepConfig};
use crate::commands::fit::{settings_from_params, sigmoid_config, step_config};
use crate::report::{quartiles, BenchmarkReport, BenchmarkRow, Quartiles};

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Sweep configuration (`key = value` lines).
    pub sweep: PathBuf,

    /// Comma-separated methods: step, sigmoid, fixedtau, truetau.
    #[arg(long, value_delimiter = ',', default_value = "step,sigmoid,fixedtau,truetau")]
    pub methods: Vec<String>,

    #[arg(long)]
    pub out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Step,
    Sigmoid,
    FixedTau,
    TrueTau,
}

impl Method {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "step" => Ok(Method::Step),
            "sigmoid" => Ok(Method::Sigmoid),
            "fixedtau" => Ok(Method::FixedTau),
            "truetau" => Ok(Method::TrueTau),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Method::Step => "step",
            Method::Sigmoid => "sigmoid",
            Method::FixedTau => "fixedtau",
            Method::TrueTau => "truetau",
        }
    }
}

/// One method's outcome on one replicate.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    tau_err: f64,
    d_abs_err: f64,
    runtime_s: f64,
    ok: bool,
}

pub fn run(args: &BenchmarkArgs) -> Result<()> {
    let cfg = KvConfig::from_path(&args.sweep)?;
    let sweep = sweep_from_config(&cfg)?;
    let methods = args
        .methods
        .iter()
        .map(|m| Method::parse(m))
        .collect::<Result<Vec<_>>>()?;

    if let Some(workers) = args.workers {
        // A sweep may be re-run in one process; ignore the error if the
        // global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }

    let report = run_sweep(&sweep, &methods)?;
    report.write_csv_path(&args.out)?;
    Ok(())
}

pub fn run_sweep(sweep: &SweepConfig, methods: &[Method]) -> Result<BenchmarkReport> {
    let cells: Vec<(f64, f64)> = sweep
        .taus
        .iter()
        .flat_map(|&tau| sweep.ds.iter().map(move |&d| (tau, d)))
        .collect();
    let units: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..sweep.reps).map(move |r| (c, r)))
        .collect();

    let outcomes: Vec<Vec<Outcome>> = units
        .par_iter()
        .map(|&(cell, rep)| run_unit(sweep, methods, cells[cell], cell, rep))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (c, &(tau, d)) in cells.iter().enumerate() {
        for (m, method) in methods.iter().enumerate() {
            let mut tau_errs = Vec::new();
            let mut d_errs = Vec::new();
            let mut runtimes = Vec::new();
            let mut failures = 0;
            for (u, &(cell, _)) in units.iter().enumerate() {
                if cell != c {
                    continue;
                }
                let o = outcomes[u][m];
                if o.ok {
                    tau_errs.push(o.tau_err);
                    d_errs.push(o.d_abs_err);
                    runtimes.push(o.runtime_s);
                } else {
                    failures += 1;
                }
            }
            let empty = Quartiles {
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
            };
            let runtime_mean = if runtimes.is_empty() {
                f64::NAN
            } else {
                runtimes.iter().sum::<f64>() / runtimes.len() as f64
            };
            rows.push(BenchmarkRow {
                tau_hours: tau,
                d,
                method: method.name().to_string(),
                reps: sweep.reps,
                failures,
                tau_err: quartiles(&tau_errs).unwrap_or(empty),
                d_abs_err: quartiles(&d_errs).unwrap_or(empty),
                runtime_s: quartiles(&runtimes).unwrap_or(empty),
                runtime_mean_s: runtime_mean,
            });
        }
    }
    Ok(BenchmarkReport { rows })
}

fn scenario_for(sweep: &SweepConfig, (tau, d): (f64, f64), cell: usize, rep: usize) -> ScenarioSpec {
    // A distinct scenario seed per cell keeps replicate streams disjoint
    // across cells; methods share the replicate's data (paired design).
    let cell_seed = subseed(sweep.seed, 100, cell as u64);
    let base = ScenarioSpec {
        t_len: sweep.t_len,
        horizon_hours: sweep.horizon_hours,
        tau_hours: vec![tau],
        d,
        trend: sweep.trend,
        equilibrium: EquilibriumModel::Fi,
        eps_sd: sweep.eps_sd,
        noise: sweep.noise,
        p: 1,
        seed: cell_seed,
    };
    let mut spec = base.replicate(rep as u64);
    spec.equilibrium = match sweep.equilibrium {
        EquilibriumSweep::Fi => EquilibriumModel::Fi,
        EquilibriumSweep::Arfima { phi, theta_ma } => EquilibriumModel::Arfima { phi, theta_ma },
        EquilibriumSweep::ArfimaRandom => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(subseed(spec.seed, STREAM_ARFIMA_PARAMS, 0));
            EquilibriumModel::Arfima {
                phi: rng.gen::<f64>(),
                theta_ma: rng.gen::<f64>(),
            }
        }
    };
    spec
}

fn run_unit(
    sweep: &SweepConfig,
    methods: &[Method],
    cell_params: (f64, f64),
    cell: usize,
    rep: usize,
) -> Result<Vec<Outcome>> {
    let spec = scenario_for(sweep, cell_params, cell, rep);
    let (ms, truth) = gen_scenario(&spec)?;
    let ts = &ms.series()[0];
    let true_tau = truth.taus_hours[0];

    let mut out = Vec::with_capacity(methods.len());
    for method in methods {
        let start = Instant::now();
        let fit = match method {
            Method::Step => {
                let mut config = step_config(&sweep.fit, false)?;
                config.parallel = false;
                fit_step(ts, &config)
            }
            Method::Sigmoid => fit_sigmoid(ts, &sigmoid_config(&sweep.fit)?),
            Method::FixedTau => {
                fit_fixed_tau(ts, sweep.fixed_tau, &settings_from_params(&sweep.fit)?)
            }
            Method::TrueTau => fit_fixed_tau(ts, true_tau, &settings_from_params(&sweep.fit)?),
        };
        let runtime_s = start.elapsed().as_secs_f64();
        out.push(match fit {
            Ok(fit) => Outcome {
                tau_err: fit.tau_hours - true_tau,
                d_abs_err: (fit.equilibrium.d - truth.d).abs(),
                runtime_s,
                ok: true,
            },
            Err(_) => Outcome {
                tau_err: f64::NAN,
                d_abs_err: f64::NAN,
                runtime_s,
                ok: false,
            },
        });
    }
    Ok(out)
}
