//! `t2cd fit`: estimate the change point and regime parameters of series
//! read from CSV, writing a JSON result document.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use t2cd_core::detect::{
    fit_fixed_tau, fit_multivariate, fit_sigmoid, fit_step, BaseEstimator, FitSettings,
    SigmoidConfig, StepSearchConfig,
};
use t2cd_core::model::{FitDocument, MultiFitDocument};
use t2cd_core::series::{read_series_csv_path, CandidateWindow, TimeSeries};
use t2cd_core::{Error, Result};

use crate::config::{parse_c_penalty, FitParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Step,
    Sigmoid,
    Fixed,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input series CSV (`time_hours` column plus one column per series).
    pub input: PathBuf,

    #[arg(long, value_enum)]
    pub method: Method,

    /// Candidate window start, hours.
    #[arg(long, default_value_t = 10.0)]
    pub tau_a: f64,

    /// Candidate window end, hours.
    #[arg(long, default_value_t = 50.0)]
    pub tau_b: f64,

    /// Change point for the fixed-τ baseline, hours.
    #[arg(long, default_value_t = 50.0)]
    pub tau: f64,

    /// Interior knot spacing of the mean spline, hours.
    #[arg(long, default_value_t = 1.0)]
    pub knots_f: f64,

    /// Interior knot spacing of the log-variance spline, hours.
    #[arg(long, default_value_t = 5.0)]
    pub knots_h: f64,

    #[arg(long, default_value_t = 3)]
    pub degree: usize,

    /// Window penalty for the sigmoid objective: a number or `auto`.
    #[arg(long, default_value = "1000")]
    pub c_penalty: String,

    /// Candidate grid step for the exhaustive search, hours (default:
    /// every sample).
    #[arg(long)]
    pub grid_step: Option<f64>,

    /// Pool all CSV columns with a shared long-memory order.
    #[arg(long)]
    pub multivariate: bool,

    /// Fit a single named column (default: the first).
    #[arg(long)]
    pub column: Option<String>,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn fit_params(args: &FitArgs) -> Result<FitParams> {
    Ok(FitParams {
        tau_a: args.tau_a,
        tau_b: args.tau_b,
        degree: args.degree,
        knots_f: args.knots_f,
        knots_h: args.knots_h,
        c_penalty: parse_c_penalty(&args.c_penalty)?,
        grid_step: args.grid_step,
    })
}

pub fn settings_from_params(params: &FitParams) -> Result<FitSettings> {
    let window = CandidateWindow::new(params.tau_a, params.tau_b)?;
    let mut settings = FitSettings::new(window);
    settings.degree = params.degree;
    settings.knot_spacing_f_hours = params.knots_f;
    settings.knot_spacing_h_hours = params.knots_h;
    Ok(settings)
}

pub fn step_config(params: &FitParams, parallel: bool) -> Result<StepSearchConfig> {
    let mut config = StepSearchConfig::new(CandidateWindow::new(params.tau_a, params.tau_b)?);
    config.settings = settings_from_params(params)?;
    config.tau_grid_step_hours = params.grid_step;
    config.parallel = parallel;
    Ok(config)
}

pub fn sigmoid_config(params: &FitParams) -> Result<SigmoidConfig> {
    let mut config = SigmoidConfig::new(CandidateWindow::new(params.tau_a, params.tau_b)?);
    config.settings = settings_from_params(params)?;
    config.c_penalty = params.c_penalty;
    Ok(config)
}

pub fn run(args: &FitArgs) -> Result<()> {
    let params = fit_params(args)?;
    let window = CandidateWindow::new(params.tau_a, params.tau_b)?;
    let ms = read_series_csv_path(&args.input)?;

    let json = if args.multivariate {
        let base = match args.method {
            Method::Step => BaseEstimator::Step(step_config(&params, true)?),
            Method::Sigmoid => BaseEstimator::Sigmoid(sigmoid_config(&params)?),
            Method::Fixed => {
                return Err(Error::InvalidConfig(
                    "the fixed-τ baseline has no multivariate pooling stage".into(),
                ))
            }
        };
        let fit = fit_multivariate(&ms, &base)?;
        MultiFitDocument::new(&fit, ms.series(), window)?.to_json()?
    } else {
        let ts = select_column(&ms, args.column.as_deref())?;
        let fit = match args.method {
            Method::Step => fit_step(ts, &step_config(&params, true)?)?,
            Method::Sigmoid => fit_sigmoid(ts, &sigmoid_config(&params)?)?,
            Method::Fixed => fit_fixed_tau(ts, args.tau, &settings_from_params(&params)?)?,
        };
        FitDocument::new(&fit, ts, window)?.to_json()?
    };
    std::fs::write(&args.out, json)?;
    Ok(())
}

pub fn select_column<'a>(
    ms: &'a t2cd_core::MultiSeries,
    column: Option<&str>,
) -> Result<&'a TimeSeries> {
    match column {
        None => Ok(&ms.series()[0]),
        Some(name) => ms
            .series()
            .iter()
            .find(|ts| ts.label() == Some(name))
            .ok_or_else(|| Error::InvalidInput(format!("no column named `{name}` in the CSV"))),
    }
}
