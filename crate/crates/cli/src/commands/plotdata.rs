//! `t2cd plotdata`: emit the plain tables behind fit overlays, residual
//! diagnostics, transition curves, and benchmark summaries.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use t2cd_core::fiproc::{fi_conditional_mean_sigmoid, fi_conditional_mean_step};
use t2cd_core::model::FitDocument;
use t2cd_core::series::read_series_csv_path;
use t2cd_core::{Error, FitKind, Result, TimeSeries, SCHEMA_VERSION};

use crate::report::BenchmarkReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Observed series with the fitted trend and equilibrium means.
    FitOverlay,
    /// Standardized residuals of both regimes.
    Residuals,
    /// The logistic transition curve of a sigmoid fit.
    Transition,
    /// Long-format view of a benchmark report.
    Benchmark,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// A fit result JSON, or a benchmark report CSV for `--kind benchmark`.
    pub input: PathBuf,

    #[arg(long, value_enum)]
    pub kind: PlotKind,

    /// The series CSV the fit was computed from (needed by fit-overlay
    /// and residuals).
    #[arg(long)]
    pub series: Option<PathBuf>,

    /// Column to use from the series CSV (default: the fit's label, then
    /// the first column).
    #[arg(long)]
    pub column: Option<String>,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &PlotdataArgs) -> Result<()> {
    let table = match args.kind {
        PlotKind::Benchmark => benchmark_table(args)?,
        PlotKind::Transition => transition_table(args)?,
        PlotKind::FitOverlay => overlay_table(args)?,
        PlotKind::Residuals => residual_table(args)?,
    };
    std::fs::write(&args.out, table)?;
    Ok(())
}

fn load_document(args: &PlotdataArgs) -> Result<FitDocument> {
    let text = std::fs::read_to_string(&args.input)?;
    FitDocument::from_json(&text)
        .map_err(|e| Error::InvalidInput(format!("input is not a fit result document: {e}")))
}

fn load_series(args: &PlotdataArgs, doc: &FitDocument) -> Result<TimeSeries> {
    let path = args.series.as_ref().ok_or_else(|| {
        Error::InvalidConfig("this plot kind needs --series <csv> with the observed data".into())
    })?;
    let ms = read_series_csv_path(path)?;
    let wanted = args.column.as_deref().or(doc.label.as_deref());
    let ts = match wanted {
        Some(name) => ms
            .series()
            .iter()
            .find(|ts| ts.label() == Some(name))
            .ok_or_else(|| Error::InvalidInput(format!("no column named `{name}` in the CSV")))?,
        None => &ms.series()[0],
    };
    if ts.len() != doc.series.t_len {
        return Err(Error::InvalidInput(format!(
            "series length {} does not match the fitted document ({})",
            ts.len(),
            doc.series.t_len
        )));
    }
    Ok(ts.clone())
}

fn transition_table(args: &PlotdataArgs) -> Result<String> {
    let doc = load_document(args)?;
    if doc.kind != FitKind::Sigmoid {
        return Err(Error::InvalidConfig(
            "transition tables are defined for sigmoid fits only".into(),
        ));
    }
    let fit = doc.to_fit();
    let alpha = fit.alpha.expect("sigmoid fits carry alpha");
    let mut out = String::from("schema_version,time_hours,w\n");
    for t in 0..doc.series.t_len {
        let hours = doc.series.time_of(t);
        out.push_str(&format!("{SCHEMA_VERSION},{hours},{}\n", alpha.weight_at(hours)));
    }
    Ok(out)
}

fn overlay_table(args: &PlotdataArgs) -> Result<String> {
    let doc = load_document(args)?;
    let fit = doc.to_fit();
    let ts = load_series(args, &doc)?;
    let times = ts.times();
    let y = ts.values();
    let mut out = String::from(
        "schema_version,time_hours,observed,fitted_trend,fitted_equilibrium,w\n",
    );
    match doc.kind {
        FitKind::Step => {
            let tau = doc.tau_index;
            let trend_mean = fit.trend.mean_at(&times[..tau])?;
            for t in 0..ts.len() {
                let trend = if t < tau {
                    format!("{}", trend_mean[t])
                } else {
                    String::new()
                };
                let equilibrium = if t >= tau {
                    let g = fi_conditional_mean_step(y, t, fit.equilibrium.mu, fit.equilibrium.d, tau)?;
                    format!("{g}")
                } else {
                    String::new()
                };
                out.push_str(&format!(
                    "{SCHEMA_VERSION},{},{},{},{},\n",
                    times[t], y[t], trend, equilibrium
                ));
            }
        }
        FitKind::Sigmoid => {
            let alpha = fit.alpha.expect("sigmoid fits carry alpha");
            // Index-scale logistic coefficients for the lagged weights.
            let a0 = alpha.alpha0 + alpha.alpha1 * ts.start_hours();
            let a1 = alpha.alpha1 * ts.dt_hours();
            let trend_mean = fit.trend.mean_at(&times)?;
            for t in 0..ts.len() {
                let g = fi_conditional_mean_sigmoid(
                    y,
                    t,
                    fit.equilibrium.mu,
                    fit.equilibrium.d,
                    a0,
                    a1,
                );
                out.push_str(&format!(
                    "{SCHEMA_VERSION},{},{},{},{g},{}\n",
                    times[t],
                    y[t],
                    trend_mean[t],
                    alpha.weight_at(times[t])
                ));
            }
        }
    }
    Ok(out)
}

fn residual_table(args: &PlotdataArgs) -> Result<String> {
    let doc = load_document(args)?;
    let fit = doc.to_fit();
    let ts = load_series(args, &doc)?;
    let times = ts.times();
    let y = ts.values();
    let tau = doc.tau_index;
    let mut out = String::from("schema_version,time_hours,regime,std_residual\n");
    if tau > 0 {
        let trend_mean = fit.trend.mean_at(&times[..tau])?;
        let sd = fit.trend.noise_sd_at(&times[..tau])?;
        for t in 0..tau {
            let r = (y[t] - trend_mean[t]) / sd[t];
            out.push_str(&format!("{SCHEMA_VERSION},{},trend,{r}\n", times[t]));
        }
    }
    let nu = fit.equilibrium.nu2.sqrt();
    for t in tau..ts.len() {
        let g = match doc.kind {
            FitKind::Step => {
                fi_conditional_mean_step(y, t, fit.equilibrium.mu, fit.equilibrium.d, tau)?
            }
            FitKind::Sigmoid => {
                let alpha = fit.alpha.expect("sigmoid fits carry alpha");
                let a0 = alpha.alpha0 + alpha.alpha1 * ts.start_hours();
                let a1 = alpha.alpha1 * ts.dt_hours();
                fi_conditional_mean_sigmoid(y, t, fit.equilibrium.mu, fit.equilibrium.d, a0, a1)
            }
        };
        let r = (y[t] - g) / nu;
        out.push_str(&format!("{SCHEMA_VERSION},{},equilibrium,{r}\n", times[t]));
    }
    Ok(out)
}

fn benchmark_table(args: &PlotdataArgs) -> Result<String> {
    let report = BenchmarkReport::read_csv_path(&args.input)
        .map_err(|e| Error::InvalidInput(format!("input is not a benchmark report: {e}")))?;
    let mut out = String::from("schema_version,tau_hours,d,method,metric,value\n");
    for row in &report.rows {
        let mut push = |metric: &str, value: f64| {
            out.push_str(&format!(
                "{SCHEMA_VERSION},{},{},{},{metric},{value}\n",
                row.tau_hours, row.d, row.method
            ));
        };
        push("tau_err_q1", row.tau_err.q1);
        push("tau_err_median", row.tau_err.median);
        push("tau_err_q3", row.tau_err.q3);
        push("d_abs_err_q1", row.d_abs_err.q1);
        push("d_abs_err_median", row.d_abs_err.median);
        push("d_abs_err_q3", row.d_abs_err.q3);
        push("runtime_q1", row.runtime_s.q1);
        push("runtime_median", row.runtime_s.median);
        push("runtime_q3", row.runtime_s.q3);
        push("runtime_mean", row.runtime_mean_s);
        push("reps", row.reps as f64);
        push("failures", row.failures as f64);
    }
    Ok(out)
}
