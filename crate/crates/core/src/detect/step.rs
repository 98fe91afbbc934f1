//! Exhaustive-search estimator: evaluate the penalized log-likelihood at
//! every candidate change point and keep the argmax.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fiproc::fit_fi;
use crate::model::{ChangePointFit, FIFit, FitKind, TrendFit};
use crate::series::TimeSeries;
use crate::splines::fit_fgls;

use super::{FitSettings, StepSearchConfig};

/// Objectives within this gap count as tied; ties go to the earlier
/// candidate, which leaves more data for the equilibrium fit.
const TIE_GAP: f64 = 1e-9;

struct Candidate {
    tau_index: usize,
    trend: TrendFit,
    equilibrium: FIFit,
    objective: f64,
}

/// Fit the two-regime model by complete search over the candidate window.
///
/// For each candidate index τ the trend is fit on `[0, τ)` by FGLS, the
/// equilibrium on `[τ, T)` by the dual-range FI likelihood, and the total
/// objective is the sum of the trend's penalized log-likelihood and the
/// equilibrium log-likelihood. Candidates too short on either side are
/// skipped; if every candidate fails the search reports an estimation
/// error carrying the first underlying failure.
pub fn fit_step(ts: &TimeSeries, config: &StepSearchConfig) -> Result<ChangePointFit> {
    config.settings.validate_for(ts)?;
    let (lo_idx, hi_idx) = config.settings.window.index_bounds(ts)?;
    let stride = match config.tau_grid_step_hours {
        None => 1,
        Some(h) => {
            if h < ts.dt_hours() {
                return Err(Error::InvalidConfig(format!(
                    "candidate grid step {h} h is finer than the sample spacing {} h",
                    ts.dt_hours()
                )));
            }
            (h / ts.dt_hours()).round().max(1.0) as usize
        }
    };
    let candidates: Vec<usize> = (lo_idx..=hi_idx).step_by(stride).collect();

    let evaluate = |&tau_index: &usize| evaluate_candidate(ts, &config.settings, tau_index);
    let results: Vec<std::result::Result<Candidate, Error>> = if config.parallel {
        candidates.par_iter().map(evaluate).collect()
    } else {
        candidates.iter().map(evaluate).collect()
    };

    let mut best: Option<Candidate> = None;
    let mut first_error: Option<Error> = None;
    for result in results {
        match result {
            Ok(cand) => match &best {
                Some(b) if cand.objective <= b.objective + TIE_GAP => {}
                _ => best = Some(cand),
            },
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    let best = best.ok_or_else(|| match first_error {
        Some(e) => Error::Estimation(format!("no admissible change point candidate ({e})")),
        None => Error::Estimation("no admissible change point candidate".into()),
    })?;

    Ok(ChangePointFit {
        kind: FitKind::Step,
        tau_hours: ts.time_of(best.tau_index),
        alpha: None,
        trend: best.trend,
        equilibrium: best.equilibrium,
        objective: best.objective,
    })
}

fn evaluate_candidate(
    ts: &TimeSeries,
    settings: &FitSettings,
    tau_index: usize,
) -> std::result::Result<Candidate, Error> {
    if tau_index < settings.min_trend_points() {
        return Err(Error::InsufficientData {
            needed: settings.min_trend_points(),
            got: tau_index,
        });
    }
    if ts.len() - tau_index < settings.min_equilibrium_points {
        return Err(Error::InsufficientData {
            needed: settings.min_equilibrium_points,
            got: ts.len() - tau_index,
        });
    }
    let (spec_f, spec_h) = settings.full_specs(ts)?;
    let trend = fit_fgls(ts, 0..tau_index, &spec_f, &spec_h, &settings.fgls)?;
    let times: Vec<f64> = (0..tau_index).map(|t| ts.time_of(t)).collect();
    let trend_ll = trend.penalized_loglik(&times, &ts.values()[..tau_index])?;
    let equilibrium = fit_fi(ts.values(), tau_index)?;
    Ok(Candidate {
        tau_index,
        trend,
        equilibrium,
        objective: trend_ll + equilibrium.loglik,
    })
}
