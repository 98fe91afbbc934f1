//! Fixed change point baseline: no search, just the two regime fits at a
//! caller-supplied split. Serves both the conservative fixed-τ convention
//! and the known-truth reference.

use crate::error::{Error, Result};
use crate::fiproc::fit_fi;
use crate::model::{ChangePointFit, FitKind};
use crate::series::TimeSeries;
use crate::splines::fit_fgls;

use super::FitSettings;

pub fn fit_fixed_tau(ts: &TimeSeries, tau_hours: f64, settings: &FitSettings) -> Result<ChangePointFit> {
    let tau_index = ts.index_of(tau_hours)?;
    if tau_index < settings.min_trend_points() {
        return Err(Error::InsufficientData {
            needed: settings.min_trend_points(),
            got: tau_index,
        });
    }
    let eq_len = ts.len() - tau_index;
    if eq_len < settings.min_equilibrium_points {
        return Err(Error::InsufficientData {
            needed: settings.min_equilibrium_points,
            got: eq_len,
        });
    }
    let (spec_f, spec_h) = settings.full_specs(ts)?;
    let trend = fit_fgls(ts, 0..tau_index, &spec_f, &spec_h, &settings.fgls)?;
    let times: Vec<f64> = (0..tau_index).map(|t| ts.time_of(t)).collect();
    let trend_ll = trend.penalized_loglik(&times, &ts.values()[..tau_index])?;
    let equilibrium = fit_fi(ts.values(), tau_index)?;
    Ok(ChangePointFit {
        kind: FitKind::Step,
        tau_hours: ts.time_of(tau_index),
        alpha: None,
        trend,
        equilibrium,
        objective: trend_ll + equilibrium.loglik,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiproc::simulate_fi;
    use crate::series::CandidateWindow;

    #[test]
    fn degenerate_splits_are_refused() {
        let values = simulate_fi(100, 0.2, 0.0, 0.5, 5).unwrap();
        let ts = TimeSeries::new(values, 0.0, 0.5, None).unwrap();
        let settings = FitSettings::new(CandidateWindow::new(5.0, 45.0).unwrap());
        // Equilibrium segment shorter than the minimum.
        let late = ts.time_of(ts.len() - 2);
        assert!(matches!(
            fit_fixed_tau(&ts, late, &settings),
            Err(Error::InsufficientData { .. })
        ));
        // Trend segment shorter than the minimum.
        assert!(matches!(
            fit_fixed_tau(&ts, 0.5, &settings),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn objective_decomposes() {
        let values = simulate_fi(160, 0.25, 0.0, 0.5, 77).unwrap();
        let ts = TimeSeries::new(values, 0.0, 0.5, None).unwrap();
        let settings = FitSettings::new(CandidateWindow::new(5.0, 60.0).unwrap());
        let fit = fit_fixed_tau(&ts, 30.0, &settings).unwrap();
        let tau_index = ts.index_of(fit.tau_hours).unwrap();
        let times: Vec<f64> = (0..tau_index).map(|t| ts.time_of(t)).collect();
        let trend_ll = fit
            .trend
            .penalized_loglik(&times, &ts.values()[..tau_index])
            .unwrap();
        assert!(
            (fit.objective - (trend_ll + fit.equilibrium.loglik)).abs() < 1e-10,
            "objective does not decompose"
        );
    }
}
