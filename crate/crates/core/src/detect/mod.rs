//! Change point estimators for the two-regime model.
//!
//! `fit_step` performs the exhaustive search: every candidate change point
//! in the window gets a full trend fit on its left and an FI equilibrium
//! fit on its right, and the penalized log-likelihoods decide. `fit_sigmoid`
//! replaces the hard split with a logistic transition whose parameters are
//! optimized directly, trading exactness for a large speedup. Fixed-τ
//! baselines and a shared-d multivariate pooling stage round out the set.

mod baseline;
mod multivariate;
mod sigmoid;
mod step;

pub use baseline::fit_fixed_tau;
pub use multivariate::{fit_multivariate, BaseEstimator};
pub use sigmoid::fit_sigmoid;
pub use step::fit_step;

use crate::error::{Error, Result};
use crate::series::{CandidateWindow, TimeSeries};
use crate::splines::FglsControls;
use crate::splines::SplineBasisSpec;

/// Spline layout and fit controls shared by all estimators.
#[derive(Debug, Clone)]
pub struct FitSettings {
    pub window: CandidateWindow,
    /// Spline degree for both the mean and log-variance curves.
    pub degree: usize,
    /// Interior knot spacing of the mean curve, hours.
    pub knot_spacing_f_hours: f64,
    /// Interior knot spacing of the log-variance curve, hours.
    pub knot_spacing_h_hours: f64,
    pub fgls: FglsControls,
    /// Candidates leaving fewer equilibrium points than this are skipped.
    pub min_equilibrium_points: usize,
}

impl FitSettings {
    pub fn new(window: CandidateWindow) -> Self {
        Self {
            window,
            degree: 3,
            knot_spacing_f_hours: 1.0,
            knot_spacing_h_hours: 5.0,
            fgls: FglsControls::default(),
            min_equilibrium_points: 20,
        }
    }

    /// Minimum number of trend points a candidate needs.
    pub fn min_trend_points(&self) -> usize {
        self.degree + 2
    }

    /// Full-domain basis specs for a series; per-candidate fits restrict
    /// these to the trend range.
    pub fn full_specs(&self, ts: &TimeSeries) -> Result<(SplineBasisSpec, SplineBasisSpec)> {
        let (lo, hi) = ts.span_hours();
        Ok((
            SplineBasisSpec::uniform(self.degree, [lo, hi], self.knot_spacing_f_hours)?,
            SplineBasisSpec::uniform(self.degree, [lo, hi], self.knot_spacing_h_hours)?,
        ))
    }

    pub(crate) fn validate_for(&self, ts: &TimeSeries) -> Result<()> {
        self.window.index_bounds(ts)?;
        if self.degree < 2 {
            return Err(Error::InvalidConfig(
                "trend splines need degree >= 2 for the curvature penalty".into(),
            ));
        }
        Ok(())
    }
}

/// Configuration of the exhaustive search.
#[derive(Debug, Clone)]
pub struct StepSearchConfig {
    pub settings: FitSettings,
    /// Candidate spacing in hours; `None` means every sample index.
    pub tau_grid_step_hours: Option<f64>,
    /// Evaluate candidates across threads. The reduction is a
    /// deterministic left-to-right argmax, so results match serial runs.
    pub parallel: bool,
}

impl StepSearchConfig {
    pub fn new(window: CandidateWindow) -> Self {
        Self {
            settings: FitSettings::new(window),
            tau_grid_step_hours: None,
            parallel: true,
        }
    }
}

/// Weight of the window penalty in the sigmoid objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CPenalty {
    Fixed(f64),
    /// Magnitude of the trend-only objective of the fitted series, placing
    /// comparable weight on model fit and change point regularization.
    Auto,
}

/// Configuration of the smooth-transition estimator.
#[derive(Debug, Clone)]
pub struct SigmoidConfig {
    pub settings: FitSettings,
    pub c_penalty: CPenalty,
    /// Local optimizer restarts spread across the window.
    pub multistarts: usize,
    pub max_iters: usize,
    /// Bounds on the logistic slope, per hour.
    pub slope_bounds: (f64, f64),
    /// How far outside the window the crossing may wander during search.
    pub tau_margin_hours: f64,
}

impl SigmoidConfig {
    pub fn new(window: CandidateWindow) -> Self {
        Self {
            settings: FitSettings::new(window),
            c_penalty: CPenalty::Fixed(1000.0),
            multistarts: 3,
            max_iters: 400,
            slope_bounds: (0.05, 40.0),
            tau_margin_hours: 5.0,
        }
    }
}
