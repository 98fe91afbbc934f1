//! Fitted-model value types and their JSON result documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{CandidateWindow, TimeSeries};
use crate::splines::{build_basis, build_penalty, SplineBasisSpec};
use crate::SCHEMA_VERSION;

/// Mean of `ln chi-squared(1)`. A spline fit to log squared residuals
/// estimates the log variance shifted down by this constant; undoing the
/// shift gives an (asymptotically) unbiased noise level.
pub const LOG_CHI2_MEAN: f64 = -1.2703628454614782;

/// Penalized-spline fit of the trend mean and log-variance curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    /// Mean-curve coefficients for `basis_f`.
    pub beta: Vec<f64>,
    /// Log-variance coefficients for `basis_h`.
    pub theta: Vec<f64>,
    pub lambda_f: f64,
    pub lambda_h: f64,
    pub basis_f: SplineBasisSpec,
    pub basis_h: SplineBasisSpec,
}

impl TrendFit {
    pub fn validate(&self) -> Result<()> {
        if self.beta.len() != self.basis_f.dim() || self.theta.len() != self.basis_h.dim() {
            return Err(Error::InvalidInput(
                "trend coefficient lengths do not match their basis specs".into(),
            ));
        }
        if !(self.lambda_f > 0.0 && self.lambda_h > 0.0) {
            return Err(Error::InvalidInput("smoothness levels must be positive".into()));
        }
        Ok(())
    }

    /// Fitted mean at each time (hours).
    pub fn mean_at(&self, times: &[f64]) -> Result<Vec<f64>> {
        Ok(build_basis(&self.basis_f, times)?.apply(&self.beta))
    }

    /// Fitted log noise variance at each time (hours). This is the raw
    /// exponential-of-spline scale the likelihood objective is written in.
    pub fn log_variance_at(&self, times: &[f64]) -> Result<Vec<f64>> {
        Ok(build_basis(&self.basis_h, times)?.apply(&self.theta))
    }

    /// Debiased noise standard deviation at each time. The raw curve
    /// tracks the mean of log squared residuals, which sits below the log
    /// variance by the mean of `ln chi-squared(1)`; this undoes that shift.
    pub fn noise_sd_at(&self, times: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .log_variance_at(times)?
            .into_iter()
            .map(|lv| (0.5 * (lv - LOG_CHI2_MEAN)).exp())
            .collect())
    }

    /// Penalized Gaussian log-likelihood of the trend regime at the fitted
    /// coefficients: the heteroscedastic density terms minus the two
    /// curvature penalties (additive constants dropped).
    pub fn penalized_loglik(&self, times: &[f64], y: &[f64]) -> Result<f64> {
        assert_eq!(times.len(), y.len());
        let means = self.mean_at(times)?;
        let logvar = self.log_variance_at(times)?;
        let mut acc = 0.0;
        for t in 0..y.len() {
            let r = y[t] - means[t];
            acc -= 0.5 * logvar[t] + r * r / (2.0 * logvar[t].exp());
        }
        let m_f = build_penalty(&self.basis_f)?;
        let m_h = build_penalty(&self.basis_h)?;
        acc -= 0.5 * self.lambda_f * m_f.quadratic_form(&self.beta);
        acc -= 0.5 * self.lambda_h * m_h.quadratic_form(&self.theta);
        Ok(acc)
    }
}

/// Fitted fractionally integrated equilibrium: long-memory order `d`,
/// level `mu`, innovation variance `nu2`, and the conditional
/// log-likelihood achieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FIFit {
    pub d: f64,
    pub mu: f64,
    pub nu2: f64,
    pub loglik: f64,
}

/// Which transition family produced a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Step,
    Sigmoid,
}

impl std::fmt::Display for FitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitKind::Step => write!(f, "step"),
            FitKind::Sigmoid => write!(f, "sigmoid"),
        }
    }
}

/// Logistic transition coefficients in hour units:
/// `w(h) = 1 / (1 + exp(-(alpha0 + alpha1 h)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidAlpha {
    pub alpha0: f64,
    pub alpha1: f64,
}

impl SigmoidAlpha {
    pub fn weight_at(&self, hours: f64) -> f64 {
        1.0 / (1.0 + (-(self.alpha0 + self.alpha1 * hours)).exp())
    }

    /// Hour at which the transition crosses one half.
    pub fn crossing_hours(&self) -> f64 {
        -self.alpha0 / self.alpha1
    }
}

/// A complete two-regime fit: the located change point plus the trend and
/// equilibrium parameter bundles and the total objective achieved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointFit {
    pub kind: FitKind,
    pub tau_hours: f64,
    /// Present only for sigmoid fits.
    pub alpha: Option<SigmoidAlpha>,
    pub trend: TrendFit,
    pub equilibrium: FIFit,
    pub objective: f64,
}

impl ChangePointFit {
    /// Trend component of the objective (total minus equilibrium term).
    pub fn trend_objective(&self) -> f64 {
        self.objective - self.equilibrium.loglik
    }
}

/// Pooled multivariate fit: a shared long-memory order with per-series
/// change points, trends, levels, and innovation variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiFit {
    pub d_shared: f64,
    pub per_series: Vec<ChangePointFit>,
    pub objective: f64,
    /// Stage-one long-memory estimates, before pooling.
    pub univariate_d: Vec<f64>,
}

/// Sampling metadata carried along with serialized fits so a result file
/// is interpretable without the original CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub t_len: usize,
    pub start_hours: f64,
    pub dt_hours: f64,
}

impl SeriesMeta {
    pub fn of(ts: &TimeSeries) -> Self {
        Self {
            t_len: ts.len(),
            start_hours: ts.start_hours(),
            dt_hours: ts.dt_hours(),
        }
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.start_hours + index as f64 * self.dt_hours
    }

    pub fn index_of(&self, hours: f64) -> usize {
        let raw = ((hours - self.start_hours) / self.dt_hours).round().max(0.0);
        (raw as usize).min(self.t_len - 1)
    }
}

/// Flat, key-stable JSON document for one univariate fit. Round-trips
/// losslessly: every floating-point field survives serialization exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub kind: FitKind,
    pub tau_hours: f64,
    pub tau_index: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha1: Option<f64>,
    pub d: f64,
    pub mu: f64,
    pub nu2: f64,
    pub equilibrium_loglik: f64,
    pub objective: f64,
    pub lambda_f: f64,
    pub lambda_h: f64,
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    pub basis_f: SplineBasisSpec,
    pub basis_h: SplineBasisSpec,
    pub series: SeriesMeta,
    pub window: CandidateWindow,
}

impl FitDocument {
    pub fn new(fit: &ChangePointFit, ts: &TimeSeries, window: CandidateWindow) -> Result<Self> {
        fit.trend.validate()?;
        let meta = SeriesMeta::of(ts);
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            label: ts.label().map(str::to_string),
            kind: fit.kind,
            tau_hours: fit.tau_hours,
            tau_index: meta.index_of(fit.tau_hours),
            alpha0: fit.alpha.map(|a| a.alpha0),
            alpha1: fit.alpha.map(|a| a.alpha1),
            d: fit.equilibrium.d,
            mu: fit.equilibrium.mu,
            nu2: fit.equilibrium.nu2,
            equilibrium_loglik: fit.equilibrium.loglik,
            objective: fit.objective,
            lambda_f: fit.trend.lambda_f,
            lambda_h: fit.trend.lambda_h,
            beta: fit.trend.beta.clone(),
            theta: fit.trend.theta.clone(),
            basis_f: fit.trend.basis_f.clone(),
            basis_h: fit.trend.basis_h.clone(),
            series: meta,
            window,
        })
    }

    pub fn to_fit(&self) -> ChangePointFit {
        ChangePointFit {
            kind: self.kind,
            tau_hours: self.tau_hours,
            alpha: match (self.alpha0, self.alpha1) {
                (Some(alpha0), Some(alpha1)) => Some(SigmoidAlpha { alpha0, alpha1 }),
                _ => None,
            },
            trend: TrendFit {
                beta: self.beta.clone(),
                theta: self.theta.clone(),
                lambda_f: self.lambda_f,
                lambda_h: self.lambda_h,
                basis_f: self.basis_f.clone(),
                basis_h: self.basis_h.clone(),
            },
            equilibrium: FIFit {
                d: self.d,
                mu: self.mu,
                nu2: self.nu2,
                loglik: self.equilibrium_loglik,
            },
            objective: self.objective,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Result document for a pooled multivariate fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiFitDocument {
    pub schema_version: u32,
    pub d_shared: f64,
    pub objective: f64,
    pub fits: Vec<FitDocument>,
}

impl MultiFitDocument {
    pub fn new(fit: &MultiFit, series: &[TimeSeries], window: CandidateWindow) -> Result<Self> {
        if fit.per_series.len() != series.len() {
            return Err(Error::InvalidInput(
                "fit and series counts differ in multivariate document".into(),
            ));
        }
        let fits = fit
            .per_series
            .iter()
            .zip(series)
            .map(|(f, ts)| FitDocument::new(f, ts, window))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            d_shared: fit.d_shared,
            objective: fit.objective,
            fits,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
