//! Two-regime time series estimation: a nonlinear, heteroscedastic trend
//! followed by a long-memory equilibrium, with the change point between
//! them estimated jointly with the parameters of both regimes.
//!
//! The crate provides:
//!
//! - [`detect`]: the two change point estimators — an exhaustive-search
//!   `fit_step` and a smooth-transition `fit_sigmoid` — plus fixed-τ
//!   baselines and a multivariate pooled estimator with a shared
//!   long-memory parameter.
//! - [`splines`]: penalized B-spline machinery for the trend regime —
//!   basis construction, curvature penalties, weighted penalized least
//!   squares, leave-one-out cross validation, and the iterative FGLS
//!   procedure that estimates the heteroscedastic noise profile.
//! - [`fiproc`]: fractionally integrated process tools — differencing
//!   weights, conditional means, conditional likelihood, dual-range
//!   maximum-likelihood fitting, and FI/ARFIMA simulators.
//! - [`simgen`]: synthetic scenario generation for benchmarking.
//! - [`classify`]: regularized discriminant analysis over features built
//!   from the fitted change points and long-memory parameters.

pub mod classify;
pub mod detect;
pub mod error;
pub mod fiproc;
pub mod model;
pub mod optim;
pub mod series;
pub mod simgen;
pub mod splines;

pub use error::{Error, Result};
pub use model::{ChangePointFit, FIFit, FitDocument, FitKind, MultiFit, SigmoidAlpha, TrendFit};
pub use series::{CandidateWindow, MultiSeries, TimeSeries};

/// Version stamp written into every file this crate emits.
pub const SCHEMA_VERSION: u32 = 1;
