//! Flat `key = value` configuration files for scenarios and sweeps.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys are
//! rejected so typos fail loudly. Command-line flags override file values
//! where both exist.

use std::collections::BTreeMap;
use std::path::Path;

use t2cd_core::detect::CPenalty;
use t2cd_core::simgen::{EquilibriumModel, NoiseSchedule, ScenarioSpec, TrendModel};
use t2cd_core::{Error, Result};

pub struct KvConfig {
    values: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("key `{key}`: cannot parse `{v}` as a number"))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("key `{key}`: cannot parse `{v}` as an integer"))),
        }
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("key `{key}`: cannot parse `{v}` as a seed"))),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let parsed: std::result::Result<Vec<f64>, _> =
                    v.split(',').map(|s| s.trim().parse::<f64>()).collect();
                parsed.map(Some).map_err(|_| {
                    Error::InvalidConfig(format!("key `{key}`: cannot parse `{v}` as a number list"))
                })
            }
        }
    }

    fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidConfig(format!("unknown configuration key `{key}`")));
            }
        }
        Ok(())
    }
}

const SCENARIO_KEYS: &[&str] = &[
    "t_len",
    "horizon_hours",
    "tau_hours",
    "d",
    "trend",
    "equilibrium",
    "phi",
    "theta_ma",
    "eps_sd",
    "noise",
    "sigma",
    "p",
    "seed",
];

fn trend_model(cfg: &KvConfig) -> Result<TrendModel> {
    match cfg.get("trend").unwrap_or("gp") {
        "gp" => Ok(TrendModel::GaussianProcess {
            variance: 10.0,
            lengthscale_hours: 1.0,
        }),
        "poly" => Ok(TrendModel::Polynomial),
        other => Err(Error::InvalidConfig(format!(
            "trend must be `gp` or `poly`, got `{other}`"
        ))),
    }
}

fn noise_schedule(cfg: &KvConfig) -> Result<NoiseSchedule> {
    match cfg.get("noise").unwrap_or("ramp") {
        "ramp" => Ok(NoiseSchedule::Ramp),
        "constant" => Ok(NoiseSchedule::Constant(cfg.f64_or("sigma", 0.5)?)),
        other => Err(Error::InvalidConfig(format!(
            "noise must be `ramp` or `constant`, got `{other}`"
        ))),
    }
}

/// A full scenario description (the `simulate` command's input).
pub fn scenario_from_config(cfg: &KvConfig) -> Result<ScenarioSpec> {
    cfg.check_known(SCENARIO_KEYS)?;
    let equilibrium = match cfg.get("equilibrium").unwrap_or("fi") {
        "fi" => EquilibriumModel::Fi,
        "arfima" => EquilibriumModel::Arfima {
            phi: cfg.f64_or("phi", 0.5)?,
            theta_ma: cfg.f64_or("theta_ma", 0.5)?,
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "equilibrium must be `fi` or `arfima`, got `{other}`"
            )))
        }
    };
    let spec = ScenarioSpec {
        t_len: cfg.usize_or("t_len", 400)?,
        horizon_hours: cfg.f64_or("horizon_hours", 70.0)?,
        tau_hours: cfg
            .f64_list("tau_hours")?
            .ok_or_else(|| Error::InvalidConfig("scenario needs `tau_hours`".into()))?,
        d: cfg.f64_or("d", 0.25)?,
        trend: trend_model(cfg)?,
        equilibrium,
        eps_sd: cfg.f64_or("eps_sd", 0.5)?,
        noise: noise_schedule(cfg)?,
        p: cfg.usize_or("p", 1)?,
        seed: cfg.u64_or("seed", 0)?,
    };
    spec.validate()?;
    Ok(spec)
}

/// How the sweep draws equilibrium coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumSweep {
    Fi,
    Arfima { phi: f64, theta_ma: f64 },
    /// Fresh `phi, theta ~ Uniform(0, 1)` every replicate.
    ArfimaRandom,
}

/// Estimator parameters shared by `fit` and `benchmark`.
#[derive(Debug, Clone)]
pub struct FitParams {
    pub tau_a: f64,
    pub tau_b: f64,
    pub degree: usize,
    pub knots_f: f64,
    pub knots_h: f64,
    pub c_penalty: CPenalty,
    pub grid_step: Option<f64>,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            tau_a: 10.0,
            tau_b: 50.0,
            degree: 3,
            knots_f: 1.0,
            knots_h: 5.0,
            c_penalty: CPenalty::Fixed(1000.0),
            grid_step: None,
        }
    }
}

pub fn parse_c_penalty(text: &str) -> Result<CPenalty> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(CPenalty::Auto);
    }
    text.parse::<f64>()
        .map_err(|_| Error::InvalidConfig(format!("c penalty must be a number or `auto`, got `{text}`")))
        .map(CPenalty::Fixed)
}

const SWEEP_KEYS: &[&str] = &[
    "t_len",
    "horizon_hours",
    "taus",
    "ds",
    "reps",
    "trend",
    "equilibrium",
    "phi",
    "theta_ma",
    "eps_sd",
    "noise",
    "sigma",
    "seed",
    "tau_a",
    "tau_b",
    "degree",
    "knots_f",
    "knots_h",
    "c_penalty",
    "grid_step",
    "fixed_tau",
];

/// A benchmark sweep: a scenario family crossed with τ and d grids.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub t_len: usize,
    pub horizon_hours: f64,
    pub taus: Vec<f64>,
    pub ds: Vec<f64>,
    pub reps: usize,
    pub trend: TrendModel,
    pub equilibrium: EquilibriumSweep,
    pub eps_sd: f64,
    pub noise: NoiseSchedule,
    pub seed: u64,
    pub fit: FitParams,
    pub fixed_tau: f64,
}

pub fn sweep_from_config(cfg: &KvConfig) -> Result<SweepConfig> {
    cfg.check_known(SWEEP_KEYS)?;
    let equilibrium = match cfg.get("equilibrium").unwrap_or("fi") {
        "fi" => EquilibriumSweep::Fi,
        "arfima" => EquilibriumSweep::Arfima {
            phi: cfg.f64_or("phi", 0.5)?,
            theta_ma: cfg.f64_or("theta_ma", 0.5)?,
        },
        "arfima-random" => EquilibriumSweep::ArfimaRandom,
        other => {
            return Err(Error::InvalidConfig(format!(
                "equilibrium must be `fi`, `arfima`, or `arfima-random`, got `{other}`"
            )))
        }
    };
    let fit = FitParams {
        tau_a: cfg.f64_or("tau_a", 10.0)?,
        tau_b: cfg.f64_or("tau_b", 50.0)?,
        degree: cfg.usize_or("degree", 3)?,
        knots_f: cfg.f64_or("knots_f", 1.0)?,
        knots_h: cfg.f64_or("knots_h", 5.0)?,
        c_penalty: match cfg.get("c_penalty") {
            None => CPenalty::Fixed(1000.0),
            Some(v) => parse_c_penalty(v)?,
        },
        grid_step: match cfg.get("grid_step") {
            None => None,
            Some(v) => Some(v.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("grid_step: cannot parse `{v}` as hours"))
            })?),
        },
    };
    Ok(SweepConfig {
        t_len: cfg.usize_or("t_len", 400)?,
        horizon_hours: cfg.f64_or("horizon_hours", 70.0)?,
        taus: cfg
            .f64_list("taus")?
            .ok_or_else(|| Error::InvalidConfig("sweep needs `taus`".into()))?,
        ds: cfg
            .f64_list("ds")?
            .ok_or_else(|| Error::InvalidConfig("sweep needs `ds`".into()))?,
        reps: cfg.usize_or("reps", 20)?,
        trend: trend_model(cfg)?,
        equilibrium,
        eps_sd: cfg.f64_or("eps_sd", 0.5)?,
        noise: noise_schedule(cfg)?,
        seed: cfg.u64_or("seed", 0)?,
        fit,
        fixed_tau: cfg.f64_or("fixed_tau", 50.0)?,
    })
}
