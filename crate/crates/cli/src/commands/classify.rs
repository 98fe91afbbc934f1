//! `t2cd classify`: leave-one-group-out discriminant evaluation of a
//! feature table.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use t2cd_core::classify::{leave_one_group_out, FoldResult};
use t2cd_core::{Result, SCHEMA_VERSION};

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Feature CSV: `group,class,<feature...>`.
    pub features: PathBuf,

    /// Covariance blend: 0 is quadratic, 1 is linear discriminant analysis.
    #[arg(long)]
    pub rho: f64,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema_version: u32,
    pub rho: f64,
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub warnings: Vec<String>,
}

pub fn run(args: &ClassifyArgs) -> Result<()> {
    let file = std::fs::File::open(&args.features)?;
    let data = t2cd_core::classify::read_features_csv(std::io::BufReader::new(file))?;
    let report = leave_one_group_out(&data, args.rho)?;
    let out = ClassifyReport {
        schema_version: SCHEMA_VERSION,
        rho: args.rho,
        folds: report.folds,
        mean_accuracy: report.mean_accuracy,
        sd_accuracy: report.sd_accuracy,
        warnings: report.warnings,
    };
    std::fs::write(
        &args.out,
        serde_json::to_string_pretty(&out).map_err(t2cd_core::Error::from)?,
    )?;
    Ok(())
}
