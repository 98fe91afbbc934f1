//! Regularized discriminant classification over fit-derived features.
//!
//! The discriminant score of class `c` blends the class covariance with
//! the pooled covariance, `S_c(rho) = (1 - rho) S_c + rho S`, so one knob
//! spans quadratic (`rho = 0`) to linear (`rho = 1`) discriminant
//! analysis. Scores are Mahalanobis distance plus log determinant; smaller
//! is better. Features are standardized on the training set, and a small
//! ridge keeps the blended covariances invertible at realistic per-class
//! sample sizes.

use std::io::{Read, Write};

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ChangePointFit;
use crate::series::TimeSeries;

/// Default ridge scale on the blended covariances.
pub const RIDGE_SCALE: f64 = 1e-8;

/// One labeled observation: feature values with stable names, the
/// experiment it came from, and its class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<String>,
    pub group: String,
    pub class: String,
}

impl FeatureVector {
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.names.len() {
            return Err(Error::InvalidInput("feature names/values length mismatch".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.names {
            if !seen.insert(name) {
                return Err(Error::InvalidInput(format!("duplicate feature name `{name}`")));
            }
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite feature value".into()));
        }
        Ok(())
    }
}

/// Centered moving average of window 5, clipped at the boundaries, then
/// three summary features: the smoothed level at a fixed time mark, the
/// smoothed maximum, and the smoothed level at the end of the series.
pub fn original_features(ts: &TimeSeries, time_mark_hours: f64) -> Result<FeatureVector> {
    if ts.len() < 5 {
        return Err(Error::InsufficientData { needed: 5, got: ts.len() });
    }
    let mark = ts.index_of(time_mark_hours)?;
    let smoothed = moving_average_5(ts.values());
    let max = smoothed.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FeatureVector {
        values: vec![smoothed[mark], max, smoothed[smoothed.len() - 1]],
        names: vec![
            "level_at_mark".into(),
            "max_level".into(),
            "end_level".into(),
        ],
        group: String::new(),
        class: String::new(),
    })
}

fn moving_average_5(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            y[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Change point and long-memory estimates as a feature pair, in stable
/// order `(tau_hours, d)`.
pub fn t2cd_features(fit: &ChangePointFit) -> FeatureVector {
    FeatureVector {
        values: vec![fit.tau_hours, fit.equilibrium.d],
        names: vec!["tau_hours".into(), "d".into()],
        group: String::new(),
        class: String::new(),
    }
}

/// Trained regularized discriminant model.
#[derive(Debug, Clone)]
pub struct RdaModel {
    pub classes: Vec<String>,
    pub rho: f64,
    feature_names: Vec<String>,
    /// Train-set standardization applied to every incoming vector.
    feature_mean: Vec<f64>,
    feature_sd: Vec<f64>,
    means: Vec<DVector<f64>>,
    class_covs: Vec<DMatrix<f64>>,
    pooled_cov: DMatrix<f64>,
    ridge_scale: f64,
}

/// Fit class means, per-class covariances, and the pooled covariance.
/// Needs at least two classes and two samples per class.
pub fn rda_fit(train: &[FeatureVector], rho: f64) -> Result<RdaModel> {
    rda_fit_with_ridge(train, rho, RIDGE_SCALE)
}

/// [`rda_fit`] with an explicit ridge scale (exposed so the vanishing-ridge
/// limit can be checked).
pub fn rda_fit_with_ridge(train: &[FeatureVector], rho: f64, ridge_scale: f64) -> Result<RdaModel> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidConfig(format!("rho must lie in [0, 1], got {rho}")));
    }
    let first = train
        .first()
        .ok_or_else(|| Error::InvalidInput("empty training set".into()))?;
    first.validate()?;
    let dim = first.values.len();
    let names = first.names.clone();
    for fv in train {
        fv.validate()?;
        if fv.names != names {
            return Err(Error::InvalidInput("inconsistent feature names across samples".into()));
        }
    }

    let mut classes: Vec<String> = train.iter().map(|fv| fv.class.clone()).collect();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 classes, got {}",
            classes.len()
        )));
    }

    // Standardize on the training set; constant features keep unit scale.
    let n = train.len() as f64;
    let mut feature_mean = vec![0.0; dim];
    for fv in train {
        for (m, v) in feature_mean.iter_mut().zip(fv.values.iter()) {
            *m += v;
        }
    }
    for m in feature_mean.iter_mut() {
        *m /= n;
    }
    let mut feature_sd = vec![0.0; dim];
    for fv in train {
        for (s, (v, m)) in feature_sd.iter_mut().zip(fv.values.iter().zip(feature_mean.iter())) {
            *s += (v - m) * (v - m);
        }
    }
    for s in feature_sd.iter_mut() {
        *s = (*s / n).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    let standardize = |fv: &FeatureVector| -> DVector<f64> {
        DVector::from_iterator(
            dim,
            fv.values
                .iter()
                .zip(feature_mean.iter().zip(feature_sd.iter()))
                .map(|(v, (m, s))| (v - m) / s),
        )
    };

    let mut means = Vec::with_capacity(classes.len());
    let mut class_covs = Vec::with_capacity(classes.len());
    let mut pooled = DMatrix::zeros(dim, dim);
    let mut pooled_dof = 0.0;
    for class in &classes {
        let members: Vec<DVector<f64>> = train
            .iter()
            .filter(|fv| &fv.class == class)
            .map(standardize)
            .collect();
        let n_c = members.len();
        if n_c < 2 {
            return Err(Error::InvalidInput(format!(
                "class `{class}` has {n_c} sample(s); need at least 2"
            )));
        }
        let mut mean = DVector::zeros(dim);
        for m in &members {
            mean += m;
        }
        mean /= n_c as f64;
        let mut cov = DMatrix::zeros(dim, dim);
        for m in &members {
            let c = m - &mean;
            cov += &c * c.transpose();
        }
        pooled += &cov;
        pooled_dof += (n_c - 1) as f64;
        cov /= (n_c - 1) as f64;
        means.push(mean);
        class_covs.push(cov);
    }
    pooled /= pooled_dof;

    Ok(RdaModel {
        classes,
        rho,
        feature_names: names,
        feature_mean,
        feature_sd,
        means,
        class_covs,
        pooled_cov: pooled,
        ridge_scale,
    })
}

impl RdaModel {
    /// Blended covariance of class `c` with the stabilizing ridge.
    fn blended(&self, c: usize) -> DMatrix<f64> {
        let dim = self.pooled_cov.nrows();
        let mut cov = &self.class_covs[c] * (1.0 - self.rho) + &self.pooled_cov * self.rho;
        let ridge = self.ridge_scale * self.pooled_cov.trace().max(1e-300) / dim as f64;
        for i in 0..dim {
            cov[(i, i)] += ridge;
        }
        cov
    }

    /// Discriminant scores for every class (smaller means closer).
    pub fn scores(&self, z: &FeatureVector) -> Result<Vec<f64>> {
        z.validate()?;
        if z.names != self.feature_names {
            return Err(Error::InvalidInput(
                "feature names do not match the trained model".into(),
            ));
        }
        let dim = self.pooled_cov.nrows();
        let zv = DVector::from_iterator(
            dim,
            z.values
                .iter()
                .zip(self.feature_mean.iter().zip(self.feature_sd.iter()))
                .map(|(v, (m, s))| (v - m) / s),
        );
        let mut out = Vec::with_capacity(self.classes.len());
        for c in 0..self.classes.len() {
            let cov = self.blended(c);
            let chol = Cholesky::new(cov).ok_or_else(|| {
                Error::Numerical("blended covariance not positive definite despite ridge".into())
            })?;
            let centered = &zv - &self.means[c];
            let solved = chol.solve(&centered);
            let mahalanobis = centered.dot(&solved);
            let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            out.push(mahalanobis + log_det);
        }
        Ok(out)
    }

    /// Class with the smallest score; ties go to class order.
    pub fn classify(&self, z: &FeatureVector) -> Result<(String, Vec<f64>)> {
        let scores = self.scores(z)?;
        let mut best = 0;
        for (c, s) in scores.iter().enumerate() {
            if *s < scores[best] {
                best = c;
            }
        }
        Ok((self.classes[best].clone(), scores))
    }
}

/// Accuracy of one held-out experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub group: String,
    pub n_test: usize,
    pub n_correct: usize,
    pub accuracy: f64,
}

/// Leave-one-group-out evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogoReport {
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub warnings: Vec<String>,
}

/// Train on the complement of each group, score on the group itself, and
/// aggregate the fold accuracies. Test rows whose class never appeared in
/// training are skipped with a warning.
pub fn leave_one_group_out(data: &[FeatureVector], rho: f64) -> Result<LogoReport> {
    let mut groups: Vec<String> = data.iter().map(|fv| fv.group.clone()).collect();
    groups.sort();
    groups.dedup();
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "leave-one-group-out needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    let mut folds = Vec::with_capacity(groups.len());
    let mut warnings = Vec::new();
    for group in &groups {
        let train: Vec<FeatureVector> = data.iter().filter(|fv| &fv.group != group).cloned().collect();
        let test: Vec<&FeatureVector> = data.iter().filter(|fv| &fv.group == group).collect();
        let model = rda_fit(&train, rho)?;
        let mut n_test = 0;
        let mut n_correct = 0;
        for fv in test {
            if !model.classes.contains(&fv.class) {
                warnings.push(format!(
                    "group {group}: class `{}` unseen in training, skipped",
                    fv.class
                ));
                continue;
            }
            let (label, _) = model.classify(fv)?;
            n_test += 1;
            if label == fv.class {
                n_correct += 1;
            }
        }
        let accuracy = if n_test > 0 {
            n_correct as f64 / n_test as f64
        } else {
            f64::NAN
        };
        folds.push(FoldResult {
            group: group.clone(),
            n_test,
            n_correct,
            accuracy,
        });
    }
    let scored: Vec<f64> = folds
        .iter()
        .filter(|f| f.n_test > 0)
        .map(|f| f.accuracy)
        .collect();
    let mean = scored.iter().sum::<f64>() / scored.len().max(1) as f64;
    let sd = if scored.len() > 1 {
        (scored.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (scored.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(LogoReport {
        folds,
        mean_accuracy: mean,
        sd_accuracy: sd,
        warnings,
    })
}

/// Index of the single feature with the highest training accuracy under
/// the same `rho`; ties go to the lower index.
pub fn select_best_feature(data: &[FeatureVector], rho: f64) -> Result<usize> {
    let first = data
        .first()
        .ok_or_else(|| Error::InvalidInput("empty feature set".into()))?;
    let dim = first.values.len();
    let mut best = (0usize, -1.0f64);
    for j in 0..dim {
        let reduced: Vec<FeatureVector> = data
            .iter()
            .map(|fv| FeatureVector {
                values: vec![fv.values[j]],
                names: vec![fv.names[j].clone()],
                group: fv.group.clone(),
                class: fv.class.clone(),
            })
            .collect();
        let model = rda_fit(&reduced, rho)?;
        let correct = reduced
            .iter()
            .filter(|fv| model.classify(fv).map(|(l, _)| l == fv.class).unwrap_or(false))
            .count();
        let accuracy = correct as f64 / reduced.len() as f64;
        if accuracy > best.1 {
            best = (j, accuracy);
        }
    }
    Ok(best.0)
}

/// Read a feature table: `group,class,<feature...>` with a header row.
pub fn read_features_csv<R: Read>(reader: R) -> Result<Vec<FeatureVector>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 3 || headers.get(0) != Some("group") || headers.get(1) != Some("class") {
        return Err(Error::InvalidInput(
            "feature CSV must start with `group,class` followed by feature columns".into(),
        ));
    }
    let names: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let mut values = Vec::with_capacity(names.len());
        for j in 0..names.len() {
            let field = record.get(j + 2).unwrap_or("");
            values.push(field.trim().parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("row {}: cannot parse feature `{field}`", row + 2))
            })?);
        }
        let fv = FeatureVector {
            values,
            names: names.clone(),
            group: record.get(0).unwrap_or("").to_string(),
            class: record.get(1).unwrap_or("").to_string(),
        };
        fv.validate()?;
        out.push(fv);
    }
    Ok(out)
}

/// Write the feature table format read by [`read_features_csv`].
pub fn write_features_csv<W: Write>(data: &[FeatureVector], writer: W) -> Result<()> {
    let first = data
        .first()
        .ok_or_else(|| Error::InvalidInput("empty feature set".into()))?;
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["group".to_string(), "class".to_string()];
    header.extend(first.names.iter().cloned());
    wtr.write_record(&header)?;
    for fv in data {
        if fv.names != first.names {
            return Err(Error::InvalidInput("inconsistent feature names".into()));
        }
        let mut row = vec![fv.group.clone(), fv.class.clone()];
        row.extend(fv.values.iter().map(|v| format!("{v}")));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
