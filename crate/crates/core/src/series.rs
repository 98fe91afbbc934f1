//! Uniformly sampled time series with an index ↔ hours mapping, and the
//! CSV ingestion format shared by the CLI and the simulators.
//!
//! All public APIs speak hours; integer sample indices are an internal
//! currency. The mapping is `time(t) = start_hours + t * dt_hours`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled univariate series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    start_hours: f64,
    dt_hours: f64,
    label: Option<String>,
}

impl TimeSeries {
    /// Build a series, validating length, spacing, and finiteness.
    pub fn new(
        values: Vec<f64>,
        start_hours: f64,
        dt_hours: f64,
        label: Option<String>,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a series needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if !(dt_hours > 0.0) || !dt_hours.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample spacing must be a positive number of hours, got {dt_hours}"
            )));
        }
        if !start_hours.is_finite() {
            return Err(Error::InvalidInput("start time must be finite".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at index {i}; missing values are not supported"
            )));
        }
        Ok(Self {
            values,
            start_hours,
            dt_hours,
            label,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 2 by construction
    }

    pub fn start_hours(&self) -> f64 {
        self.start_hours
    }

    pub fn dt_hours(&self) -> f64 {
        self.dt_hours
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Time in hours of sample `t`.
    pub fn time_of(&self, index: usize) -> f64 {
        self.start_hours + index as f64 * self.dt_hours
    }

    /// First and last sample times in hours.
    pub fn span_hours(&self) -> (f64, f64) {
        (self.start_hours, self.time_of(self.len() - 1))
    }

    /// Hour grid over all samples.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|t| self.time_of(t)).collect()
    }

    /// Nearest sample index for a time in hours; ties round toward the
    /// later index. Errors when `hours` lies outside the sampled span.
    pub fn index_of(&self, hours: f64) -> Result<usize> {
        let (lo, hi) = self.span_hours();
        if !(hours >= lo && hours <= hi) {
            return Err(Error::OutOfSpan { hours, lo, hi });
        }
        let raw = ((hours - self.start_hours) / self.dt_hours).round();
        Ok((raw as usize).min(self.len() - 1))
    }

    /// Copy of the series rescaled by a constant factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Candidate interval `[tau_a, tau_b]` for the change point, in hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateWindow {
    pub tau_a_hours: f64,
    pub tau_b_hours: f64,
}

impl CandidateWindow {
    pub fn new(tau_a_hours: f64, tau_b_hours: f64) -> Result<Self> {
        if !(tau_a_hours < tau_b_hours) {
            return Err(Error::InvalidInput(format!(
                "candidate window requires tau_a < tau_b, got [{tau_a_hours}, {tau_b_hours}]"
            )));
        }
        Ok(Self {
            tau_a_hours,
            tau_b_hours,
        })
    }

    pub fn width_hours(&self) -> f64 {
        self.tau_b_hours - self.tau_a_hours
    }

    /// Index bounds of the window within `ts`; errors if the window leaves
    /// the span or covers fewer than 3 sample indices.
    pub fn index_bounds(&self, ts: &TimeSeries) -> Result<(usize, usize)> {
        let a = ts.index_of(self.tau_a_hours)?;
        let b = ts.index_of(self.tau_b_hours)?;
        if b - a + 1 < 3 {
            return Err(Error::InvalidInput(format!(
                "candidate window [{}, {}] h covers only {} sample indices (need >= 3)",
                self.tau_a_hours,
                self.tau_b_hours,
                b - a + 1
            )));
        }
        Ok((a, b))
    }
}

/// A bundle of series sharing start time, spacing, and length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeries {
    series: Vec<TimeSeries>,
}

impl MultiSeries {
    pub fn new(series: Vec<TimeSeries>) -> Result<Self> {
        let first = series
            .first()
            .ok_or_else(|| Error::InvalidInput("need at least one series".into()))?;
        let (t, s, d) = (first.len(), first.start_hours(), first.dt_hours());
        for (j, ts) in series.iter().enumerate() {
            if ts.len() != t || ts.start_hours() != s || ts.dt_hours() != d {
                return Err(Error::InvalidInput(format!(
                    "series {j} is not aligned with series 0 (length/start/spacing differ)"
                )));
            }
        }
        Ok(Self { series })
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn width(&self) -> usize {
        self.series.len()
    }

    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_series(self) -> Vec<TimeSeries> {
        self.series
    }
}

/// Read the `time_hours,<name>,...` CSV format. The first column is the
/// hour grid (must be uniform and strictly increasing); every remaining
/// column becomes one series labeled by its header.
pub fn read_series_csv<R: Read>(reader: R) -> Result<MultiSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::InvalidInput(
            "series CSV needs a time_hours column plus at least one value column".into(),
        ));
    }
    if headers.get(0) != Some("time_hours") {
        return Err(Error::InvalidInput(format!(
            "first CSV column must be `time_hours`, got `{}`",
            headers.get(0).unwrap_or("")
        )));
    }
    let labels: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
    let mut times = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let parse = |field: &str, what: &str| -> Result<f64> {
            field.trim().parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("row {}: cannot parse {what} `{field}`", row + 2))
            })
        };
        times.push(parse(record.get(0).unwrap_or(""), "time")?);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse(record.get(j + 1).unwrap_or(""), "value")?);
        }
    }
    if times.len() < 2 {
        return Err(Error::InvalidInput("series CSV needs at least 2 rows".into()));
    }
    let start = times[0];
    let dt = (times[times.len() - 1] - start) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("time column must be strictly increasing".into()));
    }
    for (i, t) in times.iter().enumerate() {
        let expect = start + i as f64 * dt;
        if (t - expect).abs() > 1e-6 * dt.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "time column is not uniformly spaced at row {} (got {t}, expected {expect})",
                i + 2
            )));
        }
    }
    let series = labels
        .into_iter()
        .zip(columns)
        .map(|(label, values)| TimeSeries::new(values, start, dt, Some(label)))
        .collect::<Result<Vec<_>>>()?;
    MultiSeries::new(series)
}

/// Write the CSV format understood by [`read_series_csv`].
pub fn write_series_csv<W: Write>(ms: &MultiSeries, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["time_hours".to_string()];
    for (j, ts) in ms.series().iter().enumerate() {
        header.push(ts.label().map(str::to_string).unwrap_or_else(|| format!("series{j}")));
    }
    wtr.write_record(&header)?;
    for t in 0..ms.len() {
        let mut row = vec![format!("{}", ms.series()[0].time_of(t))];
        for ts in ms.series() {
            row.push(format!("{}", ts.values()[t]));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_series_csv_path<P: AsRef<Path>>(path: P) -> Result<MultiSeries> {
    let file = std::fs::File::open(path)?;
    read_series_csv(std::io::BufReader::new(file))
}

pub fn write_series_csv_path<P: AsRef<Path>>(ms: &MultiSeries, path: P) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_series_csv(ms, std::io::BufWriter::new(file))
}
