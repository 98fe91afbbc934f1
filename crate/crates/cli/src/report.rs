//! Benchmark report: per-(τ, d, method) error and runtime summaries.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use t2cd_core::{Error, Result, SCHEMA_VERSION};

/// Quartile summary of one metric across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Linear-interpolation quartiles of a sample (sorted internally).
pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let at = |p: f64| -> f64 {
        let h = p * (sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Some(Quartiles {
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
    })
}

/// One aggregated cell of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub tau_hours: f64,
    pub d: f64,
    pub method: String,
    pub reps: usize,
    pub failures: usize,
    pub tau_err: Quartiles,
    pub d_abs_err: Quartiles,
    pub runtime_s: Quartiles,
    pub runtime_mean_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
}

const HEADER: &[&str] = &[
    "schema_version",
    "tau_hours",
    "d",
    "method",
    "reps",
    "failures",
    "tau_err_q1",
    "tau_err_median",
    "tau_err_q3",
    "d_abs_err_q1",
    "d_abs_err_median",
    "d_abs_err_q3",
    "runtime_q1",
    "runtime_median",
    "runtime_q3",
    "runtime_mean",
];

impl BenchmarkReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(HEADER)?;
        for row in &self.rows {
            wtr.write_record(&[
                SCHEMA_VERSION.to_string(),
                format!("{}", row.tau_hours),
                format!("{}", row.d),
                row.method.clone(),
                row.reps.to_string(),
                row.failures.to_string(),
                format!("{}", row.tau_err.q1),
                format!("{}", row.tau_err.median),
                format!("{}", row.tau_err.q3),
                format!("{}", row.d_abs_err.q1),
                format!("{}", row.d_abs_err.median),
                format!("{}", row.d_abs_err.q3),
                format!("{}", row.runtime_s.q1),
                format!("{}", row.runtime_s.median),
                format!("{}", row.runtime_s.q3),
                format!("{}", row.runtime_mean_s),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(HEADER.iter().copied()) {
            return Err(Error::InvalidInput("unrecognized benchmark report header".into()));
        }
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let field = |i: usize| -> &str { record.get(i).unwrap_or("") };
            let num = |i: usize| -> Result<f64> {
                field(i)
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad number `{}` in report", field(i))))
            };
            rows.push(BenchmarkRow {
                tau_hours: num(1)?,
                d: num(2)?,
                method: field(3).to_string(),
                reps: num(4)? as usize,
                failures: num(5)? as usize,
                tau_err: Quartiles {
                    q1: num(6)?,
                    median: num(7)?,
                    q3: num(8)?,
                },
                d_abs_err: Quartiles {
                    q1: num(9)?,
                    median: num(10)?,
                    q3: num(11)?,
                },
                runtime_s: Quartiles {
                    q1: num(12)?,
                    median: num(13)?,
                    q3: num(14)?,
                },
                runtime_mean_s: num(15)?,
            });
        }
        Ok(Self { rows })
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}
