//! CSV and JSON artifacts of a sweep.
//!
//! Computed numbers are written with 25 significant digits. Grid values are
//! written in shortest round-trip form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{ErrorSample, NormKind};
use crate::scaling::{Aggregate, CellFit, IntermediateAggregate, IntermediateFit, Measure, SweepConfig, SweepResult};

pub const SAMPLES_HEADER: [&str; 10] = [
    "n1",
    "n2",
    "log10_jtau",
    "realization",
    "e_x",
    "e_y",
    "e_z",
    "d",
    "norm_kind",
    "digits",
];

pub const AGGREGATES_HEADER: [&str; 10] = [
    "sequence",
    "n1",
    "n2",
    "log10_jtau",
    "mu",
    "count",
    "mean_error",
    "stderr",
    "log10_mean",
    "log10_stderr",
];

pub const FITS_HEADER: [&str; 13] = [
    "n1",
    "n2",
    "mu",
    "slope_raw",
    "n_hat",
    "window",
    "r2",
    "stderr",
    "intercept",
    "points",
    "flagged",
    "sequence",
    "status",
];

pub const INTERMEDIATE_HEADER: [&str; 8] = ["sequence", "n1", "n2", "log10_jtau", "j", "mu", "mean_error", "stderr"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Malformed { path: String, line: u64, message: String },
    #[error("{0}: no data rows")]
    Empty(String),
}

/// 25 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.24e}")
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), IoError> {
    let csv_err = |source| IoError::Csv {
        path: display(path),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| IoError::File {
        path: display(path),
        source,
    })
}

/// Reads a CSV with the given header; returns the data records with their
/// line numbers.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>, IoError> {
    let csv_err = |source| IoError::Csv {
        path: display(path),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let found = r.headers().map_err(csv_err)?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(IoError::Malformed {
            path: display(path),
            line: 1,
            message: format!("expected header {}", header.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(IoError::Empty(display(path)));
    }
    Ok(rows)
}

struct Fields<'a> {
    path: &'a Path,
    line: u64,
    rec: &'a csv::StringRecord,
    header: &'a [&'a str],
}

impl Fields<'_> {
    fn get<T: std::str::FromStr>(&self, name: &str) -> Result<T, IoError>
    where
        T::Err: std::fmt::Display,
    {
        let idx = self.header.iter().position(|h| *h == name).expect("known column");
        let raw = self.rec.get(idx).unwrap_or("");
        raw.trim().parse().map_err(|e: T::Err| IoError::Malformed {
            path: display(self.path),
            line: self.line,
            message: format!("column {name}: {e} ({raw:?})"),
        })
    }
}

pub fn write_samples(path: &Path, samples: &[ErrorSample]) -> Result<(), IoError> {
    write_rows(
        path,
        &SAMPLES_HEADER,
        samples.iter().map(|s| {
            vec![
                s.n1.to_string(),
                s.n2.to_string(),
                s.log10_jtau.to_string(),
                s.realization.to_string(),
                sci(s.e_x),
                sci(s.e_y),
                sci(s.e_z),
                sci(s.d),
                s.norm_kind.to_string(),
                s.digits.to_string(),
            ]
        }),
    )
}

/// Label of the protocol behind an `(n1, n2)` pair of `samples.csv`.
fn sequence_for_orders(n1: u32, n2: u32) -> String {
    match (n1, n2) {
        (0, 0) => "FREE".to_string(),
        (n, 0) => format!("UDD(Z,{n})"),
        (0, n) => format!("UDD(X,{n})"),
        (a, b) => format!("QDD({a},{b})"),
    }
}

/// Reads `samples.csv`. The sequence label is reconstructed from the orders.
pub fn read_samples(path: &Path) -> Result<Vec<ErrorSample>, IoError> {
    read_rows(path, &SAMPLES_HEADER)?
        .iter()
        .map(|(line, rec)| {
            let f = Fields {
                path,
                line: *line,
                rec,
                header: &SAMPLES_HEADER,
            };
            let n1 = f.get("n1")?;
            let n2 = f.get("n2")?;
            Ok(ErrorSample {
                sequence: sequence_for_orders(n1, n2),
                n1,
                n2,
                log10_jtau: f.get("log10_jtau")?,
                realization: f.get("realization")?,
                e_x: f.get("e_x")?,
                e_y: f.get("e_y")?,
                e_z: f.get("e_z")?,
                d: f.get("d")?,
                norm_kind: f.get::<NormKind>("norm_kind")?,
                digits: f.get("digits")?,
                e_intermediate: Default::default(),
            })
        })
        .collect()
}

/// One row per grid point and measure.
pub fn write_aggregates(path: &Path, aggregates: &[Aggregate]) -> Result<(), IoError> {
    let rows = aggregates.iter().flat_map(|a| {
        Measure::ALL.into_iter().map(move |m| {
            let mean = a.mean_of(m);
            let se = a.stderr_of(m);
            vec![
                a.sequence.clone(),
                a.n1.to_string(),
                a.n2.to_string(),
                a.log10_jtau.to_string(),
                m.to_string(),
                a.count.to_string(),
                sci(mean),
                sci(se),
                sci(mean.log10()),
                sci(se / (mean * std::f64::consts::LN_10)),
            ]
        })
    });
    write_rows(path, &AGGREGATES_HEADER, rows)
}

pub fn read_aggregates(path: &Path) -> Result<Vec<Aggregate>, IoError> {
    let mut out: Vec<Aggregate> = Vec::new();
    for (line, rec) in read_rows(path, &AGGREGATES_HEADER)? {
        let f = Fields {
            path,
            line,
            rec: &rec,
            header: &AGGREGATES_HEADER,
        };
        let sequence: String = f.get("sequence")?;
        let log10_jtau: f64 = f.get("log10_jtau")?;
        let m: Measure = f.get("mu")?;
        let idx = Measure::ALL.iter().position(|x| *x == m).expect("measure");
        let pos = out
            .iter()
            .position(|a| a.sequence == sequence && a.log10_jtau == log10_jtau);
        let agg = match pos {
            Some(p) => &mut out[p],
            None => {
                out.push(Aggregate {
                    sequence,
                    n1: f.get("n1")?,
                    n2: f.get("n2")?,
                    log10_jtau,
                    count: f.get("count")?,
                    mean: [f64::NAN; 4],
                    stderr: [f64::NAN; 4],
                });
                out.last_mut().expect("just pushed")
            }
        };
        agg.mean[idx] = f.get("mean_error")?;
        agg.stderr[idx] = f.get("stderr")?;
    }
    if let Some(a) = out.iter().find(|a| a.mean.iter().any(|v| v.is_nan())) {
        return Err(IoError::Malformed {
            path: display(path),
            line: 0,
            message: format!("{} at log10_jtau={} lacks a measure", a.sequence, a.log10_jtau),
        });
    }
    Ok(out)
}

fn fit_row(n1: u32, n2: u32, mu: String, sequence: &str, fit: &Result<crate::scaling::ScalingFit, crate::scaling::FitError>) -> Vec<String> {
    match fit {
        Ok(f) => vec![
            n1.to_string(),
            n2.to_string(),
            mu,
            sci(f.slope_raw),
            f.n_hat.to_string(),
            format!("{}:{}", f.window.0, f.window.1),
            sci(f.r2),
            sci(f.stderr),
            sci(f.intercept),
            f.points.to_string(),
            f.flagged().to_string(),
            sequence.to_string(),
            "ok".to_string(),
        ],
        Err(e) => {
            let mut row = vec![n1.to_string(), n2.to_string(), mu];
            row.extend(std::iter::repeat(String::new()).take(8));
            row.push(sequence.to_string());
            row.push(e.to_string());
            row
        }
    }
}

pub fn write_fits(path: &Path, fits: &[CellFit]) -> Result<(), IoError> {
    write_rows(
        path,
        &FITS_HEADER,
        fits.iter()
            .map(|c| fit_row(c.n1, c.n2, c.measure.to_string(), &c.sequence, &c.fit)),
    )
}

pub fn write_intermediate_fits(path: &Path, fits: &[IntermediateFit]) -> Result<(), IoError> {
    let mut header: Vec<&str> = FITS_HEADER.to_vec();
    header.insert(2, "j");
    write_rows(
        path,
        &header,
        fits.iter().map(|c| {
            let mut row = fit_row(c.n1, c.n2, c.mu.symbol().to_ascii_lowercase(), &c.sequence, &c.fit);
            row.insert(2, c.j.to_string());
            row
        }),
    )
}

/// Whether a checkpoint duplicates the previous one and is left out of
/// reports: for an even outer order the last two checkpoints coincide.
pub fn is_duplicate_checkpoint(n2: u32, j: usize) -> bool {
    n2 > 0 && n2 % 2 == 0 && j == n2 as usize + 2
}

pub fn write_intermediate(path: &Path, rows: &[IntermediateAggregate]) -> Result<(), IoError> {
    write_rows(
        path,
        &INTERMEDIATE_HEADER,
        rows.iter().filter(|r| !is_duplicate_checkpoint(r.n2, r.j)).map(|r| {
            vec![
                r.sequence.clone(),
                r.n1.to_string(),
                r.n2.to_string(),
                r.log10_jtau.to_string(),
                r.j.to_string(),
                r.mu.symbol().to_ascii_lowercase(),
                sci(r.mean),
                sci(r.stderr),
            ]
        }),
    )
}

pub fn read_intermediate(path: &Path) -> Result<Vec<IntermediateAggregate>, IoError> {
    read_rows(path, &INTERMEDIATE_HEADER)?
        .iter()
        .map(|(line, rec)| {
            let f = Fields {
                path,
                line: *line,
                rec,
                header: &INTERMEDIATE_HEADER,
            };
            Ok(IntermediateAggregate {
                sequence: f.get("sequence")?,
                n1: f.get("n1")?,
                n2: f.get("n2")?,
                log10_jtau: f.get("log10_jtau")?,
                j: f.get("j")?,
                mu: f.get("mu")?,
                count: 0,
                mean: f.get("mean_error")?,
                stderr: f.get("stderr")?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellManifest {
    pub sequence: String,
    pub n1: u32,
    pub n2: u32,
    pub digits: u32,
    /// Bath seeds, one per realization.
    pub seeds: Vec<u64>,
}

/// Everything needed to rerun a sweep and reproduce its CSV files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    pub master_seed: u64,
    pub digits: u32,
    pub cells: Vec<CellManifest>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub replay: String,
}

impl RunManifest {
    pub fn new(result: &SweepResult, started_unix: u64, finished_unix: u64) -> Self {
        let cells = result
            .config
            .sequences
            .iter()
            .map(|p| {
                let (n1, n2) = crate::scaling::protocol_orders(p);
                CellManifest {
                    sequence: p.to_string(),
                    n1,
                    n2,
                    digits: result.precision.digits(),
                    seeds: result.realization_seeds.clone(),
                }
            })
            .collect();
        Self {
            tool: "qddlab".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: result.config.clone(),
            master_seed: result.config.seed,
            digits: result.precision.digits(),
            cells,
            started_unix,
            finished_unix,
            replay: "qddlab sweep --replay manifest.json --out <dir>".to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        let text = serde_json::to_string_pretty(self).map_err(|source| IoError::Json {
            path: display(path),
            source,
        })?;
        fs::write(path, text + "\n").map_err(|source| IoError::File {
            path: display(path),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = fs::read_to_string(path).map_err(|source| IoError::File {
            path: display(path),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| IoError::Json {
            path: display(path),
            source,
        })
    }
}
