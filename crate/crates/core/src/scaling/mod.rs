//! Parameter sweeps, exponent fits and the closed-form exponent rules.

mod compare;
mod fit;
mod predict;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolve::EvolveError;
use crate::metrics::{MetricsError, NormKind};
use crate::model::{ModelError, DEFAULT_BATH_QUBITS};
use crate::mpmatrix::{LinalgError, PrecisionContext};
use crate::sequence::{Protocol, SequenceSpec};

pub use compare::{compare_tables, CellFit, Comparison, ComparisonReport};
pub use fit::{fit_exponent, FitError, FitOptions, ScalingFit, DEVIATION_FLAG, MIN_POINTS};
pub use predict::{predicted_exponents, protocol_exponent_bound, Exponents};
pub use sweep::{
    aggregate, fit_aggregates, fit_intermediate, protocol_orders, realization_seed, run_sweep, Aggregate,
    IntermediateAggregate, IntermediateFit, Measure, SweepResult,
};

#[derive(Debug, Error)]
pub enum ScalingError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("{cell}: {source}")]
    Evolve {
        cell: String,
        #[source]
        source: EvolveError,
    },
    #[error("{cell}: {source}")]
    Metrics {
        cell: String,
        #[source]
        source: MetricsError,
    },
    #[error("realization {realization}: {source}")]
    Model {
        realization: usize,
        #[source]
        source: ModelError,
    },
    #[error("sweep does not cover {0}")]
    IncompleteSweep(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl ScalingError {
    pub fn is_precision_failure(&self) -> bool {
        matches!(
            self,
            ScalingError::Evolve {
                source: EvolveError::PrecisionExhausted { .. },
                ..
            }
        )
    }
}

/// Working precision requested for a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DigitsSetting {
    /// `20 + ceil(n_max * |min log10(J tau)|)` over the whole sweep.
    #[default]
    Auto,
    Fixed(u32),
}

impl fmt::Display for DigitsSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitsSetting::Auto => f.write_str("auto"),
            DigitsSetting::Fixed(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for DigitsSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(DigitsSetting::Auto);
        }
        let d: u32 = s.trim().parse().map_err(|_| format!("expected 'auto' or an integer, got {s:?}"))?;
        PrecisionContext::new(d).map_err(|e| e.to_string())?;
        Ok(DigitsSetting::Fixed(d))
    }
}

impl Serialize for DigitsSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DigitsSetting::Auto => s.serialize_str("auto"),
            DigitsSetting::Fixed(d) => s.serialize_u32(*d),
        }
    }
}

impl<'de> Deserialize<'de> for DigitsSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(u32),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Int(i) => DigitsSetting::Fixed(i).to_string().parse().map_err(serde::de::Error::custom),
        }
    }
}

fn serialize_protocols<S: serde::Serializer>(p: &[Protocol], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|p| p.to_string()))
}

fn deserialize_protocols<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Protocol>, D::Error> {
    let raw = Vec::<String>::deserialize(d)?;
    raw.iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// One grid cell per protocol.
    #[serde(serialize_with = "serialize_protocols", deserialize_with = "deserialize_protocols")]
    pub sequences: Vec<Protocol>,
    pub log_jtau_grid: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub coupling: f64,
    pub beta: f64,
    pub digits: DigitsSetting,
    pub norm_kind: NormKind,
    pub n_bath_qubits: usize,
    /// Also record errors at every checkpoint.
    pub intermediate: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sequences: Vec::new(),
            log_jtau_grid: (-9..=2).map(f64::from).collect(),
            realizations: 50,
            seed: 0,
            coupling: 1e-4,
            beta: 1e-6,
            digits: DigitsSetting::Auto,
            norm_kind: NormKind::Nuclear,
            n_bath_qubits: DEFAULT_BATH_QUBITS,
            intermediate: false,
        }
    }
}

/// Evenly spaced grid from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, ScalingError> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(ScalingError::InvalidConfig(format!(
            "grid {min}..{max} step {step} is empty or ill-formed"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    // Multiply rather than accumulate so that integer grids stay exact.
    Ok((0..count).map(|k| min + k as f64 * step).collect())
}

impl SweepConfig {
    /// Cells `QDD(n1, n2)` for every pair, `n1` outer loop.
    pub fn qdd_cells(n1_list: &[u32], n2_list: &[u32]) -> Result<Vec<Protocol>, ScalingError> {
        let mut cells = Vec::new();
        for &n1 in n1_list {
            for &n2 in n2_list {
                let spec = SequenceSpec::qdd(n1, n2).map_err(|e| ScalingError::InvalidConfig(e.to_string()))?;
                cells.push(Protocol::Nested(spec));
            }
        }
        Ok(cells)
    }

    pub fn validate(&self) -> Result<(), ScalingError> {
        let bad = |m: &str| Err(ScalingError::InvalidConfig(m.to_string()));
        if self.sequences.is_empty() {
            return bad("no sequences requested");
        }
        if self.realizations < 1 {
            return bad("realizations must be at least 1");
        }
        if self.log_jtau_grid.is_empty() {
            return bad("empty J tau grid");
        }
        if self.log_jtau_grid.iter().any(|x| !x.is_finite()) || self.log_jtau_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("J tau grid must be finite and strictly increasing");
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("need J > 0 and beta >= 0");
        }
        if self.beta >= self.coupling {
            return bad("beta must be smaller than J");
        }
        Ok(())
    }

    /// Precision used for every cell of the sweep.
    pub fn precision(&self) -> Result<PrecisionContext, ScalingError> {
        let digits = match self.digits {
            DigitsSetting::Fixed(d) => d,
            DigitsSetting::Auto => {
                let n_max = self.sequences.iter().map(protocol_exponent_bound).max().unwrap_or(1);
                auto_digits(n_max, &self.log_jtau_grid)
            }
        };
        Ok(PrecisionContext::new(digits)?)
    }
}

/// `20 + ceil(n_max * |min log10(J tau)|)`, capped at the supported maximum.
pub fn auto_digits(n_max: u32, log_jtau_grid: &[f64]) -> u32 {
    let min = log_jtau_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let extra = (f64::from(n_max) * min.abs()).ceil() as u32;
    (20 + extra).min(PrecisionContext::MAX_DIGITS)
}
