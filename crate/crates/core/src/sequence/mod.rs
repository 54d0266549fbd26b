//! Nested decoupling sequences: timing fractions, a small description
//! language, and compilation to flat pulse schedules.

mod compile;
mod fractions;
mod parse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::Pauli;

pub use compile::{compile, pulse_count, Checkpoint, Event, PulseSchedule};
pub use fractions::{total_normalized_time, udd_fractions, Delay, Fraction};
pub use parse::parse;

pub const MAX_DEPTH: usize = 4;
pub const MAX_ORDER: u32 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("levels {outer} and {inner} both use axis {axis} (outermost level is 0)")]
    AdjacentAxis { outer: usize, inner: usize, axis: Axis },
    #[error("order {0} is outside 1..={MAX_ORDER}")]
    Order(u64),
    #[error("nesting depth {0} is outside 1..={MAX_DEPTH}")]
    Depth(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Z => Pauli::Z,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Z => "Z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Level {
    pub axis: Axis,
    pub order: u32,
}

/// Validated nesting description, innermost level first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    levels: Vec<Level>,
}

impl SequenceSpec {
    pub fn new(levels: Vec<Level>) -> Result<Self, SequenceError> {
        if levels.is_empty() || levels.len() > MAX_DEPTH {
            return Err(SequenceError::Depth(levels.len()));
        }
        for l in &levels {
            if l.order < 1 || l.order > MAX_ORDER {
                return Err(SequenceError::Order(l.order.into()));
            }
        }
        let depth = levels.len();
        for (k, pair) in levels.windows(2).enumerate() {
            if pair[0].axis == pair[1].axis {
                return Err(SequenceError::AdjacentAxis {
                    outer: depth - 2 - k,
                    inner: depth - 1 - k,
                    axis: pair[0].axis,
                });
            }
        }
        Ok(Self { levels })
    }

    pub fn udd(axis: Axis, order: u32) -> Result<Self, SequenceError> {
        Self::new(vec![Level { axis, order }])
    }

    /// Inner Z-type sequence of order `n1` nested in an outer X-type
    /// sequence of order `n2`.
    pub fn qdd(n1: u32, n2: u32) -> Result<Self, SequenceError> {
        Self::new(vec![
            Level { axis: Axis::Z, order: n1 },
            Level { axis: Axis::X, order: n2 },
        ])
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn outermost(&self) -> Level {
        *self.levels.last().unwrap()
    }

    /// `(n1, n2)` when this is a Z-inside-X two-level sequence.
    pub fn as_qdd(&self) -> Option<(u32, u32)> {
        match self.levels.as_slice() {
            [Level { axis: Axis::Z, order: n1 }, Level { axis: Axis::X, order: n2 }] => Some((*n1, *n2)),
            _ => None,
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((n1, n2)) = self.as_qdd() {
            return write!(f, "QDD({n1},{n2})");
        }
        if let [only] = self.levels.as_slice() {
            return write!(f, "UDD({},{})", only.axis, only.order);
        }
        f.write_str("NEST(")?;
        for (k, l) in self.levels.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", l.axis, l.order)?;
        }
        f.write_str(")")
    }
}

impl FromStr for SequenceSpec {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// What to run between the start and end of one cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// No pulses: a single free evolution of one minimum interval.
    Free,
    Nested(SequenceSpec),
}

impl Protocol {
    pub fn schedule(&self) -> PulseSchedule {
        match self {
            Protocol::Free => PulseSchedule::free(),
            Protocol::Nested(spec) => compile(spec),
        }
    }

    pub fn spec(&self) -> Option<&SequenceSpec> {
        match self {
            Protocol::Free => None,
            Protocol::Nested(spec) => Some(spec),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Free => f.write_str("FREE"),
            Protocol::Nested(spec) => spec.fmt(f),
        }
    }
}

impl FromStr for Protocol {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("free") {
            Ok(Protocol::Free)
        } else {
            parse(s).map(Protocol::Nested)
        }
    }
}
