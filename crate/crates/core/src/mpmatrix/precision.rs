use serde::{Deserialize, Serialize};

use super::LinalgError;

/// Extra binary digits carried beyond the requested decimal precision.
pub const GUARD_BITS: u32 = 32;

/// Working precision, in decimal digits, shared by every arithmetic operation
/// of a computation.
///
/// `digits == 15` selects hardware doubles; anything above selects MPFR
/// floats with `bits()` of mantissa. `eps()` is the tolerance unit used by all
/// residual checks and is deliberately looser than the true unit roundoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrecisionContext {
    digits: u32,
}

impl PrecisionContext {
    pub const DOUBLE_DIGITS: u32 = 15;
    pub const MAX_DIGITS: u32 = 300;

    pub fn new(digits: u32) -> Result<Self, LinalgError> {
        if !(Self::DOUBLE_DIGITS..=Self::MAX_DIGITS).contains(&digits) {
            return Err(LinalgError::InvalidPrecision(digits));
        }
        Ok(Self { digits })
    }

    pub fn double() -> Self {
        Self {
            digits: Self::DOUBLE_DIGITS,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `10^(1 - digits)`.
    pub fn eps(&self) -> f64 {
        10f64.powi(1 - self.digits as i32)
    }

    /// MPFR mantissa bits used for this context.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn is_double(&self) -> bool {
        self.digits == Self::DOUBLE_DIGITS
    }

    /// Unitarity tolerance for a matrix of dimension `dim`.
    pub fn unitary_tol(&self, dim: usize) -> f64 {
        100.0 * self.eps() * dim as f64
    }
}

impl TryFrom<u32> for PrecisionContext {
    type Error = LinalgError;

    fn try_from(digits: u32) -> Result<Self, Self::Error> {
        Self::new(digits)
    }
}

impl From<PrecisionContext> for u32 {
    fn from(ctx: PrecisionContext) -> u32 {
        ctx.digits
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::double()
    }
}
