use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;

use super::PrecisionContext;

/// Real scalar of configurable precision.
///
/// Implemented for `f64` (hardware doubles) and [`rug::Float`] (MPFR). Values
/// created through a [`PrecisionContext`] carry that precision; binary
/// operations take the precision of their left operand.
pub trait Real:
    Clone
    + Debug
    + Send
    + Sync
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + Sub<Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + Mul<Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Div<Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    fn from_f64(x: f64, ctx: &PrecisionContext) -> Self;

    fn zero(ctx: &PrecisionContext) -> Self {
        Self::from_f64(0.0, ctx)
    }

    fn one(ctx: &PrecisionContext) -> Self {
        Self::from_f64(1.0, ctx)
    }

    /// Zero at the precision of `self`.
    fn zero_like(&self) -> Self;

    fn pi(ctx: &PrecisionContext) -> Self;

    /// `10^x`, correctly rounded where the backend allows it.
    fn exp10(x: f64, ctx: &PrecisionContext) -> Self;

    /// Spacing of representable values around 1 for this value's precision.
    fn machine_eps(&self) -> f64;

    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self);
    /// `self -= a * b`
    fn mul_sub_assign(&mut self, a: &Self, b: &Self);

    /// Binary exponent `e` with `2^(e-1) <= |self| < 2^e`, `None` for zero.
    fn exponent(&self) -> Option<i32>;
    /// `self * 2^-e` rounded to f64; exact scaling before the rounding.
    fn to_f64_scaled(&self, e: i32) -> f64;

    /// Scientific notation with `sig` significant digits, e.g. `1.50e-3`.
    fn to_sci_string(&self, sig: usize) -> String;

    fn sin(&self) -> Self {
        self.sin_cos().0
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64, _ctx: &PrecisionContext) -> Self {
        x
    }

    fn zero_like(&self) -> Self {
        0.0
    }

    fn pi(_ctx: &PrecisionContext) -> Self {
        std::f64::consts::PI
    }

    fn exp10(x: f64, _ctx: &PrecisionContext) -> Self {
        if x.fract() == 0.0 && x.abs() < 300.0 {
            // Exact decimal power for integer exponents, as a correctly rounded literal.
            format!("1e{}", x as i32).parse().unwrap()
        } else {
            10f64.powf(x)
        }
    }

    fn machine_eps(&self) -> f64 {
        f64::EPSILON
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = a.mul_add(*b, *self);
    }

    fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        *self = (-a).mul_add(*b, *self);
    }

    fn exponent(&self) -> Option<i32> {
        if *self == 0.0 || !self.is_finite() {
            return None;
        }
        let bits = self.abs().to_bits();
        let raw = ((bits >> 52) & 0x7ff) as i32;
        if raw == 0 {
            // subnormal
            let lz = (bits << 12).leading_zeros() as i32;
            Some(-1022 - lz)
        } else {
            Some(raw - 1022)
        }
    }

    fn to_f64_scaled(&self, e: i32) -> f64 {
        let half = e / 2;
        self * 2f64.powi(-half) * 2f64.powi(-(e - half))
    }

    fn to_sci_string(&self, sig: usize) -> String {
        format!("{:.*e}", sig.saturating_sub(1), self)
    }
}

impl Real for Float {
    fn from_f64(x: f64, ctx: &PrecisionContext) -> Self {
        Float::with_val(ctx.bits(), x)
    }

    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }

    fn pi(ctx: &PrecisionContext) -> Self {
        Float::with_val(ctx.bits(), Constant::Pi)
    }

    fn exp10(x: f64, ctx: &PrecisionContext) -> Self {
        Float::with_val(ctx.bits(), x).exp10()
    }

    fn machine_eps(&self) -> f64 {
        2f64.powi(1 - self.prec() as i32)
    }

    fn sqrt(&self) -> Self {
        self.clone().sqrt()
    }

    fn abs(&self) -> Self {
        self.clone().abs()
    }

    fn sin_cos(&self) -> (Self, Self) {
        let cos = Float::new(self.prec());
        self.clone().sin_cos(cos)
    }

    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }

    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn exponent(&self) -> Option<i32> {
        self.get_exp()
    }

    fn to_f64_scaled(&self, e: i32) -> f64 {
        let scaled = self.clone() >> e;
        Float::to_f64(&scaled)
    }

    fn to_sci_string(&self, sig: usize) -> String {
        let (negative, digits, exp) = self.to_sign_string_exp(10, Some(sig.max(1)));
        let sign = if negative { "-" } else { "" };
        match exp {
            None => {
                // zero
                let zeros = "0".repeat(sig.saturating_sub(1));
                if zeros.is_empty() {
                    format!("{sign}0e0")
                } else {
                    format!("{sign}0.{zeros}e0")
                }
            }
            Some(exp) => {
                let (head, tail) = digits.split_at(1);
                if tail.is_empty() {
                    format!("{sign}{head}e{}", exp - 1)
                } else {
                    format!("{sign}{head}.{tail}e{}", exp - 1)
                }
            }
        }
    }
}
