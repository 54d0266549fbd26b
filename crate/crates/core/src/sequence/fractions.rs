use std::fmt;

use serde::{Deserialize, Serialize};

use super::{SequenceError, MAX_ORDER};
use crate::mpmatrix::{PrecisionContext, Real};

/// Normalized interval `s_j` of an order-`N` Uhrig sequence,
/// `s_j = sin((2j-1) pi / (2N+2)) / sin(pi / (2N+2))`.
///
/// The fractions are symmetric, `s_j = s_{N+2-j}`, so `index` is stored in
/// canonical form `min(j, N+2-j)`; equal intervals compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fraction {
    order: u32,
    index: u32,
}

impl Fraction {
    /// `j` in `1..=order+1`.
    pub fn new(order: u32, j: u32) -> Self {
        assert!(order >= 1 && (1..=order + 1).contains(&j), "fraction index out of range");
        Self {
            order,
            index: j.min(order + 2 - j),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_unit(&self) -> bool {
        self.index == 1
    }

    pub fn value<R: Real>(&self, ctx: &PrecisionContext) -> R {
        if self.is_unit() {
            return R::one(ctx);
        }
        let denom = 2.0 * f64::from(self.order) + 2.0;
        let base = R::pi(ctx) / &R::from_f64(denom, ctx);
        let num = (base.clone() * &R::from_f64(f64::from(2 * self.index - 1), ctx)).sin();
        num / &base.sin()
    }
}

/// A free-evolution length in units of the minimum interval: an exact
/// product of timing fractions, unit factors omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Delay(Vec<Fraction>);

impl Delay {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn times(&self, f: Fraction) -> Self {
        let mut factors = self.0.clone();
        if !f.is_unit() {
            factors.push(f);
            factors.sort();
        }
        Self(factors)
    }

    pub fn factors(&self) -> &[Fraction] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value<R: Real>(&self, ctx: &PrecisionContext) -> R {
        let mut acc = R::one(ctx);
        for f in &self.0 {
            acc *= &f.value::<R>(ctx);
        }
        acc
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, frac) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "s{}[{}]", frac.index, frac.order)?;
        }
        Ok(())
    }
}

/// `s_1 .. s_{N+1}` of the order-`N` Uhrig sequence.
pub fn udd_fractions<R: Real>(order: u32, ctx: &PrecisionContext) -> Result<Vec<R>, SequenceError> {
    if order < 1 || order > MAX_ORDER {
        return Err(SequenceError::Order(order.into()));
    }
    Ok((1..=order + 1).map(|j| Fraction::new(order, j).value(ctx)).collect())
}

/// `csc^2(pi / (2N+2))`, the sum of the order-`N` fractions.
pub fn total_normalized_time<R: Real>(order: u32, ctx: &PrecisionContext) -> R {
    let s = (R::pi(ctx) / &R::from_f64(2.0 * f64::from(order) + 2.0, ctx)).sin();
    R::one(ctx) / &(s.clone() * &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    #[test]
    fn low_orders_closed_form() {
        let ctx = PrecisionContext::double();
        assert_eq!(udd_fractions::<f64>(1, &ctx).unwrap(), vec![1.0, 1.0]);
        let two = udd_fractions::<f64>(2, &ctx).unwrap();
        assert_eq!(two[0], 1.0);
        assert!((two[1] - 2.0).abs() < 1e-15);
        assert_eq!(two[2], 1.0);
        assert!((total_normalized_time::<f64>(1, &ctx) - 2.0).abs() < 1e-15);
        assert!((total_normalized_time::<f64>(2, &ctx) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn matches_squared_sine_difference_form() {
        let ctx = PrecisionContext::new(50).unwrap();
        for n in 1..=12u32 {
            let s = udd_fractions::<Float>(n, &ctx).unwrap();
            let x = <Float as Real>::pi(&ctx) / Float::with_val(ctx.bits(), 2 * n + 2);
            let sin2 = |k: u32| {
                let v = (x.clone() * Float::with_val(ctx.bits(), k)).sin();
                v.clone() * &v
            };
            for j in 1..=n + 1 {
                let expected = (sin2(j) - sin2(j - 1)) / sin2(1);
                let diff = (s[j as usize - 1].clone() - expected).abs();
                assert!(diff.to_f64() < 1e-45, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn rejects_order_zero() {
        assert_eq!(udd_fractions::<f64>(0, &PrecisionContext::double()), Err(SequenceError::Order(0)));
    }

    #[test]
    fn symmetric_fractions_share_a_key() {
        assert_eq!(Fraction::new(5, 2), Fraction::new(5, 5));
        assert!(Fraction::new(4, 5).is_unit());
        let d = Delay::unit().times(Fraction::new(3, 2)).times(Fraction::new(2, 2));
        assert_eq!(d, Delay::unit().times(Fraction::new(2, 2)).times(Fraction::new(3, 3)));
        assert_eq!(d.to_string(), "s2[2]*s2[3]");
    }
}
