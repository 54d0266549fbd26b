use std::ops::{Add, Mul, Neg, Sub};

use super::{PrecisionContext, Real};

/// Complex scalar stored as a `(re, im)` pair of a [`Real`] type.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Self { re, im }
    }

    pub fn from_f64(re: f64, im: f64, ctx: &PrecisionContext) -> Self {
        Self::new(R::from_f64(re, ctx), R::from_f64(im, ctx))
    }

    pub fn from_real(re: R) -> Self {
        let im = re.zero_like();
        Self { re, im }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::from_f64(0.0, 0.0, ctx)
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_f64(1.0, 0.0, ctx)
    }

    /// `e^{i theta}`
    pub fn cis(theta: &R) -> Self {
        let (s, c) = theta.sin_cos();
        Self { re: c, im: s }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> R {
        let mut out = self.re.clone() * &self.re;
        out.mul_add_assign(&self.im, &self.im);
        out
    }

    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &R) -> Self {
        Self {
            re: self.re.clone() * k,
            im: self.im.clone() * k,
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `self += a * b`
    pub fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re.mul_add_assign(&a.re, &b.re);
        self.re.mul_sub_assign(&a.im, &b.im);
        self.im.mul_add_assign(&a.re, &b.im);
        self.im.mul_add_assign(&a.im, &b.re);
    }

    /// `self += conj(a) * b`
    pub fn conj_mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re.mul_add_assign(&a.re, &b.re);
        self.re.mul_add_assign(&a.im, &b.im);
        self.im.mul_add_assign(&a.re, &b.im);
        self.im.mul_sub_assign(&a.im, &b.re);
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a, R: Real> Add<&'a Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;

    fn add(self, rhs: &'a Complex<R>) -> Complex<R> {
        Complex {
            re: self.re.clone() + &rhs.re,
            im: self.im.clone() + &rhs.im,
        }
    }
}

impl<'a, R: Real> Sub<&'a Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;

    fn sub(self, rhs: &'a Complex<R>) -> Complex<R> {
        Complex {
            re: self.re.clone() - &rhs.re,
            im: self.im.clone() - &rhs.im,
        }
    }
}

impl<'a, R: Real> Mul<&'a Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;

    fn mul(self, rhs: &'a Complex<R>) -> Complex<R> {
        let mut re = self.re.clone() * &rhs.re;
        re.mul_sub_assign(&self.im, &rhs.im);
        let mut im = self.re.clone() * &rhs.im;
        im.mul_add_assign(&self.im, &rhs.re);
        Complex { re, im }
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Complex<R>;

    fn neg(self) -> Complex<R> {
        Complex {
            re: -self.re,
            im: -self.im,
        }
    }
}
