use super::{Complex, PrecisionContext, Real};

/// Dense row-major complex matrix at a fixed [`PrecisionContext`].
///
/// Arithmetic helpers allocate fresh outputs; the only in-place operations
/// are the explicit `*_assign` / `apply_*` methods.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<R> {
    rows: usize,
    cols: usize,
    ctx: PrecisionContext,
    data: Vec<Complex<R>>,
}

impl<R: Real> CMatrix<R> {
    pub fn zeros(rows: usize, cols: usize, ctx: &PrecisionContext) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            ctx: *ctx,
            data: vec![Complex::zero(ctx); rows * cols],
        }
    }

    pub fn identity(n: usize, ctx: &PrecisionContext) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.data[i * n + i] = Complex::one(ctx);
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        ctx: &PrecisionContext,
        mut f: impl FnMut(usize, usize) -> Complex<R>,
    ) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            ctx: *ctx,
            data,
        }
    }

    /// Builds a matrix from `(re, im)` pairs in row-major order.
    pub fn from_f64(rows: usize, cols: usize, entries: &[(f64, f64)], ctx: &PrecisionContext) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        Self::from_fn(rows, cols, ctx, |i, j| {
            let (re, im) = entries[i * cols + j];
            Complex::from_f64(re, im, ctx)
        })
    }

    pub fn diagonal(values: &[R], ctx: &PrecisionContext) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n, ctx);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex::from_real(v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<R> {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Complex<R> {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex<R>) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, &self.ctx, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(n, p, &self.ctx);
        for i in 0..n {
            let out_row = &mut out.data[i * p..(i + 1) * p];
            for k in 0..m {
                let a = &self.data[i * m + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * p..(k + 1) * p];
                for (c, b) in out_row.iter_mut().zip(rhs_row) {
                    c.mul_add_assign(a, b);
                }
            }
        }
        out
    }

    /// `self^† * rhs` without forming the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "adjoint_matmul dimension mismatch");
        let (n, m, p) = (self.cols, self.rows, rhs.cols);
        let mut out = Self::zeros(n, p, &self.ctx);
        for k in 0..m {
            let rhs_row = &rhs.data[k * p..(k + 1) * p];
            for i in 0..n {
                let a = &self.data[k * n + i];
                if a.is_zero() {
                    continue;
                }
                let out_row = &mut out.data[i * p..(i + 1) * p];
                for (c, b) in out_row.iter_mut().zip(rhs_row) {
                    c.conj_mul_add_assign(a, b);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&Complex<R>, &Complex<R>) -> Complex<R>) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            ctx: self.ctx,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale_real(&self, k: &R) -> Self {
        self.map(|z| z.scale(k))
    }

    pub fn scale(&self, k: &Complex<R>) -> Self {
        self.map(|z| z * k)
    }

    pub fn map(&self, f: impl Fn(&Complex<R>) -> Complex<R>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            ctx: self.ctx,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (q, r) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * q, self.cols * r, &self.ctx, |row, col| {
            self.get(row / q, col / r) * rhs.get(row % q, col % r)
        })
    }

    pub fn trace(&self) -> Complex<R> {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut acc = Complex::zero(&self.ctx);
        for i in 0..self.rows {
            acc.add_assign(self.get(i, i));
        }
        acc
    }

    pub fn frobenius_norm(&self) -> R {
        let mut acc = R::zero(&self.ctx);
        for z in &self.data {
            acc.mul_add_assign(&z.re, &z.re);
            acc.mul_add_assign(&z.im, &z.im);
        }
        acc.sqrt()
    }

    pub fn max_abs_entry(&self) -> R {
        self.data
            .iter()
            .map(|z| z.abs())
            .fold(R::zero(&self.ctx), R::max_of)
    }

    /// `||A - A^†||_F`
    pub fn hermiticity_residual(&self) -> R {
        assert!(self.is_square());
        self.sub(&self.adjoint()).frobenius_norm()
    }

    /// `||A^† A - I||_F`
    pub fn unitarity_residual(&self) -> R {
        assert!(self.is_square());
        self.adjoint_matmul(self)
            .sub(&Self::identity(self.rows, &self.ctx))
            .frobenius_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = self.ctx.eps() * 10.0;
        self.hermiticity_residual().to_f64() <= tol * self.frobenius_norm().to_f64()
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square() && self.unitarity_residual().to_f64() <= self.ctx.unitary_tol(self.rows)
    }

    /// Sub-block of size `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, &self.ctx, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Converts to hardware doubles after an exact power-of-two rescale.
    ///
    /// Returns `(M * 2^-e, e)` where `e` is the largest entry exponent, so
    /// entries far below the f64 range survive the conversion. A zero matrix
    /// returns `e = 0`.
    pub fn to_f64_scaled(&self) -> (CMatrix<f64>, i32) {
        let e = self
            .data
            .iter()
            .flat_map(|z| [z.re.exponent(), z.im.exponent()])
            .flatten()
            .max()
            .unwrap_or(0);
        (self.to_f64_with_exponent(e), e)
    }

    pub fn to_f64_with_exponent(&self, e: i32) -> CMatrix<f64> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: PrecisionContext::double(),
            data: self
                .data
                .iter()
                .map(|z| Complex::new(z.re.to_f64_scaled(e), z.im.to_f64_scaled(e)))
                .collect(),
        }
    }

    pub fn to_f64(&self) -> CMatrix<f64> {
        self.to_f64_with_exponent(0)
    }

    /// Largest entry exponent, `None` for the zero matrix.
    pub fn max_exponent(&self) -> Option<i32> {
        self.data
            .iter()
            .flat_map(|z| [z.re.exponent(), z.im.exponent()])
            .flatten()
            .max()
    }
}
