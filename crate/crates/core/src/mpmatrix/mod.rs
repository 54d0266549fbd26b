//! Dense complex linear algebra at a configurable working precision.

mod complex;
mod eig;
mod matrix;
mod precision;
mod real;

pub use complex::Complex;
pub use eig::{hermitian_eig, hermitian_eig_with, EigOptions, HermitianEigen};
pub use matrix::CMatrix;
pub use precision::{PrecisionContext, GUARD_BITS};
pub use real::Real;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("precision of {0} digits is outside the supported range 15..=300")]
    InvalidPrecision(u32),
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {dim} exceeds the eigensolver cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Norms<R> {
    pub frobenius: R,
    pub nuclear: R,
    pub spectral: R,
}

/// Singular values in descending order, from the eigenvalues of `A^† A`.
pub fn singular_values<R: Real>(a: &CMatrix<R>) -> Result<Vec<R>, LinalgError> {
    let gram = a.adjoint_matmul(a);
    let eig = hermitian_eig(&gram)?;
    let zero = R::zero(a.ctx());
    Ok(eig
        .values
        .into_iter()
        .rev()
        .map(|v| if v > zero { v.sqrt() } else { zero.clone() })
        .collect())
}

pub fn norms<R: Real>(a: &CMatrix<R>) -> Result<Norms<R>, LinalgError> {
    let sv = singular_values(a)?;
    let mut nuclear = R::zero(a.ctx());
    for s in &sv {
        nuclear += s;
    }
    Ok(Norms {
        frobenius: a.frobenius_norm(),
        nuclear,
        spectral: sv[0].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    #[test]
    fn identity_norms() {
        let ctx = PrecisionContext::new(30).unwrap();
        let n = norms(&CMatrix::<Float>::identity(16, &ctx)).unwrap();
        assert!((n.frobenius.to_f64() - 4.0).abs() < 1e-25);
        assert!((n.nuclear.to_f64() - 16.0).abs() < 1e-25);
        assert!((n.spectral.to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn zero_norms() {
        let ctx = PrecisionContext::double();
        let n = norms(&CMatrix::<f64>::zeros(3, 3, &ctx)).unwrap();
        assert_eq!((n.frobenius, n.nuclear, n.spectral), (0.0, 0.0, 0.0));
    }
}
