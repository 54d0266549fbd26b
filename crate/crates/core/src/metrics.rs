//! Error measures on evolved system-bath unitaries.
//!
//! Norms of the Pauli blocks are evaluated in hardware doubles after an exact
//! power-of-two rescale of the block, so arbitrarily small blocks keep full
//! relative accuracy without a multiprecision eigensolve.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolve::EvolutionResult;
use crate::model::{pauli_block, ModelError};
use crate::mpmatrix::{hermitian_eig, norms, CMatrix, LinalgError, Real};
use crate::pauli::Pauli;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("evolution result has no checkpoint {0}")]
    MissingCheckpoint(usize),
    #[error("evolution result has no checkpoints")]
    NoCheckpoints,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Sum of singular values.
    #[default]
    Nuclear,
    /// Square root of the sum of squared singular values.
    HilbertSchmidt,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Nuclear => "nuclear",
            NormKind::HilbertSchmidt => "hilbert_schmidt",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown norm {0:?} (expected nuclear or hs)")]
pub struct ParseNormError(String);

impl FromStr for NormKind {
    type Err = ParseNormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nuclear" => Ok(NormKind::Nuclear),
            "hs" | "hilbert_schmidt" | "hilbert-schmidt" => Ok(NormKind::HilbertSchmidt),
            _ => Err(ParseNormError(s.to_string())),
        }
    }
}

/// Norm of a block, computed in doubles on `block * 2^-e` and scaled back.
pub fn block_norm<R: Real>(block: &CMatrix<R>, kind: NormKind) -> Result<f64, LinalgError> {
    let (scaled, e) = block.to_f64_scaled();
    let n = match kind {
        NormKind::HilbertSchmidt => scaled.frobenius_norm(),
        NormKind::Nuclear => norms(&scaled)?.nuclear,
    };
    Ok(n * 2f64.powi(e))
}

/// Norm of the `sigma^mu` block of `u`.
pub fn single_axis_error<R: Real>(u: &CMatrix<R>, mu: Pauli, kind: NormKind) -> Result<f64, MetricsError> {
    Ok(block_norm(&pauli_block(u, mu)?, kind)?)
}

/// `(E_x, E_y, E_z)`.
pub fn single_axis_errors<R: Real>(u: &CMatrix<R>, kind: NormKind) -> Result<[f64; 3], MetricsError> {
    Ok([
        single_axis_error(u, Pauli::X, kind)?,
        single_axis_error(u, Pauli::Y, kind)?,
        single_axis_error(u, Pauli::Z, kind)?,
    ])
}

/// Distance from `u` to the nearest `I ⊗ Phi` with unitary `Phi`, for
/// unitary `u`.
///
/// Uses `B_I^† B_I = I - K` with `K = sum_mu B_mu^† B_mu`, which turns the
/// closed form into `D^2 = (2/d_B) sum_i k_i / (1 + sqrt(1 - k_i))` over the
/// eigenvalues `k_i` of `K`. This avoids the cancellation in `2 - ...` that
/// would otherwise bury small distances below the working precision.
pub fn distance_to_identity<R: Real>(u: &CMatrix<R>) -> Result<f64, MetricsError> {
    let blocks = [Pauli::X, Pauli::Y, Pauli::Z].map(|mu| pauli_block(u, mu));
    let mut k: Option<CMatrix<R>> = None;
    for b in blocks {
        let b = b?;
        let term = b.adjoint_matmul(&b);
        k = Some(match k {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    let k = k.expect("three blocks");
    let d_b = k.rows() as f64;
    let (scaled, e) = k.to_f64_scaled();
    let scale = 2f64.powi(e);
    let eig = hermitian_eig(&scaled)?;
    let sum: f64 = eig
        .values
        .iter()
        .map(|v| (v * scale).clamp(0.0, 1.0))
        .map(|k| k / (1.0 + (1.0 - k).sqrt()))
        .sum();
    Ok((2.0 * sum / d_b).sqrt().clamp(0.0, std::f64::consts::SQRT_2))
}

/// Literal closed form `sqrt(2 - (2/(d_S d_B)) ||Tr_S u||_nuclear)` at the
/// working precision of `u`. Valid for any square `u` of even dimension.
pub fn distance_closed_form<R: Real>(u: &CMatrix<R>) -> Result<R, MetricsError> {
    let n = u.rows();
    if !u.is_square() || n < 2 || n % 2 != 0 {
        return Err(ModelError::BadDimension { rows: n, cols: u.cols() }.into());
    }
    let d = n / 2;
    let ctx = *u.ctx();
    let partial = CMatrix::from_fn(d, d, &ctx, |i, j| u.get(i, j) + u.get(i + d, j + d));
    let nuclear = norms(&partial)?.nuclear;
    let two = R::from_f64(2.0, &ctx);
    let d2 = two.clone() - &(two * &nuclear / &R::from_f64(n as f64, &ctx));
    let zero = R::zero(&ctx);
    let root = if d2 > zero { d2.sqrt() } else { zero };
    let cap = R::from_f64(2.0, &ctx).sqrt();
    Ok(if root > cap { cap } else { root })
}

/// `E_mu^(j)` for every checkpoint `j` and `mu in {X, Y, Z}`.
pub fn intermediate_errors<R: Real>(
    result: &EvolutionResult<R>,
    kind: NormKind,
) -> Result<BTreeMap<(usize, Pauli), f64>, MetricsError> {
    if result.u_checkpoints.is_empty() {
        return Err(MetricsError::NoCheckpoints);
    }
    let mut out = BTreeMap::new();
    for (&j, u) in &result.u_checkpoints {
        for mu in Pauli::NONTRIVIAL {
            out.insert((j, mu), single_axis_error(u, mu, kind)?);
        }
    }
    Ok(out)
}

/// `E_mu^(j)` for one checkpoint.
pub fn checkpoint_errors<R: Real>(
    result: &EvolutionResult<R>,
    j: usize,
    kind: NormKind,
) -> Result<[f64; 3], MetricsError> {
    let u = result.u_checkpoints.get(&j).ok_or(MetricsError::MissingCheckpoint(j))?;
    single_axis_errors(u, kind)
}

/// Errors of one cycle at one grid point and bath realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    /// Protocol label, e.g. `QDD(2,4)`.
    pub sequence: String,
    pub n1: u32,
    pub n2: u32,
    pub log10_jtau: f64,
    pub realization: usize,
    pub e_x: f64,
    pub e_y: f64,
    pub e_z: f64,
    pub d: f64,
    pub norm_kind: NormKind,
    pub digits: u32,
    #[serde(skip)]
    pub e_intermediate: BTreeMap<(usize, Pauli), f64>,
}

impl ErrorSample {
    pub fn error(&self, mu: Pauli) -> f64 {
        match mu {
            Pauli::X => self.e_x,
            Pauli::Y => self.e_y,
            Pauli::Z => self.e_z,
            Pauli::I => self.d,
        }
    }
}
