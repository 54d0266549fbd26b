//! System-bath Hamiltonian: one system qubit coupled to a bath of qubits
//! through random two-body bath operators.
//!
//! Index convention: the system qubit is the most significant bit of a
//! row/column index, followed by bath qubits `1..=n` in order. A matrix on the
//! full space therefore splits into four `d_B x d_B` blocks addressed by the
//! system state.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpmatrix::{hermitian_eig, CMatrix, HermitianEigen, LinalgError, PrecisionContext, Real};
use crate::pauli::{i_pow, Pauli};

pub const DEFAULT_BATH_QUBITS: usize = 4;
/// Largest supported bath; keeps the full space within the eigensolver cap.
pub const MAX_BATH_QUBITS: usize = 5;

/// Documented order of [`BathSpec::coefficients`], outermost index first.
pub const INDEX_ORDER: &str = "mu,i,j,alpha,beta";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("bath must have between 2 and {MAX_BATH_QUBITS} qubits, got {0}")]
    InvalidBathSize(usize),
    #[error("raw {0} has zero spectral norm and cannot be rescaled")]
    DegenerateBath(&'static str),
    #[error("expected an even square matrix, got {rows}x{cols}")]
    BadDimension { rows: usize, cols: usize },
    #[error("coupling strengths must satisfy J > 0 and beta >= 0 (got J={coupling}, beta={beta})")]
    InvalidStrength { coupling: f64, beta: f64 },
    #[error("invalid bath coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("bath JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Random two-body bath description.
///
/// Coefficients are stored flat in the order given by [`INDEX_ORDER`]:
/// `mu` and `alpha`/`beta` run over `I, X, Y, Z` and `(i, j)` over ordered
/// pairs of distinct bath qubits in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BathSpecJson", into = "BathSpecJson")]
pub struct BathSpec {
    seed: u64,
    n_bath_qubits: usize,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BathSpecJson {
    seed: u64,
    n_bath_qubits: usize,
    index_order: String,
    coefficients: Vec<f64>,
}

impl TryFrom<BathSpecJson> for BathSpec {
    type Error = ModelError;

    fn try_from(raw: BathSpecJson) -> Result<Self, Self::Error> {
        if raw.index_order != INDEX_ORDER {
            return Err(ModelError::InvalidCoefficients(format!(
                "unsupported index order {:?}",
                raw.index_order
            )));
        }
        BathSpec::from_coefficients(raw.seed, raw.n_bath_qubits, raw.coefficients)
    }
}

impl From<BathSpec> for BathSpecJson {
    fn from(spec: BathSpec) -> Self {
        Self {
            seed: spec.seed,
            n_bath_qubits: spec.n_bath_qubits,
            index_order: INDEX_ORDER.to_string(),
            coefficients: spec.coefficients,
        }
    }
}

/// Uniform draw on `[0, 1)` from the top 53 bits of a ChaCha8 word.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws a bath with i.i.d. uniform coefficients from ChaCha8 seeded with
/// `seed`.
pub fn sample_bath(seed: u64, n_bath_qubits: usize) -> Result<BathSpec, ModelError> {
    check_size(n_bath_qubits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients = (0..BathSpec::coefficient_count(n_bath_qubits))
        .map(|_| uniform(&mut rng))
        .collect();
    Ok(BathSpec {
        seed,
        n_bath_qubits,
        coefficients,
    })
}

fn check_size(n: usize) -> Result<(), ModelError> {
    if (2..=MAX_BATH_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(ModelError::InvalidBathSize(n))
    }
}

impl BathSpec {
    pub fn from_coefficients(seed: u64, n_bath_qubits: usize, coefficients: Vec<f64>) -> Result<Self, ModelError> {
        check_size(n_bath_qubits)?;
        let expected = Self::coefficient_count(n_bath_qubits);
        if coefficients.len() != expected {
            return Err(ModelError::InvalidCoefficients(format!(
                "expected {expected} values, got {}",
                coefficients.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(ModelError::InvalidCoefficients(format!("{bad} is outside [0, 1]")));
        }
        Ok(Self {
            seed,
            n_bath_qubits,
            coefficients,
        })
    }

    /// All-zero coefficient table, mainly for hand-built test baths.
    pub fn zeros(n_bath_qubits: usize) -> Result<Self, ModelError> {
        Self::from_coefficients(0, n_bath_qubits, vec![0.0; Self::coefficient_count(n_bath_qubits)])
    }

    pub fn pair_count(n_bath_qubits: usize) -> usize {
        n_bath_qubits * (n_bath_qubits - 1)
    }

    pub fn coefficients_per_mu(n_bath_qubits: usize) -> usize {
        Self::pair_count(n_bath_qubits) * 16
    }

    pub fn coefficient_count(n_bath_qubits: usize) -> usize {
        4 * Self::coefficients_per_mu(n_bath_qubits)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_bath_qubits(&self) -> usize {
        self.n_bath_qubits
    }

    pub fn bath_dim(&self) -> usize {
        1 << self.n_bath_qubits
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Ordered pairs `(i, j)`, zero-based.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_bath_qubits;
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    /// Flat position of the coefficient for `(mu, pair, alpha, beta)`, where
    /// `pair` is the zero-based position in [`BathSpec::pairs`].
    pub fn index(&self, mu: Pauli, pair: usize, alpha: Pauli, beta: Pauli) -> usize {
        let pos = |p: Pauli| Pauli::ALL.iter().position(|&q| q == p).unwrap();
        ((pos(mu) * Self::pair_count(self.n_bath_qubits) + pair) * 4 + pos(alpha)) * 4 + pos(beta)
    }

    pub fn coefficient(&self, mu: Pauli, pair: usize, alpha: Pauli, beta: Pauli) -> f64 {
        self.coefficients[self.index(mu, pair, alpha, beta)]
    }

    pub fn set_coefficient(&mut self, mu: Pauli, pair: usize, alpha: Pauli, beta: Pauli, value: f64) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(ModelError::InvalidCoefficients(format!("{value} is outside [0, 1]")));
        }
        let idx = self.index(mu, pair, alpha, beta);
        self.coefficients[idx] = value;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bath spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))
    }

    /// Unscaled bath operator `B_mu = sum_{i != j} sum_{alpha, beta} c sigma_i^alpha sigma_j^beta`.
    pub fn raw_operator<R: Real>(&self, mu: Pauli, ctx: &PrecisionContext) -> CMatrix<R> {
        let n = self.n_bath_qubits;
        let dim = self.bath_dim();
        let mut b = CMatrix::zeros(dim, dim, ctx);
        for (pair, (qi, qj)) in self.pairs().enumerate() {
            let (si, sj) = (n - 1 - qi, n - 1 - qj);
            for alpha in Pauli::ALL {
                for beta in Pauli::ALL {
                    let c = self.coefficient(mu, pair, alpha, beta);
                    if c == 0.0 {
                        continue;
                    }
                    let c = R::from_f64(c, ctx);
                    for r in 0..dim {
                        let (ci, ki) = alpha.row_entry((r >> si) & 1);
                        let (cj, kj) = beta.row_entry((r >> sj) & 1);
                        let col = (r & !(1 << si) & !(1 << sj)) | (ci << si) | (cj << sj);
                        let term = i_pow::<R>(ki + kj, ctx).scale(&c);
                        b.get_mut(r, col).add_assign(&term);
                    }
                }
            }
        }
        b
    }
}

/// `H = I ⊗ B_I + sum_mu sigma^mu ⊗ B_mu`, rescaled so that the system-bath
/// part has spectral norm `coupling` and the pure-bath part `beta`.
#[derive(Clone, Debug)]
pub struct HamiltonianModel<R> {
    ctx: PrecisionContext,
    coupling: f64,
    beta: f64,
    blocks: [CMatrix<R>; 4],
    h_sb: CMatrix<R>,
    h_b: CMatrix<R>,
    h: CMatrix<R>,
    eig: HermitianEigen<R>,
}

pub fn assemble<R: Real>(
    spec: &BathSpec,
    coupling: f64,
    beta: f64,
    ctx: &PrecisionContext,
) -> Result<HamiltonianModel<R>, ModelError> {
    if !(coupling > 0.0 && coupling.is_finite() && beta >= 0.0 && beta.is_finite()) {
        return Err(ModelError::InvalidStrength { coupling, beta });
    }
    let d_b = spec.bath_dim();
    let [b_i, b_x, b_y, b_z] = Pauli::ALL.map(|mu| spec.raw_operator::<R>(mu, ctx));

    let raw_sb = from_blocks(&[CMatrix::zeros(d_b, d_b, ctx), b_x.clone(), b_y.clone(), b_z.clone()]);
    let raw_norm = hermitian_eig(&raw_sb)?.spectral_radius();
    if raw_norm.is_zero() {
        return Err(ModelError::DegenerateBath("system-bath coupling"));
    }
    let k_sb = R::from_f64(coupling, ctx) / &raw_norm;
    let h_sb = raw_sb.scale_real(&k_sb);

    let b_i = if beta == 0.0 {
        CMatrix::zeros(d_b, d_b, ctx)
    } else {
        let raw_norm = hermitian_eig(&b_i)?.spectral_radius();
        if raw_norm.is_zero() {
            return Err(ModelError::DegenerateBath("pure-bath term"));
        }
        b_i.scale_real(&(R::from_f64(beta, ctx) / &raw_norm))
    };
    let h_b = CMatrix::identity(2, ctx).kron(&b_i);
    let h = h_b.add(&h_sb);
    let eig = hermitian_eig(&h)?;
    let blocks = [b_i, b_x.scale_real(&k_sb), b_y.scale_real(&k_sb), b_z.scale_real(&k_sb)];
    Ok(HamiltonianModel {
        ctx: *ctx,
        coupling,
        beta,
        blocks,
        h_sb,
        h_b,
        h,
        eig,
    })
}

impl<R: Real> HamiltonianModel<R> {
    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn h(&self) -> &CMatrix<R> {
        &self.h
    }

    pub fn h_sb(&self) -> &CMatrix<R> {
        &self.h_sb
    }

    pub fn h_b(&self) -> &CMatrix<R> {
        &self.h_b
    }

    /// Rescaled bath operator multiplying `sigma^mu` (`I` gives the pure-bath term).
    pub fn block(&self, mu: Pauli) -> &CMatrix<R> {
        &self.blocks[mu as usize]
    }

    pub fn eig(&self) -> &HermitianEigen<R> {
        &self.eig
    }
}

/// `1/2 Tr_S[(sigma^nu ⊗ I) u]`, the coefficient of `sigma^nu` in `u`.
pub fn pauli_block<R: Real>(u: &CMatrix<R>, nu: Pauli) -> Result<CMatrix<R>, ModelError> {
    let n = u.rows();
    if !u.is_square() || n < 2 || n % 2 != 0 {
        return Err(ModelError::BadDimension { rows: n, cols: u.cols() });
    }
    let d = n / 2;
    let ctx = *u.ctx();
    let half = R::from_f64(0.5, &ctx);
    let block = |i, j| {
        let (a, b) = (u.get(i, j), u.get(i + d, j + d));
        let (off_lo, off_hi) = (u.get(i + d, j), u.get(i, j + d));
        match nu {
            Pauli::I => (a + b).scale(&half),
            Pauli::Z => (a - b).scale(&half),
            Pauli::X => (off_lo + off_hi).scale(&half),
            Pauli::Y => (off_hi - off_lo).mul_i().scale(&half),
        }
    };
    Ok(CMatrix::from_fn(d, d, &ctx, block))
}

/// All four Pauli blocks in `I, X, Y, Z` order.
pub fn pauli_blocks<R: Real>(u: &CMatrix<R>) -> Result<[CMatrix<R>; 4], ModelError> {
    Ok([
        pauli_block(u, Pauli::I)?,
        pauli_block(u, Pauli::X)?,
        pauli_block(u, Pauli::Y)?,
        pauli_block(u, Pauli::Z)?,
    ])
}

/// `sum_nu sigma^nu ⊗ blocks[nu]` with blocks in `I, X, Y, Z` order.
pub fn from_blocks<R: Real>(blocks: &[CMatrix<R>; 4]) -> CMatrix<R> {
    let ctx = *blocks[0].ctx();
    let mut acc: Option<CMatrix<R>> = None;
    for (p, b) in Pauli::ALL.iter().zip(blocks) {
        let term = p.matrix::<R>(&ctx).kron(b);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap()
}
