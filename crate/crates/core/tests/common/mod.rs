#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qddlab_core::mpmatrix::{CMatrix, PrecisionContext, Real};

pub type C64 = Complex<f64>;
pub type NMat = DMatrix<C64>;

pub fn to_na<R: Real>(m: &CMatrix<R>) -> NMat {
    let f = m.to_f64();
    NMat::from_fn(m.rows(), m.cols(), |i, j| {
        let (re, im) = f.get(i, j).to_f64();
        C64::new(re, im)
    })
}

pub fn from_na(m: &NMat, ctx: &PrecisionContext) -> CMatrix<f64> {
    let entries: Vec<(f64, f64)> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)].re, m[(i, j)].im))
        .collect();
    CMatrix::from_f64(m.nrows(), m.ncols(), &entries, ctx)
}

pub fn from_na_at<R: Real>(m: &NMat, ctx: &PrecisionContext) -> CMatrix<R> {
    CMatrix::from_fn(m.nrows(), m.ncols(), ctx, |i, j| {
        qddlab_core::mpmatrix::Complex::from_f64(m[(i, j)].re, m[(i, j)].im, ctx)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> NMat {
    NMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> NMat {
    let g = gaussian_matrix(n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> NMat {
    let qr = gaussian_matrix(n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = NMat::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    q * phases
}

pub fn pauli(label: char) -> NMat {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match label {
        'I' => NMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => NMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => NMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => NMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("unknown Pauli {label}"),
    }
}

/// Kronecker product of a list of factors, leftmost most significant.
pub fn kron_all(factors: &[NMat]) -> NMat {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

pub fn max_abs_diff(a: &NMat, b: &NMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn spectral_norm_hermitian(h: &NMat) -> f64 {
    h.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
}

/// `min over unitary Phi of ||U - I ⊗ Phi||_F / sqrt(dim)` by Riemannian
/// gradient ascent of `Re Tr(M^† Phi)`, `M` the partial trace over the
/// system, with `Phi` updated through exponentials of its generator.
pub fn distance_by_descent(u: &NMat) -> f64 {
    let n = u.nrows();
    let d = n / 2;
    let m = u.view((0, 0), (d, d)) + u.view((d, d), (d, d));
    let step = 1.0 / m.norm().max(1e-300);
    let mut phi = NMat::identity(d, d);
    for _ in 0..200_000 {
        let a = phi.adjoint() * &m;
        let g = (&a - a.adjoint()).scale(0.5);
        if g.norm() < 1e-14 {
            break;
        }
        phi = &phi * g.scale(step).exp();
    }
    let overlap = (m.adjoint() * &phi).trace().re;
    (2.0 - 2.0 * overlap / n as f64).max(0.0).sqrt()
}
