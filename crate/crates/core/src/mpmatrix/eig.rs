//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq = |a_pq| e^{i phi}`
//! and then applies a real Givens rotation, i.e. the unitary
//!
//! ```text
//! G = [[ c,            s e^{i phi} ],
//!      [ -s e^{-i phi}, c          ]]
//! ```
//!
//! on rows/columns `p, q`. The method only needs `+ - * / sqrt`, so it runs
//! unchanged at any precision.

use super::{CMatrix, Complex, LinalgError, PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EigOptions {
    pub max_sweeps: usize,
    pub max_dim: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 100,
            max_dim: 64,
        }
    }
}

/// `h = V diag(values) V^†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen<R> {
    pub values: Vec<R>,
    pub vectors: CMatrix<R>,
}

impl<R: Real> HermitianEigen<R> {
    pub fn reconstruct(&self) -> CMatrix<R> {
        let ctx = *self.vectors.ctx();
        let scaled = CMatrix::from_fn(self.vectors.rows(), self.vectors.cols(), &ctx, |i, j| {
            self.vectors.get(i, j).scale(&self.values[j])
        });
        scaled.matmul(&self.vectors.adjoint())
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> R {
        let ctx = *self.vectors.ctx();
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(R::zero(&ctx), R::max_of)
    }
}

pub fn hermitian_eig<R: Real>(h: &CMatrix<R>) -> Result<HermitianEigen<R>, LinalgError> {
    hermitian_eig_with(h, EigOptions::default())
}

pub fn hermitian_eig_with<R: Real>(
    h: &CMatrix<R>,
    options: EigOptions,
) -> Result<HermitianEigen<R>, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    if n > options.max_dim {
        return Err(LinalgError::DimensionTooLarge {
            dim: n,
            cap: options.max_dim,
        });
    }
    let ctx = *h.ctx();
    let frob = h.frobenius_norm();
    let residual = h.hermiticity_residual();
    if residual.to_f64() > 10.0 * ctx.eps() * frob.to_f64() {
        return Err(LinalgError::NotHermitian {
            residual: residual.to_f64(),
        });
    }

    let mut a = h.clone();
    // Force an exactly Hermitian working copy.
    for i in 0..n {
        a.get_mut(i, i).im = R::zero(&ctx);
        for j in (i + 1)..n {
            let upper = a.get(i, j).clone();
            a.set(j, i, upper.conj());
        }
    }
    let mut v = CMatrix::identity(n, &ctx);

    if !frob.is_zero() && n > 1 {
        let meps = frob.machine_eps();
        let target = frob.clone() * &R::from_f64(meps * n as f64, &ctx);
        let negligible = frob.clone() * &R::from_f64(meps / n as f64, &ctx);
        let mut converged = false;
        for _sweep in 0..options.max_sweeps {
            if off_diagonal_norm(&a) <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, &negligible, &ctx);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > target {
            return Err(LinalgError::NoConvergence {
                sweeps: options.max_sweeps,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a.get(i, i).re.clone()).collect();
    let vectors = CMatrix::from_fn(n, n, &ctx, |i, j| v.get(i, order[j]).clone());
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<R: Real>(a: &CMatrix<R>) -> R {
    let ctx = *a.ctx();
    let n = a.rows();
    let mut acc = R::zero(&ctx);
    for i in 0..n {
        for j in (i + 1)..n {
            let z = a.get(i, j);
            acc.mul_add_assign(&z.re, &z.re);
            acc.mul_add_assign(&z.im, &z.im);
        }
    }
    (acc * &R::from_f64(2.0, &ctx)).sqrt()
}

fn rotate<R: Real>(
    a: &mut CMatrix<R>,
    v: &mut CMatrix<R>,
    p: usize,
    q: usize,
    negligible: &R,
    ctx: &PrecisionContext,
) {
    let g = a.get(p, q).clone();
    let g_abs = g.abs();
    if g_abs <= *negligible {
        if !g_abs.is_zero() {
            a.set(p, q, Complex::zero(ctx));
            a.set(q, p, Complex::zero(ctx));
        }
        return;
    }
    let n = a.rows();
    let phase = Complex::new(g.re.clone() / &g_abs, g.im.clone() / &g_abs);
    let app = a.get(p, p).re.clone();
    let aqq = a.get(q, q).re.clone();
    let one = R::one(ctx);

    let two_g = g_abs.clone() + &g_abs;
    let zeta = (aqq.clone() - &app) / &two_g;
    let root = (one.clone() + &(zeta.clone() * &zeta)).sqrt();
    let t = if zeta >= R::zero(ctx) {
        one.clone() / &(zeta.clone() + &root)
    } else {
        -(one.clone() / &(root - &zeta))
    };
    let c = one.clone() / &(one + &(t.clone() * &t)).sqrt();
    let s = t.clone() * &c;

    // G_pq = s e^{i phi}, G_qp = -s e^{-i phi}
    let g_pq = phase.scale(&s);
    let g_qp = -phase.conj().scale(&s);

    // A <- A G, V <- V G
    for m in [&mut *a, &mut *v] {
        for k in 0..n {
            let akp = m.get(k, p).clone();
            let akq = m.get(k, q).clone();
            let mut new_p = akp.scale(&c);
            new_p.mul_add_assign(&akq, &g_qp);
            let mut new_q = akq.scale(&c);
            new_q.mul_add_assign(&akp, &g_pq);
            m.set(k, p, new_p);
            m.set(k, q, new_q);
        }
    }
    // A <- G^† A; only off-pivot rows need the explicit update.
    let gd_pq = g_qp.conj();
    let gd_qp = g_pq.conj();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let apk = a.get(p, k).clone();
        let aqk = a.get(q, k).clone();
        let mut new_p = apk.scale(&c);
        new_p.mul_add_assign(&gd_pq, &aqk);
        let mut new_q = aqk.scale(&c);
        new_q.mul_add_assign(&gd_qp, &apk);
        a.set(p, k, new_p);
        a.set(q, k, new_q);
    }
    let shift = t * &g_abs;
    a.set(p, p, Complex::from_real(app - &shift));
    a.set(q, q, Complex::from_real(aqq + &shift));
    a.set(p, q, Complex::zero(ctx));
    a.set(q, p, Complex::zero(ctx));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    #[test]
    fn diagonal_input_sorts_eigenvalues() {
        let ctx = PrecisionContext::double();
        let h = CMatrix::diagonal(&[3.0, 1.0, 2.0], &ctx);
        let e = hermitian_eig(&h).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // permutation matrix
        for j in 0..3 {
            let nonzero = (0..3).filter(|&i| !e.vectors.get(i, j).is_zero()).count();
            assert_eq!(nonzero, 1);
        }
    }

    #[test]
    fn pauli_x_textbook_eigenpairs() {
        let ctx = PrecisionContext::new(40).unwrap();
        let x = CMatrix::<Float>::from_f64(2, 2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)], &ctx);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.values[0].to_f64() + 1.0).abs() < 1e-35);
        assert!((e.values[1].to_f64() - 1.0).abs() < 1e-35);
        let r = 0.5f64.sqrt();
        // column for -1 is (1, -1)/sqrt2 up to phase
        let (v0, v1) = (e.vectors.get(0, 0).to_f64(), e.vectors.get(1, 0).to_f64());
        assert!((v0.0.hypot(v0.1) - r).abs() < 1e-14);
        let ratio_re = (v1.0 * v0.0 + v1.1 * v0.1) / (v0.0 * v0.0 + v0.1 * v0.1);
        assert!((ratio_re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let ctx = PrecisionContext::double();
        let m = CMatrix::<f64>::from_f64(2, 2, &[(0., 0.), (1., 0.), (2., 0.), (0., 0.)], &ctx);
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn rejects_oversized_input() {
        let ctx = PrecisionContext::double();
        let m = CMatrix::<f64>::identity(4, &ctx);
        let opts = EigOptions {
            max_dim: 3,
            ..EigOptions::default()
        };
        assert!(matches!(
            hermitian_eig_with(&m, opts),
            Err(LinalgError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn sweep_limit_reports_no_convergence() {
        let ctx = PrecisionContext::double();
        let m = CMatrix::<f64>::from_f64(
            3,
            3,
            &[(1., 0.), (0.3, 0.2), (0.1, 0.), (0.3, -0.2), (2., 0.), (0.5, 0.5), (0.1, 0.), (0.5, -0.5), (3., 0.)],
            &ctx,
        );
        let opts = EigOptions {
            max_sweeps: 1,
            ..EigOptions::default()
        };
        assert!(matches!(
            hermitian_eig_with(&m, opts),
            Err(LinalgError::NoConvergence { sweeps: 1 })
        ));
        assert!(hermitian_eig(&m).is_ok());
    }
}
