mod common;

use common::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rug::Float;

use qddlab_core::model::{assemble, from_blocks, pauli_block, pauli_blocks, sample_bath, BathSpec};
use qddlab_core::mpmatrix::PrecisionContext;
use qddlab_core::pauli::Pauli;

fn label(p: Pauli) -> char {
    p.symbol().chars().next().unwrap()
}

/// Operator string with `a` on bath qubit `i`, `b` on bath qubit `j` and
/// identities elsewhere, bath qubit 0 leftmost.
fn two_site(n: usize, i: usize, a: char, j: usize, b: char) -> NMat {
    let factors: Vec<NMat> = (0..n)
        .map(|q| {
            if q == i {
                pauli(a)
            } else if q == j {
                pauli(b)
            } else {
                pauli('I')
            }
        })
        .collect();
    kron_all(&factors)
}

fn brute_force_raw(spec: &BathSpec, mu: Pauli) -> NMat {
    let n = spec.n_bath_qubits();
    let mut b = NMat::zeros(spec.bath_dim(), spec.bath_dim());
    for (pair, (i, j)) in spec.pairs().enumerate() {
        for alpha in Pauli::ALL {
            for beta in Pauli::ALL {
                let c = spec.coefficient(mu, pair, alpha, beta);
                b += two_site(n, i, label(alpha), j, label(beta)).scale(c);
            }
        }
    }
    b
}

#[test]
fn hamiltonian_matches_operator_strings() {
    for n in [2usize, 3] {
        let spec = sample_bath(99 + n as u64, n).unwrap();
        let (coupling, beta) = (1e-4, 1e-6);
        let model = assemble::<Float>(&spec, coupling, beta, &PrecisionContext::new(30).unwrap()).unwrap();

        let mut h_sb = NMat::zeros(2 * spec.bath_dim(), 2 * spec.bath_dim());
        for mu in Pauli::NONTRIVIAL {
            h_sb += pauli(label(mu)).kronecker(&brute_force_raw(&spec, mu));
        }
        h_sb = h_sb.scale(coupling / spectral_norm_hermitian(&h_sb));
        let b_i = brute_force_raw(&spec, Pauli::I);
        let h_b = pauli('I').kronecker(&b_i.scale(beta / spectral_norm_hermitian(&b_i)));

        assert!(max_abs_diff(&to_na(model.h_sb()), &h_sb) < 1e-16, "n={n}");
        assert!(max_abs_diff(&to_na(model.h_b()), &h_b) < 1e-18, "n={n}");
        assert!((spectral_norm_hermitian(&to_na(model.h_sb())) - coupling).abs() < 1e-16);
        assert!((spectral_norm_hermitian(&to_na(model.h_b())) - beta).abs() < 1e-18);
        assert!(max_abs_diff(&to_na(model.h()), &(h_sb + h_b)) < 1e-16);
    }
}

/// Solves `U_pq = sum_nu sigma^nu[p, q] B_nu` entry by entry.
fn decompose_by_solve(u: &NMat) -> [NMat; 4] {
    let d = u.nrows() / 2;
    let labels = ['I', 'X', 'Y', 'Z'];
    let m = NMat::from_fn(4, 4, |row, nu| pauli(labels[nu])[(row / 2, row % 2)]);
    let lu = m.lu();
    let mut out = [NMat::zeros(d, d), NMat::zeros(d, d), NMat::zeros(d, d), NMat::zeros(d, d)];
    for a in 0..d {
        for b in 0..d {
            let v = DVector::from_fn(4, |row, _| u[((row / 2) * d + a, (row % 2) * d + b)]);
            let x = lu.solve(&v).expect("Pauli basis is invertible");
            for nu in 0..4 {
                out[nu][(a, b)] = x[nu];
            }
        }
    }
    out
}

#[test]
fn pauli_blocks_match_linear_solve() {
    let ctx = PrecisionContext::double();
    let mut r = rng(5);
    for d in [1, 2, 4, 8] {
        let u = gaussian_matrix(2 * d, &mut r);
        let expected = decompose_by_solve(&u);
        let um = from_na(&u, &ctx);
        for (nu, p) in Pauli::ALL.into_iter().enumerate() {
            let block = to_na(&pauli_block(&um, p).unwrap());
            assert!(max_abs_diff(&block, &expected[nu]) < 1e-14, "d={d} {p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blocks_reassemble(seed in any::<u64>(), d in 1usize..6) {
        let ctx = PrecisionContext::double();
        let u = from_na(&gaussian_matrix(2 * d, &mut rng(seed)), &ctx);
        let back = from_blocks(&pauli_blocks(&u).unwrap());
        prop_assert!(back.sub(&u).frobenius_norm() < 1e-13);
    }

    #[test]
    fn parseval_on_unitaries(seed in any::<u64>(), d in 1usize..9) {
        let ctx = PrecisionContext::double();
        let u = from_na(&random_unitary(2 * d, &mut rng(seed)), &ctx);
        let total: f64 = pauli_blocks(&u).unwrap().iter().map(|b| b.frobenius_norm().powi(2)).sum();
        prop_assert!((total - d as f64).abs() < 1e-12 * d as f64);
    }

    #[test]
    fn sampled_coefficients_are_uniform_and_reproducible(seed in any::<u64>()) {
        let a = sample_bath(seed, 2).unwrap();
        let b = sample_bath(seed, 2).unwrap();
        prop_assert_eq!(a.coefficients(), b.coefficients());
        prop_assert!(a.coefficients().iter().all(|c| (0.0..1.0).contains(c)));
    }
}

#[test]
fn hamiltonian_is_hermitian_for_every_supported_size() {
    let ctx = PrecisionContext::double();
    assert!(sample_bath(1, 1).is_err());
    for n in 2..=4 {
        let model = assemble::<f64>(&sample_bath(1, n).unwrap(), 1.0, 0.1, &ctx).unwrap();
        assert!(model.h().is_hermitian());
        assert_eq!(model.dim(), 2 << n);
    }
}
