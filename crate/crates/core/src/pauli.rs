//! Single-qubit Pauli labels with phase-free multiplication.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mpmatrix::{CMatrix, Complex, PrecisionContext, Real};

/// Pauli label, identified by its `(x, z)` bits: `I=(0,0)`, `X=(1,0)`,
/// `Z=(0,1)`, `Y=(1,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product with the global phase dropped.
    pub fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    /// The single nonzero entry of row `r` (0 or 1) as `(column, k)` where
    /// the entry equals `i^k`.
    pub fn row_entry(self, r: usize) -> (usize, u8) {
        let col = r ^ usize::from(self.x_bit());
        let k = match self {
            Pauli::I | Pauli::X => 0,
            Pauli::Z => 2 * r as u8,
            Pauli::Y => (3 + 2 * r as u8) % 4,
        };
        (col, k)
    }

    pub fn matrix<R: Real>(self, ctx: &PrecisionContext) -> CMatrix<R> {
        let mut m = CMatrix::zeros(2, 2, ctx);
        for r in 0..2 {
            let (c, k) = self.row_entry(r);
            m.set(r, c, i_pow(k, ctx));
        }
        m
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

pub(crate) fn i_pow<R: Real>(k: u8, ctx: &PrecisionContext) -> Complex<R> {
    match k % 4 {
        0 => Complex::from_f64(1.0, 0.0, ctx),
        1 => Complex::from_f64(0.0, 1.0, ctx),
        2 => Complex::from_f64(-1.0, 0.0, ctx),
        _ => Complex::from_f64(0.0, -1.0, ctx),
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown Pauli label {0:?}")]
pub struct ParsePauliError(String);

impl FromStr for Pauli {
    type Err = ParsePauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => Err(ParsePauliError(s.to_string())),
        }
    }
}

/// Applies `(p ⊗ I) · u` in place, where `p` acts on the most significant
/// qubit of `u`'s index.
pub fn apply_system_pauli<R: Real>(p: Pauli, u: &mut CMatrix<R>) {
    let n = u.rows();
    let half = n / 2;
    assert_eq!(half * 2, n, "dimension must be even");
    let cols = u.cols();
    match p {
        Pauli::I => {}
        Pauli::X => {
            for r in 0..half {
                for c in 0..cols {
                    let a = u.get(r, c).clone();
                    let b = u.get(r + half, c).clone();
                    u.set(r, c, b);
                    u.set(r + half, c, a);
                }
            }
        }
        Pauli::Z => {
            for r in half..n {
                for c in 0..cols {
                    let v = -u.get(r, c).clone();
                    u.set(r, c, v);
                }
            }
        }
        Pauli::Y => {
            // row0' = -i row1, row1' = i row0
            for r in 0..half {
                for c in 0..cols {
                    let a = u.get(r, c).clone();
                    let b = u.get(r + half, c).clone();
                    u.set(r, c, -b.mul_i());
                    u.set(r + half, c, a.mul_i());
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_match_matrix_multiplication_up_to_phase() {
        let ctx = PrecisionContext::double();
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let prod = a.matrix::<f64>(&ctx).matmul(&b.matrix(&ctx));
                let label = a.mul(b).matrix::<f64>(&ctx);
                // prod = phase * label with |phase| = 1
                let overlap = label.adjoint_matmul(&prod).trace();
                let (re, im) = overlap.to_f64();
                assert!((re.hypot(im) - 2.0).abs() < 1e-15, "{a}*{b}");
            }
        }
    }

    #[test]
    fn textbook_matrices() {
        let ctx = PrecisionContext::double();
        let y = Pauli::Y.matrix::<f64>(&ctx);
        assert_eq!(y.get(0, 1).to_f64(), (0.0, -1.0));
        assert_eq!(y.get(1, 0).to_f64(), (0.0, 1.0));
        let z = Pauli::Z.matrix::<f64>(&ctx);
        assert_eq!(z.get(1, 1).to_f64(), (-1.0, 0.0));
    }

    #[test]
    fn in_place_application_matches_kron() {
        let ctx = PrecisionContext::double();
        let u = CMatrix::<f64>::from_fn(4, 4, &ctx, |i, j| {
            Complex::from_f64(i as f64 + 0.5 * j as f64, (i * j) as f64 - 1.0, &ctx)
        });
        for p in Pauli::ALL {
            let mut fast = u.clone();
            apply_system_pauli(p, &mut fast);
            let slow = p.matrix(&ctx).kron(&CMatrix::identity(2, &ctx)).matmul(&u);
            assert_eq!(fast, slow, "{p}");
        }
    }

    #[test]
    fn parse_round_trip() {
        for p in Pauli::ALL {
            assert_eq!(p.to_string().parse::<Pauli>().unwrap(), p);
        }
        assert!("Q".parse::<Pauli>().is_err());
    }
}
