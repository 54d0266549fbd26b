use serde::{Deserialize, Serialize};

use crate::sequence::Protocol;

/// Predicted suppression orders of `E_x`, `E_y`, `E_z` and the distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponents {
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub d: u32,
}

impl Exponents {
    pub fn max(&self) -> u32 {
        self.x.max(self.y).max(self.z)
    }
}

/// Closed-form orders for the Z-inside-X two-level sequence.
pub fn predicted_exponents(n1: u32, n2: u32) -> Exponents {
    assert!(n1 >= 1 && n2 >= 1, "orders must be positive");
    let x = n1 + 1;
    let z = if n1 % 2 == 1 && n2 >= 2 * n1 + 2 { 2 * n1 + 2 } else { n2 + 1 };
    let y = match (n1 % 2 == 0, n2 % 2 == 0) {
        (true, true) => n1.max(n2) + 1,
        (true, false) => (n1 + 1).max(n2) + 1,
        (false, true) => n1 + 1,
        (false, false) => n1 + 2,
    };
    Exponents { x, y, z, d: x.min(y).min(z) }
}

/// Largest exponent a protocol is expected to reach, used to size the
/// working precision. Sequences without a closed form get the sum of their
/// level orders plus one per level.
pub fn protocol_exponent_bound(p: &Protocol) -> u32 {
    match p {
        Protocol::Free => 1,
        Protocol::Nested(spec) => {
            if let Some((n1, n2)) = spec.as_qdd() {
                return predicted_exponents(n1, n2).max();
            }
            match spec.levels() {
                [only] => only.order + 1,
                levels => levels.iter().map(|l| l.order + 1).sum(),
            }
        }
    }
}
