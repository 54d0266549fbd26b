//! Piecewise-constant evolution under a pulse schedule.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::HamiltonianModel;
use crate::mpmatrix::{CMatrix, Complex, PrecisionContext, Real};
use crate::pauli::apply_system_pauli;
use crate::sequence::{Delay, PulseSchedule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error(
        "unitarity residual {residual:e} exceeds {tolerance:e} at {digits} digits ({location}); raise the working precision"
    )]
    PrecisionExhausted {
        residual: f64,
        tolerance: f64,
        digits: u32,
        location: String,
    },
    #[error("minimum interval must be positive and finite")]
    InvalidInterval,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult<R> {
    pub u_final: CMatrix<R>,
    pub u_checkpoints: BTreeMap<usize, CMatrix<R>>,
    pub tau: R,
    pub precision: PrecisionContext,
}

/// Minimum interval `tau` for a dimensionless `J tau = 10^log10_jtau`.
pub fn tau_from_log_jtau<R: Real>(log10_jtau: f64, coupling: f64, ctx: &PrecisionContext) -> R {
    R::exp10(log10_jtau, ctx) / &R::from_f64(coupling, ctx)
}

/// `exp(-i H t)` from the cached eigendecomposition of `H`.
pub fn propagator<R: Real>(model: &HamiltonianModel<R>, t: &R) -> CMatrix<R> {
    let ctx = *model.ctx();
    let n = model.dim();
    if t.is_zero() {
        return CMatrix::identity(n, &ctx);
    }
    let eig = model.eig();
    let phases: Vec<Complex<R>> = eig
        .values
        .iter()
        .map(|lambda| Complex::cis(&-(lambda.clone() * t)))
        .collect();
    let v = &eig.vectors;
    let scaled = CMatrix::from_fn(n, n, &ctx, |i, k| v.get(i, k) * &phases[k]);
    scaled.matmul(&v.adjoint())
}

fn check_unitary<R: Real>(u: &CMatrix<R>, location: impl FnOnce() -> String) -> Result<(), EvolveError> {
    let ctx = u.ctx();
    let tolerance = ctx.unitary_tol(u.rows());
    let residual = u.unitarity_residual().to_f64();
    if residual <= tolerance {
        Ok(())
    } else {
        Err(EvolveError::PrecisionExhausted {
            residual,
            tolerance,
            digits: ctx.digits(),
            location: location(),
        })
    }
}

/// Applies the schedule to the identity, earliest event rightmost.
///
/// Each distinct delay is exponentiated once. Checkpoint snapshots are taken
/// after the delay of their event and the part of the merged pulse that
/// precedes them.
pub fn run<R: Real>(
    model: &HamiltonianModel<R>,
    schedule: &PulseSchedule,
    tau: &R,
) -> Result<EvolutionResult<R>, EvolveError> {
    let ctx = *model.ctx();
    if !(tau.to_f64() > 0.0 && tau.to_f64().is_finite()) {
        return Err(EvolveError::InvalidInterval);
    }
    let mut cache: HashMap<&Delay, CMatrix<R>> = HashMap::new();
    for e in &schedule.events {
        if !cache.contains_key(&e.delay) {
            let t = e.delay.value::<R>(&ctx) * tau;
            let p = propagator(model, &t);
            check_unitary(&p, || format!("propagator for delay {}", e.delay))?;
            cache.insert(&e.delay, p);
        }
    }

    let mut u = CMatrix::identity(model.dim(), &ctx);
    let mut u_checkpoints = BTreeMap::new();
    for (idx, e) in schedule.events.iter().enumerate() {
        u = cache[&e.delay].matmul(&u);
        for c in schedule.checkpoints.iter().filter(|c| c.event == idx) {
            let mut snap = u.clone();
            apply_system_pauli(c.partial, &mut snap);
            u_checkpoints.insert(c.j, snap);
        }
        apply_system_pauli(e.pulse, &mut u);
    }
    check_unitary(&u, || "final unitary".to_string())?;
    for (j, snap) in &u_checkpoints {
        check_unitary(snap, || format!("checkpoint {j}"))?;
    }
    Ok(EvolutionResult {
        u_final: u,
        u_checkpoints,
        tau: tau.clone(),
        precision: ctx,
    })
}
