//! Quadratic dynamical decoupling simulator.
//!
//! Builds nested Uhrig pulse sequences, evolves a qubit coupled to a random
//! spin bath at arbitrary precision, measures single-axis errors and the
//! distance to a perfect memory, and extracts the scaling exponents of those
//! errors with respect to the minimum pulse interval.

pub mod mpmatrix;
pub mod model;
pub mod pauli;
pub mod sequence;
pub mod evolve;
pub mod metrics;
pub mod scaling;
pub mod io;
pub mod plot;
