use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::{fit_exponent, FitOptions, ScalingError, SweepConfig};
use crate::evolve::{run, tau_from_log_jtau};
use crate::metrics::{distance_to_identity, intermediate_errors, single_axis_errors, ErrorSample};
use crate::model::{assemble, sample_bath, BathSpec};
use crate::mpmatrix::{PrecisionContext, Real};
use crate::pauli::Pauli;
use crate::sequence::{Axis, Protocol};

/// splitmix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Bath seed of realization `r`: the `(r+1)`-th splitmix64 output of a
/// stream started at `master`. Independent of scheduling and thread count.
pub fn realization_seed(master: u64, realization: usize) -> u64 {
    splitmix64(master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(realization as u64 + 1)))
}

/// Orders written to the `n1`/`n2` columns: the inner and outer order of a
/// two-level sequence, `(N, 0)` for a Z-type and `(0, N)` for an X-type
/// single sequence, `(0, 0)` for free evolution, and innermost/outermost
/// orders for deeper nesting.
pub fn protocol_orders(p: &Protocol) -> (u32, u32) {
    match p {
        Protocol::Free => (0, 0),
        Protocol::Nested(spec) => match spec.levels() {
            [only] if only.axis == Axis::Z => (only.order, 0),
            [only] => (0, only.order),
            levels => (levels[0].order, levels[levels.len() - 1].order),
        },
    }
}

/// Quantity a series or fit refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    X,
    Y,
    Z,
    D,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::X, Measure::Y, Measure::Z, Measure::D];

    pub fn of(self, sample: &ErrorSample) -> f64 {
        match self {
            Measure::X => sample.e_x,
            Measure::Y => sample.e_y,
            Measure::Z => sample.e_z,
            Measure::D => sample.d,
        }
    }

    pub fn pauli(self) -> Option<Pauli> {
        match self {
            Measure::X => Some(Pauli::X),
            Measure::Y => Some(Pauli::Y),
            Measure::Z => Some(Pauli::Z),
            Measure::D => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::X => "x",
            Measure::Y => "y",
            Measure::Z => "z",
            Measure::D => "D",
        })
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "x" | "X" => Ok(Measure::X),
            "y" | "Y" => Ok(Measure::Y),
            "z" | "Z" => Ok(Measure::Z),
            "D" | "d" => Ok(Measure::D),
            other => Err(format!("unknown measure {other:?}")),
        }
    }
}

/// Mean and standard error over realizations at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub sequence: String,
    pub n1: u32,
    pub n2: u32,
    pub log10_jtau: f64,
    pub count: usize,
    pub mean: [f64; 4],
    pub stderr: [f64; 4],
}

impl Aggregate {
    pub fn mean_of(&self, m: Measure) -> f64 {
        self.mean[m.index()]
    }

    pub fn stderr_of(&self, m: Measure) -> f64 {
        self.stderr[m.index()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediateAggregate {
    pub sequence: String,
    pub n1: u32,
    pub n2: u32,
    pub log10_jtau: f64,
    pub j: usize,
    pub mu: Pauli,
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub precision: PrecisionContext,
    pub realization_seeds: Vec<u64>,
    /// Sorted by `(n1, n2, sequence position, log10_jtau, realization)`.
    pub samples: Vec<ErrorSample>,
    pub aggregates: Vec<Aggregate>,
    pub intermediate: Vec<IntermediateAggregate>,
}

impl SweepResult {
    pub fn baths(&self) -> Vec<BathSpec> {
        self.realization_seeds
            .iter()
            .map(|&s| sample_bath(s, self.config.n_bath_qubits).expect("validated bath size"))
            .collect()
    }
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Groups samples by `(sequence, log10_jtau)` in sample order.
pub fn aggregate(samples: &[ErrorSample]) -> (Vec<Aggregate>, Vec<IntermediateAggregate>) {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=samples.len() {
        let boundary = i == samples.len()
            || samples[i].sequence != samples[start].sequence
            || samples[i].log10_jtau != samples[start].log10_jtau;
        if boundary {
            groups.push((start, i));
            start = i;
        }
    }
    let mut aggregates = Vec::new();
    let mut intermediate = Vec::new();
    for (a, b) in groups {
        if a == b {
            continue;
        }
        let group = &samples[a..b];
        let first = &group[0];
        let mut mean = [0.0; 4];
        let mut stderr = [0.0; 4];
        for m in Measure::ALL {
            let values: Vec<f64> = group.iter().map(|s| m.of(s)).collect();
            (mean[m.index()], stderr[m.index()]) = mean_stderr(&values);
        }
        aggregates.push(Aggregate {
            sequence: first.sequence.clone(),
            n1: first.n1,
            n2: first.n2,
            log10_jtau: first.log10_jtau,
            count: group.len(),
            mean,
            stderr,
        });
        let mut per_key: BTreeMap<(usize, Pauli), Vec<f64>> = BTreeMap::new();
        for s in group {
            for (&key, &v) in &s.e_intermediate {
                per_key.entry(key).or_default().push(v);
            }
        }
        for ((j, mu), values) in per_key {
            let (mean, stderr) = mean_stderr(&values);
            intermediate.push(IntermediateAggregate {
                sequence: first.sequence.clone(),
                n1: first.n1,
                n2: first.n2,
                log10_jtau: first.log10_jtau,
                j,
                mu,
                count: values.len(),
                mean,
                stderr,
            });
        }
    }
    (aggregates, intermediate)
}

/// Runs every `(sequence, J tau, realization)` cell of the sweep.
///
/// Bath realizations are shared across sequences and grid points, so each
/// Hamiltonian is assembled and diagonalized once.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, ScalingError> {
    config.validate()?;
    let ctx = config.precision()?;
    if ctx.is_double() {
        run_sweep_at::<f64>(config, ctx)
    } else {
        run_sweep_at::<Float>(config, ctx)
    }
}

fn run_sweep_at<R: Real>(config: &SweepConfig, ctx: PrecisionContext) -> Result<SweepResult, ScalingError> {
    let seeds: Vec<u64> = (0..config.realizations)
        .map(|r| realization_seed(config.seed, r))
        .collect();
    let models = seeds
        .par_iter()
        .enumerate()
        .map(|(realization, &seed)| {
            sample_bath(seed, config.n_bath_qubits)
                .and_then(|spec| assemble::<R>(&spec, config.coupling, config.beta, &ctx))
                .map_err(|source| ScalingError::Model { realization, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let schedules: Vec<_> = config.sequences.iter().map(|p| p.schedule()).collect();
    let taus: Vec<R> = config
        .log_jtau_grid
        .iter()
        .map(|&k| tau_from_log_jtau(k, config.coupling, &ctx))
        .collect();

    let mut tasks = Vec::new();
    for cell in 0..config.sequences.len() {
        for g in 0..config.log_jtau_grid.len() {
            for r in 0..config.realizations {
                tasks.push((cell, g, r));
            }
        }
    }

    let mut samples = tasks
        .par_iter()
        .map(|&(cell, g, r)| {
            let protocol = &config.sequences[cell];
            let log10_jtau = config.log_jtau_grid[g];
            let label = || format!("{protocol} at log10(J tau) = {log10_jtau}, realization {r}");
            let result = run(&models[r], &schedules[cell], &taus[g])
                .map_err(|source| ScalingError::Evolve { cell: label(), source })?;
            let metrics_err = |source| ScalingError::Metrics { cell: label(), source };
            let [e_x, e_y, e_z] = single_axis_errors(&result.u_final, config.norm_kind).map_err(metrics_err)?;
            let d = distance_to_identity(&result.u_final).map_err(metrics_err)?;
            let e_intermediate = if config.intermediate && !result.u_checkpoints.is_empty() {
                intermediate_errors(&result, config.norm_kind).map_err(metrics_err)?
            } else {
                BTreeMap::new()
            };
            let (n1, n2) = protocol_orders(protocol);
            Ok((
                cell,
                ErrorSample {
                    sequence: protocol.to_string(),
                    n1,
                    n2,
                    log10_jtau,
                    realization: r,
                    e_x,
                    e_y,
                    e_z,
                    d,
                    norm_kind: config.norm_kind,
                    digits: ctx.digits(),
                    e_intermediate,
                },
            ))
        })
        .collect::<Result<Vec<_>, ScalingError>>()?;
    samples.sort_by(|(ca, a), (cb, b)| {
        (a.n1, a.n2, *ca)
            .cmp(&(b.n1, b.n2, *cb))
            .then(a.log10_jtau.total_cmp(&b.log10_jtau))
            .then(a.realization.cmp(&b.realization))
    });
    let samples: Vec<ErrorSample> = samples.into_iter().map(|(_, s)| s).collect();
    let (aggregates, intermediate) = aggregate(&samples);
    Ok(SweepResult {
        config: config.clone(),
        precision: ctx,
        realization_seeds: seeds,
        samples,
        aggregates,
        intermediate,
    })
}

/// Fits `log10(mean)` against `log10(J tau)` for every sequence and measure,
/// in order of first appearance.
pub fn fit_aggregates(aggregates: &[Aggregate], options: &FitOptions) -> Vec<super::CellFit> {
    let mut order: Vec<&str> = Vec::new();
    for a in aggregates {
        if !order.contains(&a.sequence.as_str()) {
            order.push(&a.sequence);
        }
    }
    let mut out = Vec::new();
    for seq in order {
        let rows: Vec<&Aggregate> = aggregates.iter().filter(|a| a.sequence == seq).collect();
        for m in Measure::ALL {
            let points: Vec<(f64, f64)> = rows.iter().map(|a| (a.log10_jtau, a.mean_of(m).log10())).collect();
            out.push(super::CellFit {
                sequence: seq.to_string(),
                n1: rows[0].n1,
                n2: rows[0].n2,
                measure: m,
                fit: fit_exponent(&points, options),
            });
        }
    }
    out
}

/// Fit of one checkpoint series across the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateFit {
    pub sequence: String,
    pub n1: u32,
    pub n2: u32,
    pub j: usize,
    pub mu: Pauli,
    pub fit: Result<super::ScalingFit, super::FitError>,
}

/// Fits every `(sequence, j, mu)` checkpoint series.
pub fn fit_intermediate(rows: &[IntermediateAggregate], options: &FitOptions) -> Vec<IntermediateFit> {
    let mut keys: Vec<(&str, usize, Pauli)> = Vec::new();
    for r in rows {
        let key = (r.sequence.as_str(), r.j, r.mu);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(seq, j, mu)| {
            let series: Vec<&IntermediateAggregate> =
                rows.iter().filter(|r| r.sequence == seq && r.j == j && r.mu == mu).collect();
            let points: Vec<(f64, f64)> = series.iter().map(|r| (r.log10_jtau, r.mean.log10())).collect();
            IntermediateFit {
                sequence: seq.to_string(),
                n1: series[0].n1,
                n2: series[0].n2,
                j,
                mu,
                fit: fit_exponent(&points, options),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s: Vec<u64> = (0..100).map(|r| realization_seed(42, r)).collect();
        let mut dedup = s.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 100);
        assert_eq!(realization_seed(42, 3), s[3]);
        assert_ne!(realization_seed(43, 3), s[3]);
    }

    #[test]
    fn orders_for_columns() {
        assert_eq!(protocol_orders(&"QDD(2,5)".parse().unwrap()), (2, 5));
        assert_eq!(protocol_orders(&"UDD(Z,3)".parse().unwrap()), (3, 0));
        assert_eq!(protocol_orders(&"UDD(X,3)".parse().unwrap()), (0, 3));
        assert_eq!(protocol_orders(&Protocol::Free), (0, 0));
    }

    #[test]
    fn stderr_of_known_sample() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[7.0]), (7.0, 0.0));
    }
}
