use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpmatrix::PrecisionContext;

pub const MIN_POINTS: usize = 4;
/// Slopes further than this from their rounded value are flagged.
pub const DEVIATION_FLAG: f64 = 0.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {required} usable points, got {available}")]
    TooFewPoints { available: usize, required: usize },
    #[error("every error is below the resolution floor; raise the working precision")]
    DegenerateFit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Fixed `(lo, hi)` window in `log10(J tau)`, inclusive.
    pub window: Option<(f64, f64)>,
    /// Points with `log10(error)` at or below this are ignored.
    pub floor_log10: f64,
    pub slope_tolerance: f64,
    pub min_r2: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: None,
            floor_log10: f64::NEG_INFINITY,
            slope_tolerance: 0.05,
            min_r2: 0.999,
        }
    }
}

impl FitOptions {
    /// Floor at `10 * eps` of the given working precision.
    pub fn for_precision(ctx: &PrecisionContext) -> Self {
        Self {
            floor_log10: (10.0 * ctx.eps()).log10(),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope_raw: f64,
    pub n_hat: i64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub r2: f64,
    pub stderr: f64,
    pub points: usize,
}

impl ScalingFit {
    pub fn deviation(&self) -> f64 {
        (self.slope_raw - self.n_hat as f64).abs()
    }

    pub fn flagged(&self) -> bool {
        self.deviation() > DEVIATION_FLAG
    }
}

fn ols(points: &[(f64, f64)]) -> ScalingFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    // A flat series is a perfect fit; rounding noise must not decide its r2.
    let r2 = if syy <= 1e-24 * n * (1.0 + my * my) {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    let stderr = if points.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    ScalingFit {
        slope_raw: slope,
        n_hat: slope.round() as i64,
        intercept,
        window: (points[0].0, points[points.len() - 1].0),
        r2,
        stderr,
        points: points.len(),
    }
}

/// Least-squares slope of `log10(error)` against `log10(J tau)`.
///
/// Without a fixed window the fit starts from the leftmost `MIN_POINTS`
/// points and grows rightward while each refit moves the slope by less than
/// `slope_tolerance` and keeps `r2 >= min_r2`.
pub fn fit_exponent(points: &[(f64, f64)], options: &FitOptions) -> Result<ScalingFit, FitError> {
    let mut sorted: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0.is_finite()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let usable: Vec<(f64, f64)> = sorted
        .iter()
        .copied()
        .filter(|p| p.1.is_finite() && p.1 > options.floor_log10)
        .collect();
    if usable.is_empty() && !sorted.is_empty() {
        return Err(FitError::DegenerateFit);
    }

    if let Some((lo, hi)) = options.window {
        let inside: Vec<_> = usable.into_iter().filter(|p| p.0 >= lo && p.0 <= hi).collect();
        if inside.len() < 2 {
            return Err(FitError::TooFewPoints {
                available: inside.len(),
                required: 2,
            });
        }
        return Ok(ols(&inside));
    }

    if usable.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints {
            available: usable.len(),
            required: MIN_POINTS,
        });
    }
    let mut best = ols(&usable[..MIN_POINTS]);
    for end in MIN_POINTS + 1..=usable.len() {
        let next = ols(&usable[..end]);
        if (next.slope_raw - best.slope_raw).abs() < options.slope_tolerance && next.r2 >= options.min_r2 {
            best = next;
        } else {
            break;
        }
    }
    Ok(best)
}
