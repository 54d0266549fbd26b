use std::fmt::Write as _;

use super::{predicted_exponents, FitError, Measure, ScalingError, ScalingFit};

/// Fit of one measure of one sequence across the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFit {
    pub sequence: String,
    pub n1: u32,
    pub n2: u32,
    pub measure: Measure,
    pub fit: Result<ScalingFit, FitError>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub n1: u32,
    pub n2: u32,
    pub measure: Measure,
    pub predicted: u32,
    pub fit: Result<ScalingFit, FitError>,
}

impl Comparison {
    pub fn matches(&self) -> bool {
        matches!(&self.fit, Ok(f) if f.n_hat == i64::from(self.predicted))
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComparisonReport {
    pub rows: Vec<Comparison>,
}

impl ComparisonReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &Comparison> {
        self.rows.iter().filter(|c| !c.matches())
    }

    pub fn all_match(&self) -> bool {
        self.mismatches().next().is_none()
    }

    /// Plain-text table, one line per cell and measure.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3} {:>3} {:>2} {:>9} {:>6} {:>9} {:>8} {:>14}  status",
            "n1", "n2", "mu", "predicted", "n_hat", "slope", "r2", "window"
        );
        for c in &self.rows {
            match &c.fit {
                Ok(f) => {
                    let status = match (c.matches(), f.flagged()) {
                        (true, false) => "ok",
                        (true, true) => "ok (flagged)",
                        (false, _) => "MISMATCH",
                    };
                    let _ = writeln!(
                        out,
                        "{:>3} {:>3} {:>2} {:>9} {:>6} {:>9.4} {:>8.5} {:>14}  {status}",
                        c.n1,
                        c.n2,
                        c.measure.to_string(),
                        c.predicted,
                        f.n_hat,
                        f.slope_raw,
                        f.r2,
                        format!("[{}, {}]", f.window.0, f.window.1),
                    );
                }
                Err(e) => {
                    let _ = writeln!(
                        out,
                        "{:>3} {:>3} {:>2} {:>9} {:>6} {:>9} {:>8} {:>14}  MISMATCH: {e}",
                        c.n1,
                        c.n2,
                        c.measure.to_string(),
                        c.predicted,
                        "-",
                        "-",
                        "-",
                        "-"
                    );
                }
            }
        }
        let bad = self.mismatches().count();
        let _ = writeln!(out, "{} of {} exponents match", self.rows.len() - bad, self.rows.len());
        out
    }
}

/// Compares fitted exponents of the `QDD(n1, n2)` cells against the closed
/// form. Every requested cell must have all four fits.
pub fn compare_tables(fits: &[CellFit], cells: &[(u32, u32)]) -> Result<ComparisonReport, ScalingError> {
    let mut rows = Vec::new();
    for &(n1, n2) in cells {
        let label = format!("QDD({n1},{n2})");
        let predicted = predicted_exponents(n1, n2);
        for m in Measure::ALL {
            let found = fits
                .iter()
                .find(|f| f.sequence == label && f.measure == m)
                .ok_or_else(|| ScalingError::IncompleteSweep(format!("{label} measure {m}")))?;
            let expected = match m {
                Measure::X => predicted.x,
                Measure::Y => predicted.y,
                Measure::Z => predicted.z,
                Measure::D => predicted.d,
            };
            rows.push(Comparison {
                n1,
                n2,
                measure: m,
                predicted: expected,
                fit: found.fit.clone(),
            });
        }
    }
    Ok(ComparisonReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(n_hat: i64) -> Result<ScalingFit, FitError> {
        Ok(ScalingFit {
            slope_raw: n_hat as f64 + 0.01,
            n_hat,
            intercept: 0.0,
            window: (-9.0, -3.0),
            r2: 1.0,
            stderr: 0.0,
            points: 7,
        })
    }

    fn cell(m: Measure, n: i64) -> CellFit {
        CellFit {
            sequence: "QDD(1,6)".into(),
            n1: 1,
            n2: 6,
            measure: m,
            fit: fit(n),
        }
    }

    #[test]
    fn matching_and_mismatching() {
        let fits = vec![
            cell(Measure::X, 2),
            cell(Measure::Y, 2),
            cell(Measure::Z, 4),
            cell(Measure::D, 2),
        ];
        let report = compare_tables(&fits, &[(1, 6)]).unwrap();
        assert!(report.all_match());
        let mut bad = fits.clone();
        bad[2].fit = fit(3);
        let report = compare_tables(&bad, &[(1, 6)]).unwrap();
        assert_eq!(report.mismatches().count(), 1);
        assert!(report.render().contains("MISMATCH"));
    }

    #[test]
    fn missing_cell_is_incomplete() {
        let fits = vec![cell(Measure::X, 2)];
        assert!(matches!(
            compare_tables(&fits, &[(1, 6)]),
            Err(ScalingError::IncompleteSweep(_))
        ));
    }
}
