//! Self-contained SVG log-log charts of aggregated errors.

use std::fmt::Write as _;

use thiserror::Error;

use crate::pauli::Pauli;
use crate::scaling::{Aggregate, CellFit, IntermediateAggregate, Measure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    /// `(log10 J tau, log10 error)`; non-finite points are skipped.
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub series: Vec<Series>,
    /// Fit windows drawn as vertical lines, per series color.
    pub windows: Vec<(f64, &'static str)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

fn color(m: Measure) -> &'static str {
    match m {
        Measure::X => "#1f77b4",
        Measure::Y => "#d62728",
        Measure::Z => "#2ca02c",
        Measure::D => "#555555",
    }
}

fn pauli_color(p: Pauli) -> &'static str {
    match p {
        Pauli::X => color(Measure::X),
        Pauli::Y => color(Measure::Y),
        _ => color(Measure::Z),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// File stem for a sequence label, e.g. `QDD(1,2)` becomes `qdd_1_2`.
pub fn file_stem(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-9 {
        (lo.floor() - 1.0, hi.ceil() + 1.0)
    } else {
        (lo.floor(), hi.ceil())
    }
}

impl Panel {
    pub fn render(&self) -> Result<String, PlotError> {
        let pts = || self.series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
        if pts().next().is_none() {
            return Err(PlotError::Empty);
        }
        let (x0, x1) = nice_range(
            pts().map(|p| p.0).fold(f64::INFINITY, f64::min),
            pts().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
        );
        let (y0, y1) = nice_range(
            pts().map(|p| p.1).fold(f64::INFINITY, f64::min),
            pts().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        );
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_L + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let x_step = ((x1 - x0) / 12.0).ceil().max(1.0);
        let mut x = x0;
        while x <= x1 + 1e-9 {
            let px = sx(x);
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#ddd"/><text x="{px:.2}" y="{}" text-anchor="middle">{x}</text>"##,
                MARGIN_T,
                MARGIN_T + ph,
                MARGIN_T + ph + 16.0
            );
            x += x_step;
        }
        let y_step = ((y1 - y0) / 10.0).ceil().max(1.0);
        let mut y = y0;
        while y <= y1 + 1e-9 {
            let py = sy(y);
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_L}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{y}</text>"##,
                MARGIN_L + pw,
                MARGIN_L - 6.0,
                py + 4.0
            );
            y += y_step;
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">log10(error)</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0
        );
        for (wx, c) in &self.windows {
            if (x0..=x1).contains(wx) {
                let px = sx(*wx);
                let _ = writeln!(
                    s,
                    r#"<line class="window" x1="{px:.2}" y1="{MARGIN_T}" x2="{px:.2}" y2="{}" stroke="{c}" stroke-dasharray="2,3"/>"#,
                    MARGIN_T + ph
                );
            }
        }
        for (k, series) in self.series.iter().enumerate() {
            let path: Vec<String> = series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if path.is_empty() {
                continue;
            }
            let dash = if series.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline class="series" fill="none" stroke="{}" stroke-width="1.8"{dash} points="{}"/>"#,
                series.color,
                path.join(" ")
            );
            for p in &path {
                let (cx, cy) = p.split_once(',').expect("formatted pair");
                let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{}"/>"#, series.color);
            }
            let ly = MARGIN_T + 14.0 + 18.0 * k as f64;
            let lx = MARGIN_L + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
                lx + 22.0,
                series.color,
                lx + 28.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

/// One panel per sequence: `E_x`, `E_y`, `E_z` and optionally `D` against
/// `log10(J tau)`, with the fit windows of `fits` as vertical lines.
pub fn aggregate_panels(aggregates: &[Aggregate], fits: &[CellFit], include_d: bool) -> Result<Vec<(String, Panel)>, PlotError> {
    if aggregates.is_empty() {
        return Err(PlotError::Empty);
    }
    let mut order: Vec<&str> = Vec::new();
    for a in aggregates {
        if !order.contains(&a.sequence.as_str()) {
            order.push(&a.sequence);
        }
    }
    let measures: &[Measure] = if include_d { &Measure::ALL } else { &Measure::ALL[..3] };
    Ok(order
        .into_iter()
        .map(|seq| {
            let rows: Vec<&Aggregate> = aggregates.iter().filter(|a| a.sequence == seq).collect();
            let series = measures
                .iter()
                .map(|&m| Series {
                    label: if m == Measure::D { "D".into() } else { format!("E_{m}") },
                    color: color(m),
                    dashed: m == Measure::D,
                    points: rows.iter().map(|a| (a.log10_jtau, a.mean_of(m).log10())).collect(),
                })
                .collect();
            let mut windows = Vec::new();
            for f in fits.iter().filter(|f| f.sequence == seq && measures.contains(&f.measure)) {
                if let Ok(fit) = &f.fit {
                    windows.push((fit.window.0, color(f.measure)));
                    windows.push((fit.window.1, color(f.measure)));
                }
            }
            (
                file_stem(seq),
                Panel {
                    title: seq.to_string(),
                    x_label: "log10(J tau)".into(),
                    series,
                    windows,
                },
            )
        })
        .collect())
}

/// One panel per sequence with a series per checkpoint and axis.
pub fn intermediate_panels(rows: &[IntermediateAggregate]) -> Result<Vec<(String, Panel)>, PlotError> {
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.sequence.as_str()) {
            order.push(&r.sequence);
        }
    }
    Ok(order
        .into_iter()
        .map(|seq| {
            let mine: Vec<&IntermediateAggregate> = rows.iter().filter(|r| r.sequence == seq).collect();
            let mut keys: Vec<(usize, Pauli)> = mine.iter().map(|r| (r.j, r.mu)).collect();
            keys.sort();
            keys.dedup();
            let series = keys
                .into_iter()
                .map(|(j, mu)| Series {
                    label: format!("E_{}^({j})", mu.symbol().to_ascii_lowercase()),
                    color: pauli_color(mu),
                    dashed: j % 2 == 0,
                    points: mine
                        .iter()
                        .filter(|r| r.j == j && r.mu == mu)
                        .map(|r| (r.log10_jtau, r.mean.log10()))
                        .collect(),
                })
                .collect();
            (
                format!("{}_intermediate", file_stem(seq)),
                Panel {
                    title: format!("{seq} checkpoints"),
                    x_label: "log10(J tau)".into(),
                    series,
                    windows: Vec::new(),
                },
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg(seq: &str, x: f64) -> Aggregate {
        Aggregate {
            sequence: seq.into(),
            n1: 1,
            n2: 1,
            log10_jtau: x,
            count: 1,
            mean: [10f64.powf(2.0 * x), 10f64.powf(2.0 * x), 10f64.powf(2.0 * x), 10f64.powf(2.0 * x)],
            stderr: [0.0; 4],
        }
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("QDD(1,2)"), "qdd_1_2");
        assert_eq!(file_stem("NEST(X:2, Z:2, X:2)"), "nest_x_2_z_2_x_2");
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(aggregate_panels(&[], &[], true), Err(PlotError::Empty));
    }

    #[test]
    fn one_cell_one_panel() {
        let aggs: Vec<_> = (-5..=-1).map(|x| agg("QDD(1,1)", f64::from(x))).collect();
        let panels = aggregate_panels(&aggs, &[], true).unwrap();
        assert_eq!(panels.len(), 1);
        let svg = panels[0].1.render().unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("class=\"series\"").count(), 4);
        assert!(!svg.contains("href"));
    }
}
