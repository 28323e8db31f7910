//! Minimal self-contained SVG line charts with shaded bands.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::RuleKind;
use crate::error::{io_err, HarnessError, Result};
use crate::summary::{summarize, AnalyticPoint};
use crate::sweep::TrialRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
    /// `(x, lo, hi)` shaded around the line.
    pub band: Vec<(f64, f64, f64)>,
    pub dashed: bool,
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, color: &str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), color: color.into(), points, band: Vec::new(), dashed: false, markers: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn extent(chart: &Chart) -> Option<((f64, f64), (f64, f64))> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &chart.series {
        for &(x, y) in &s.points {
            xs.push(x);
            ys.push(y);
        }
        for &(x, lo, hi) in &s.band {
            xs.push(x);
            ys.push(lo);
            ys.push(hi);
        }
    }
    let fin = |v: &[f64]| {
        let lo = v.iter().cloned().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        (lo.is_finite()).then_some((lo, hi))
    };
    let (mut x, mut y) = (fin(&xs)?, fin(&ys)?);
    if x.1 - x.0 <= 0.0 {
        x = (x.0 - 0.5, x.1 + 0.5);
    }
    y.0 = y.0.min(0.0);
    if y.1 - y.0 <= 0.0 {
        y.1 = y.0 + 1.0;
    }
    let pad = 0.05 * (y.1 - y.0);
    Some((x, (y.0, y.1 + pad)))
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the chart to an SVG document.
pub fn render(chart: &Chart) -> Result<String> {
    let ((x0, x1), (y0, y1)) = extent(chart).ok_or(HarnessError::NoRecords)?;
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, MARGIN_L + pw / 2.0, esc(&chart.title));

    for (lo, hi, step, horizontal) in [(x0, x1, nice_step(x1 - x0), true), (y0, y1, nice_step(y1 - y0), false)] {
        let mut t = (lo / step).ceil() * step;
        while t <= hi + 1e-9 * step {
            let label = crate::output::fmt_sig((t / step).round() * step);
            if horizontal {
                let x = sx(t);
                let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##, MARGIN_T, MARGIN_T + ph);
                let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, MARGIN_T + ph + 16.0);
            } else {
                let y = sy(t);
                let _ = writeln!(s, r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, MARGIN_L, MARGIN_L + pw);
                let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, MARGIN_L - 6.0, y + 4.0);
            }
            t += step;
        }
    }
    let _ = writeln!(s, r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_L + pw / 2.0, HEIGHT - 14.0, esc(&chart.x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0,
        esc(&chart.y_label)
    );

    for series in &chart.series {
        if !series.band.is_empty() {
            let upper: Vec<String> = series.band.iter().map(|&(x, _, hi)| format!("{:.2},{:.2}", sx(x), sy(hi))).collect();
            let lower: Vec<String> = series.band.iter().rev().map(|&(x, lo, _)| format!("{:.2},{:.2}", sx(x), sy(lo))).collect();
            let _ = writeln!(
                s,
                r#"<polygon points="{} {}" fill="{}" fill-opacity="0.2" stroke="none"/>"#,
                upper.join(" "),
                lower.join(" "),
                series.color
            );
        }
        let pts: Vec<String> = series.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"{dash}/>"#, pts.join(" "), series.color);
        if series.markers {
            for &(x, y) in &series.points {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#, sx(x), sy(y), series.color);
            }
        }
    }

    for (i, series) in chart.series.iter().enumerate() {
        let y = MARGIN_T + 12.0 + 18.0 * i as f64;
        let x = MARGIN_L + pw + 12.0;
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"{dash}/>"#, x + 22.0, series.color);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 28.0, y + 4.0, esc(&series.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_chart(chart: &Chart, path: &Path) -> Result<()> {
    let doc = render(chart)?;
    std::fs::write(path, doc).map_err(io_err(path))
}

/// Builds the sweep chart: mean BER ± 1 std per rule against π0, with the
/// analytic MAP and ML curves overlaid.
pub fn sweep_chart(records: &[TrialRecord], analytic: &[AnalyticPoint], title: &str) -> Result<Chart> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let cells = summarize(records);
    let mut series = Vec::new();
    for (i, rule) in RuleKind::ALL.into_iter().enumerate() {
        let mine: Vec<_> = cells.iter().filter(|c| c.rule == rule).collect();
        if mine.is_empty() {
            continue;
        }
        series.push(Series {
            label: format!("{rule} (simulated)"),
            color: color(i).into(),
            points: mine.iter().map(|c| (c.pi0, c.mean_ber)).collect(),
            band: mine.iter().map(|c| (c.pi0, c.mean_ber - c.std_ber, c.mean_ber + c.std_ber)).collect(),
            dashed: false,
            markers: true,
        });
    }
    if !analytic.is_empty() {
        let mut map = Series::line("map (analytic)", color(0), analytic.iter().map(|a| (a.pi0, a.pe_map)).collect());
        map.dashed = true;
        let mut ml = Series::line("ml (analytic)", color(1), analytic.iter().map(|a| (a.pi0, a.pe_ml)).collect());
        ml.dashed = true;
        series.push(map);
        series.push(ml);
    }
    Ok(Chart { title: title.into(), x_label: "π0".into(), y_label: "bit error rate".into(), series })
}

/// Writes [`sweep_chart`] to `path`.
pub fn emit_svg(records: &[TrialRecord], analytic: &[AnalyticPoint], path: &Path) -> Result<()> {
    write_chart(&sweep_chart(records, analytic, "Error rate by decision rule")?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(pi0: f64, rule: RuleKind, t: usize, ber: f64) -> TrialRecord {
        TrialRecord { pi0, rule, trial_index: t, ber, pi0_hat: None, seed_used: 0 }
    }

    #[test]
    fn nice_steps() {
        for (span, step) in [(0.5, 0.1), (1.0, 0.2), (0.22, 0.05), (8.0, 2.0)] {
            assert!((nice_step(span) - step).abs() < 1e-12, "{span}");
        }
    }

    #[test]
    fn renders_bands_lines_and_labels() {
        let recs = vec![rec(0.1, RuleKind::Map, 0, 0.08), rec(0.1, RuleKind::Map, 1, 0.1), rec(0.3, RuleKind::Map, 0, 0.15)];
        let a = vec![
            AnalyticPoint { pi0: 0.1, delta_over_sigma: 5.0, pe_map: 0.09, pe_ml: 0.21 },
            AnalyticPoint { pi0: 0.3, delta_over_sigma: 5.0, pe_map: 0.17, pe_ml: 0.21 },
        ];
        let doc = render(&sweep_chart(&recs, &a, "t").unwrap()).unwrap();
        assert!(doc.starts_with("<svg"));
        assert!(doc.trim_end().ends_with("</svg>"));
        assert!(doc.contains("<polygon"));
        assert_eq!(doc.matches("<polyline").count(), 3);
        assert!(doc.contains("π0") && doc.contains("bit error rate"));
    }

    #[test]
    fn empty_input_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_svg(&[], &[], &dir.path().join("x.svg")), Err(HarnessError::NoRecords)));
        let empty = Chart { title: String::new(), x_label: String::new(), y_label: String::new(), series: vec![] };
        assert!(render(&empty).is_err());
    }
}
