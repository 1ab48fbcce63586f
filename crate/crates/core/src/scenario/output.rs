use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::TimeGrid;
use crate::error::Result;
use crate::Series;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// `t, u…, x…, deviation`, one row per node. The control of step `k` sits
/// on row `k`; the control fields of the last row are empty.
pub fn results_header(m: usize, n: usize) -> Vec<String> {
    let col = |p: &str, dim: usize, i: usize| if dim == 1 { p.to_string() } else { format!("{p}{i}") };
    let mut h = vec!["t".to_string()];
    h.extend((0..m).map(|i| col("u", m, i)));
    h.extend((0..n).map(|i| col("x", n, i)));
    h.push("deviation".into());
    h
}

pub fn write_results(path: &Path, grid: &TimeGrid, u: &Series, x: &Series, deviation: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(results_header(u.dim(), x.dim()))?;
    for k in 0..x.len() {
        let mut row = vec![fmt_f64(grid.time(k))];
        if k < u.len() {
            row.extend(u.node(k).iter().map(|&v| fmt_f64(v)));
        } else {
            row.extend(std::iter::repeat_n(String::new(), u.dim()));
        }
        row.extend(x.node(k).iter().map(|&v| fmt_f64(v)));
        row.push(fmt_f64(deviation[k]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `key,value` table.
pub fn write_key_values(path: &Path, rows: &[(String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub struct Curve<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Draw as a step function (piecewise-constant controls).
    pub steps: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Self-contained line plot with a dashed horizontal reference line.
pub fn line_plot(title: &str, x_label: &str, curves: &[Curve], reference: Option<(f64, &str)>) -> String {
    let xs = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0));
    let ys = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.1))
        .chain(reference.map(|r| r.0));
    let (x0, x1) = bounds(xs);
    let (mut y0, mut y1) = bounds(ys);
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<polyline points="{left},{top} {left},{bottom} {right},{bottom}" fill="none" stroke="black"/>"#
    );
    for (v, anchor, x) in [(x0, "start", left), (x1, "end", right)] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}">{}</text>"#,
            bottom + 16.0,
            tick(v)
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 4.0,
            sy(v) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    if let Some((level, label)) = reference {
        let y = sy(level);
        let _ = writeln!(
            s,
            r#"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="gray" stroke-dasharray="6 4"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" fill="gray">{}</text>"#,
            right,
            y - 4.0,
            escape(label)
        );
    }
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts = String::new();
        for (j, &(x, y)) in c.points.iter().enumerate() {
            if c.steps && j > 0 {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(c.points[j - 1].1));
            }
            let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            left + 8.0,
            top + 14.0 + 14.0 * i as f64,
            escape(c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 123456.789, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn header_names() {
        assert_eq!(results_header(1, 1), ["t", "u", "x", "deviation"]);
        assert_eq!(results_header(1, 2), ["t", "u", "x0", "x1", "deviation"]);
    }

    #[test]
    fn plot_is_well_formed() {
        let c = Curve {
            label: "u",
            points: vec![(0.0, 1.0), (1.0, 0.0), (2.0, 0.0)],
            steps: true,
        };
        let svg = line_plot("control", "t", &[c], Some((0.0, "u_d")));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
    }
}
