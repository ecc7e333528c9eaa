//! Minimal static SVG line charts.

use std::fmt::Write as _;

use crate::experiments::ProfileRecord;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
    log_y: bool,
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi, v) = if self.log_y {
            (self.y.0.log10(), self.y.1.log10(), y.max(f64::MIN_POSITIVE).log10())
        } else {
            (self.y.0, self.y.1, y)
        };
        H - MARGIN - (v - lo) / (hi - lo) * (H - 2.0 * MARGIN)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn chart(title: &str, xlabel: &str, ylabel: &str, axes: &Axes, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let xv = axes.x.0 + (axes.x.1 - axes.x.0) * i as f64 / 4.0;
        let px = axes.px(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick(xv)
        );
        let yv = if axes.log_y {
            10f64.powf(axes.y.0.log10() + (axes.y.1.log10() - axes.y.0.log10()) * i as f64 / 4.0)
        } else {
            axes.y.0 + (axes.y.1 - axes.y.0) * i as f64 / 4.0
        };
        let py = axes.py(yv);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (n, (x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2} ", if n == 0 { "M" } else { "L" }, axes.px(*x), axes.py(*y));
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.trim_end());
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            x1 - 120.0,
            x1 - 100.0,
            x1 - 95.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

/// True source against the real part of the reconstruction.
pub fn profile_svg(p: &ProfileRecord) -> String {
    let truth: Vec<(f64, f64)> = p.r.iter().copied().zip(p.f_true.iter().copied()).collect();
    let rec: Vec<(f64, f64)> = p.r.iter().copied().zip(p.f_rec.iter().map(|z| z.re)).collect();
    let (lo, hi) = truth
        .iter()
        .chain(&rec)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, y)| (a.min(y), b.max(y)));
    let axes = Axes {
        x: (p.r.first().copied().unwrap_or(0.0), p.r.last().copied().unwrap_or(1.0)),
        y: padded(lo, hi),
        log_y: false,
    };
    chart(
        &format!("source {}: true vs reconstructed", p.label),
        "r",
        "f(r)",
        &axes,
        &[("true", truth), ("reconstructed (Re)", rec)],
    )
}

/// Relative error against the number of frequencies, log scale.
pub fn error_svg(series: &[(String, Vec<(usize, f64)>)]) -> String {
    let pts: Vec<(&str, Vec<(f64, f64)>)> = series
        .iter()
        .map(|(l, s)| (l.as_str(), s.iter().map(|&(j, e)| (j as f64, e)).collect()))
        .collect();
    let all = pts.iter().flat_map(|(_, v)| v.iter());
    let (xlo, xhi, ylo, yhi) = all.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), if y > 0.0 { c.min(y) } else { c }, d.max(y)),
    );
    let ylo = if ylo.is_finite() { ylo } else { 1e-16 };
    let axes = Axes { x: (xlo, xhi.max(xlo + 1.0)), y: (ylo / 1.5, (yhi * 1.5).max(ylo * 2.0)), log_y: true };
    chart("relative error", "number of frequencies", "relative error", &axes, &pts)
}
