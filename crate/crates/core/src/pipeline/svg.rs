//! Minimal SVG line and box plots. Output depends only on the input data.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub values: &'a [f64],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range<'a>(vals: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in vals.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str, ylo: f64, yhi: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    let _ = writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
    for i in 0..=4 {
        let v = ylo + (yhi - ylo) * i as f64 / 4.0;
        let y = y0 - (y0 - y1) * i as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{:.4}</text>"#, x0 - 6.0, y + 4.0, v);
        let _ = writeln!(out, r##"<line x1="{x0}" y1="{y:.1}" x2="{x1}" y2="{y:.1}" stroke="#ddd"/>"##);
    }
}

fn y_px(v: f64, lo: f64, hi: f64) -> f64 {
    let (y0, y1) = (H - BOTTOM, TOP);
    y0 - (v - lo) / (hi - lo) * (y0 - y1)
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (lo, hi) = finite_range(series.iter().flat_map(|s| s.values.iter()));
    let n = series.iter().map(|s| s.values.len()).max().unwrap_or(0).max(2);
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, lo, hi);
    let x_px = |i: usize| LEFT + (W - LEFT - RIGHT) * i as f64 / (n - 1) as f64;
    let _ = writeln!(out, r#"<text x="{LEFT}" y="{}" text-anchor="middle">0</text>"#, H - BOTTOM + 16.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W - RIGHT, H - BOTTOM + 16.0, n - 1);
    for (k, s) in series.iter().enumerate() {
        let mut d = String::new();
        for (i, &v) in s.values.iter().enumerate().filter(|(_, v)| v.is_finite()) {
            let _ = write!(d, "{}{:.2} {:.2}", if d.is_empty() { "M" } else { " L" }, x_px(i), y_px(v, lo, hi));
        }
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#, s.color);
        let ly = TOP + 16.0 * k as f64 + 10.0;
        let _ = writeln!(out, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#, W - 170.0, W - 150.0, s.color);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, W - 145.0, ly + 4.0, escape(s.name));
    }
    out.push_str("</svg>\n");
    out
}

/// Box plot with whiskers at the extremes.
pub fn box_plot(title: &str, ylabel: &str, groups: &[(String, Vec<f64>)]) -> String {
    let (lo, hi) = finite_range(groups.iter().flat_map(|g| g.1.iter()));
    let mut out = String::new();
    frame(&mut out, title, "", ylabel, lo, hi);
    let slot = (W - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (i, (label, v)) in groups.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let _ = writeln!(out, r#"<text x="{cx:.1}" y="{}" text-anchor="middle">{}</text>"#, H - BOTTOM + 16.0, escape(label));
        if v.is_empty() {
            continue;
        }
        let q = |p| y_px(super::stats::quantile(v, p), lo, hi);
        let (mn, q1, md, q3, mx) = (q(0.0), q(0.25), q(0.5), q(0.75), q(1.0));
        let hw = slot * 0.25;
        let _ = writeln!(out, r#"<line x1="{cx:.1}" y1="{mx:.2}" x2="{cx:.1}" y2="{mn:.2}" stroke="black"/>"#);
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{q3:.2}" width="{:.1}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            cx - hw,
            2.0 * hw,
            (q1 - q3).max(0.5)
        );
        let _ = writeln!(out, r#"<line x1="{:.1}" y1="{md:.2}" x2="{:.1}" y2="{md:.2}" stroke="black" stroke-width="2"/>"#, cx - hw, cx + hw);
    }
    out.push_str("</svg>\n");
    out
}
