//! Minimal log-log scatter plot of a sweep.

use std::fmt::Write;

use ffharm_core::experiments::{ExponentFit, SweepResult};

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;

pub fn sweep_svg(s: &SweepResult, fit: Option<&ExponentFit>) -> String {
    let pts: Vec<(f64, f64)> = s
        .rows
        .iter()
        .filter(|r| r.value > 0.0)
        .map(|r| (f64::from(r.q).ln(), r.value.ln()))
        .collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{PAD} {PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">log q</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(out, r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">log value</text>"#, H / 2.0, H / 2.0);
    if let Some(f) = fit {
        let (a, b) = (f.intercept + f.slope * x0, f.intercept + f.slope * x1);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue"/>"#,
            sx(x0),
            sy(a),
            sx(x1),
            sy(b)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12">slope {:.4}</text>"#, PAD + 8.0, PAD - 8.0, f.slope);
    }
    for &(x, y) in &pts {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, sx(x), sy(y));
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
