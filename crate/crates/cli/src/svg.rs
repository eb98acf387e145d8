//! Minimal SVG line plots of power curves, one file per sample size.

use std::fmt::Write as _;

use lanpower_core::{PowerCurve, Variant};

use crate::format::fmt_g;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn colour(variant: Variant) -> &'static str {
    match variant {
        Variant::TrueParam => "#1f77b4",
        Variant::Lse => "#d62728",
        Variant::Me => "#2ca02c",
    }
}

/// Power against amplitude for sample size `n`: one polyline per variant
/// plus a dashed asymptotic curve.
pub fn power_plot(curve: &PowerCurve, n: usize) -> String {
    let grid = &curve.amplitude_grid;
    let (lo, hi) = grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &a| (l.min(a), h.max(a)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let px = |a: f64| MARGIN + (a - lo) / span * (WIDTH - 2.0 * MARGIN);
    let py = |p: f64| HEIGHT - MARGIN - p.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{} power, n = {n}</text>"#,
        WIDTH / 2.0,
        curve.family
    );
    let (x0, x1, y0, y1) = (px(lo), px(lo + span), py(0.0), py(1.0));
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for k in 0..=5 {
        let p = k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            py(p) + 4.0,
            fmt_g(p)
        );
        let a = lo + span * p;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(a),
            y0 + 18.0,
            fmt_g(a)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">a</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );

    let mut legend: Vec<(String, &str, bool)> = Vec::new();
    let variants: Vec<Variant> = Variant::ALL
        .into_iter()
        .filter(|v| curve.rows.iter().any(|r| r.variant == *v))
        .collect();
    for &variant in &variants {
        let pts = points(curve.curve(n, variant).iter().map(|r| (px(r.a), py(r.rejection_rate))));
        let _ = writeln!(
            s,
            r#"<polyline points="{pts}" fill="none" stroke="{}" stroke-width="2"/>"#,
            colour(variant)
        );
        legend.push((variant.to_string(), colour(variant), false));
    }
    if let Some(&first) = variants.first() {
        let pts = points(curve.curve(n, first).iter().map(|r| (px(r.a), py(r.asymptotic_power))));
        let _ = writeln!(
            s,
            r#"<polyline points="{pts}" fill="none" stroke="black" stroke-dasharray="6,4" stroke-width="1.5"/>"#
        );
        legend.push(("asymptotic".into(), "black", true));
    }
    for (k, (label, stroke, dashed)) in legend.iter().enumerate() {
        let y = MARGIN + 16.0 * k as f64;
        let x = WIDTH - MARGIN - 120.0;
        let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{stroke}" stroke-width="2"{dash}/>"#,
            x + 24.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{label}</text>"#, x + 30.0, y + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

fn points(iter: impl Iterator<Item = (f64, f64)>) -> String {
    iter.map(|(x, y)| format!("{x:.2},{y:.2}")).collect::<Vec<_>>().join(" ")
}
