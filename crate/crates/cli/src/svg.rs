//! Single-curve SVG plot of the `|a|` density with the quarter-circle overlay.

use std::fmt::Write;

use opval_core::spectral::density::{abs_density, quarter_circle, DensitySamples};

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 48.0;

/// The density of `|a|` diverges like `s^{-1/3}` at 0, so the vertical
/// range is fitted to the samples with `s ≥ 0.1` and the curve is clipped.
pub fn abs_density_plot(s: &DensitySamples) -> String {
    let pts = abs_density(s);
    let x_max = pts.last().map_or(2.2, |p| p.0).max(2.0) * 1.02;
    let y_max = pts.iter().filter(|p| p.0 >= 0.1).map(|p| p.1).fold(quarter_circle(0.0), f64::max) * 1.15;
    let sx = |x: f64| MARGIN + x / x_max * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y.min(y_max) / y_max * (H - 2.0 * MARGIN);
    let polyline = |it: &mut dyn Iterator<Item = (f64, f64)>| -> String {
        it.map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect::<Vec<_>>().join(" ")
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<title>density of |a| (eps = {:e})</title>"#, s.eps);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{}"/></g>"#,
        W - MARGIN,
        MARGIN
    );
    let mut tick = 0.0;
    while tick <= x_max {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{tick:.1}</text>"#,
            sx(tick),
            y0 + 16.0
        );
        tick += 0.5;
    }
    let step = if y_max > 2.0 { 0.5 } else { 0.2 };
    let mut tick = 0.0;
    while tick <= y_max {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{tick:.1}</text>"#,
            x0 - 6.0,
            sy(tick) + 4.0
        );
        tick += step;
    }
    let circle = polyline(&mut (0..=400).map(|k| {
        let x = 2.0 * f64::from(k) / 400.0;
        (x, quarter_circle(x))
    }));
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="gray" stroke-dasharray="5,4" stroke-width="1.2" points="{circle}"/>"#
    );
    let curve = polyline(&mut pts.iter().copied());
    let _ = writeln!(out, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{curve}"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">solid: |a|, dashed: (1/π)√(4−s²)</text>"#,
        W - MARGIN,
        MARGIN - 10.0
    );
    out.push_str("</svg>\n");
    out
}
