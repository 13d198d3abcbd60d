//! Static SVG pictures of cheeses.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::geometry::AbstractSwissCheese;

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub width_px: u32,
    /// Circles `(center, radius)` drawn dashed on top, e.g. `C_r`.
    pub overlays: Vec<(Complex64, f64)>,
    /// Holes smaller than this many pixels are drawn at this size so that
    /// they stay visible. `0` draws exact radii.
    pub min_hole_px: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width_px: 800,
            overlays: Vec::new(),
            min_hole_px: 0.0,
        }
    }
}

fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.abs() < 1e-3 {
        return format!("{x:.3e}");
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// SVG document: outer disk outline, filled holes and dashed overlays.
/// The y axis points up, as in the complex plane.
pub fn render_svg(cheese: &AbstractSwissCheese, opts: &RenderOptions) -> String {
    let outer = cheese.outer;
    let r0 = outer.radius.max(f64::MIN_POSITIVE);
    let margin = 0.02 * r0;
    let side = 2.0 * (r0 + margin);
    let px = opts.width_px.max(1) as f64;
    let unit_px = px / side;
    let min_r = opts.min_hole_px / unit_px;
    let stroke = 1.0 / unit_px;

    let mut out = String::with_capacity(96 * (cheese.holes.len() + 8));
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="{x} {y} {s} {s}">"#,
        w = opts.width_px.max(1),
        x = num(outer.center.re - r0 - margin),
        y = num(-outer.center.im - r0 - margin),
        s = num(side),
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    let _ = writeln!(
        out,
        r##"<circle cx="{}" cy="{}" r="{}" fill="#f4f1e8" stroke="#222" stroke-width="{}"/>"##,
        num(outer.center.re),
        num(outer.center.im),
        num(r0),
        num(stroke),
    );
    let _ = writeln!(out, r##"<g fill="#222">"##);
    for h in cheese.holes.iter().filter(|h| h.radius > 0.0) {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(h.center.re),
            num(h.center.im),
            num(h.radius.max(min_r)),
        );
    }
    let _ = writeln!(out, "</g>");
    if !opts.overlays.is_empty() {
        let _ = writeln!(
            out,
            r##"<g fill="none" stroke="#c0392b" stroke-width="{}" stroke-dasharray="{} {}">"##,
            num(1.5 * stroke),
            num(6.0 * stroke),
            num(4.0 * stroke),
        );
        for (c, r) in &opts.overlays {
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                num(c.re),
                num(c.im),
                num(*r),
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}
