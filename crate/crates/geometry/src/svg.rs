//! SVG export for visual inspection of layouts.

use std::fmt::Write as _;

use crate::polygon::Layout;

const LAYER_COLORS: &[(&str, &str)] = &[
    ("chole", "#1f77b4"),
    ("snowflake", "#2ca02c"),
    ("grating", "#d62728"),
];

fn layer_color(layer: &str) -> &'static str {
    LAYER_COLORS
        .iter()
        .find(|(name, _)| *name == layer)
        .map(|(_, c)| *c)
        .unwrap_or("#7f7f7f")
}

/// Render the layout to an SVG document (y axis flipped to screen convention).
pub fn layout_to_svg(layout: &Layout) -> String {
    let bb = layout.bounding_box();
    let (min, w, h) = match bb {
        Some(bb) => {
            let margin = 0.02 * bb.width().max(bb.height()).max(1.0);
            (
                [bb.min[0] - margin, bb.min[1] - margin],
                bb.width() + 2.0 * margin,
                bb.height() + 2.0 * margin,
            )
        }
        None => ([0.0, 0.0], 1.0, 1.0),
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {:.3} {:.3}" width="1200">"#,
        min[0],
        -(min[1] + h),
        w,
        h
    );
    let _ = writeln!(svg, r#"<g fill-rule="evenodd" stroke="none">"#);
    for poly in &layout.polygons {
        let mut d = String::new();
        for (i, p) in poly.vertices.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{}{:.4},{:.4}", cmd, p[0], -p[1]);
        }
        d.push('Z');
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="{}" fill-opacity="0.85"/>"#,
            d,
            layer_color(&poly.layer)
        );
    }
    let _ = writeln!(svg, "</g>\n</svg>");
    svg
}
