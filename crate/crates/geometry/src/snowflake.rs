//! Snowflake hole: six rectangular arms in a p6m arrangement.

use crate::error::{GeometryError, Result};
use crate::fillet::{round_corners_closed, FilletMode};
use crate::polygon::{Point, Polygon};

/// Build the snowflake outline: arms of length `r` and width `w` at multiples
/// of 60 degrees, corners rounded by `chamfer`.
///
/// The union of the six arm rectangles has its inter-arm valley vertices at
/// distance `w` from the center, so the construction requires
/// `r > sqrt(3)/2 * w` for the outline to stay simple.
pub fn snowflake_polygon(r: f64, w: f64, chamfer: f64) -> Result<Polygon> {
    if !(w > 0.0) || !(r > 0.0) {
        return Err(GeometryError::DegenerateDimensions(format!(
            "snowflake needs r > 0 and w > 0, got r = {r}, w = {w}"
        )));
    }
    let valley_x = 3f64.sqrt() / 2.0 * w;
    if r <= valley_x {
        return Err(GeometryError::DegenerateDimensions(format!(
            "snowflake arms vanish: need r > sqrt(3)/2 * w = {valley_x:.3}, got r = {r}"
        )));
    }
    // One arm along +x: valley, two tip corners. The +30 degree valley is
    // shared with the following arm and emitted as its first corner.
    let base: [Point; 3] = [[valley_x, -w / 2.0], [r, -w / 2.0], [r, w / 2.0]];
    let mut corners = Vec::with_capacity(18);
    for j in 0..6 {
        let theta = j as f64 * std::f64::consts::FRAC_PI_3;
        let (sin, cos) = theta.sin_cos();
        for p in base {
            corners.push([cos * p[0] - sin * p[1], sin * p[0] + cos * p[1]]);
        }
    }
    let vertices = round_corners_closed(&corners, chamfer, FilletMode::ConvexOnly)?;
    let mut poly = Polygon::new("snowflake", vertices);
    poly.ensure_ccw();
    Ok(poly)
}
