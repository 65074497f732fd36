//! C-shape hole construction.
//!
//! The hole is the outer q x v rounded rectangle minus the centered p x u
//! paddle, with a solid bridge of width `d` connecting the paddle to the
//! surrounding slab through the +x side of the ring channel. The etched
//! region then wraps the paddle like the letter C. The upper half of the
//! boundary is built explicitly and mirrored through y = 0, so each cell is
//! exactly symmetric about the waveguide axis.

use crate::error::{GeometryError, Result};
use crate::fillet::round_corners_open;
use crate::params::CellParams;
use crate::polygon::{Point, Polygon};

/// Build a C-hole centered at the origin with its bridge toward +x.
pub fn c_hole_polygon(cell: &CellParams, d: f64, chamfer: f64) -> Result<Polygon> {
    cell.validate()?;
    if !(d > 0.0) || d >= cell.u {
        return Err(GeometryError::DegenerateDimensions(format!(
            "bridge width d = {d} must sit in (0, u = {})",
            cell.u
        )));
    }
    let (q2, v2, p2, u2, d2) = (
        cell.q / 2.0,
        cell.v / 2.0,
        cell.p / 2.0,
        cell.u / 2.0,
        d / 2.0,
    );
    // Upper-half boundary, walked from the paddle's left edge (on y = 0)
    // around the paddle, along the bridge, and around the outer wall.
    let upper: Vec<Point> = vec![
        [-p2, 0.0], // paddle left edge midpoint
        [-p2, u2],  // paddle top-left
        [p2, u2],   // paddle top-right
        [p2, d2],   // bridge root (paddle side)
        [v2, d2],   // bridge mouth (outer wall)
        [v2, q2],   // outer top-right
        [-v2, q2],  // outer top-left
        [-v2, 0.0], // outer left edge midpoint
    ];
    let rounded = round_corners_open(&upper, chamfer)?;
    let mut vertices = rounded.clone();
    for p in rounded.iter().rev().skip(1).take(rounded.len() - 2) {
        vertices.push([p[0], -p[1]]);
    }
    let mut poly = Polygon::new("chole", vertices);
    poly.ensure_ccw();
    Ok(poly)
}
