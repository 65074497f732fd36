//! Corner rounding with circular fillets.

use crate::error::{GeometryError, Result};
use crate::polygon::Point;

/// Angular step for fillet arc discretization. 0.2 rad keeps the chord error
/// at 0.1 nm for the nominal 20 nm chamfer, and an angle-based step keeps the
/// emitted vertex list exactly equivariant under global scaling.
pub const ARC_STEP_RAD: f64 = 0.2;

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = norm(v);
    [v[0] / n, v[1] / n]
}

/// Which corners of a loop receive fillets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilletMode {
    /// Round every corner.
    All,
    /// Round only corners that turn with the loop orientation (convex for a
    /// counter-clockwise loop); reentrant corners stay sharp.
    ConvexOnly,
}

/// Replace corners of a closed loop by tangent arcs of the given radius.
/// `radius = 0` returns the corners unchanged. Collinear corners are passed
/// through. Errors if a fillet would consume more than half of an adjacent
/// edge.
pub fn round_corners_closed(
    corners: &[Point],
    radius: f64,
    mode: FilletMode,
) -> Result<Vec<Point>> {
    if radius == 0.0 {
        return Ok(corners.to_vec());
    }
    let orientation = crate::polygon::shoelace(corners).signum();
    let n = corners.len();
    let mut out = Vec::with_capacity(n * 8);
    for i in 0..n {
        let prev = corners[(i + n - 1) % n];
        let v = corners[i];
        let next = corners[(i + 1) % n];
        if mode == FilletMode::ConvexOnly {
            let a = [v[0] - prev[0], v[1] - prev[1]];
            let b = [next[0] - v[0], next[1] - v[1]];
            if (a[0] * b[1] - a[1] * b[0]) * orientation <= 0.0 {
                out.push(v);
                continue;
            }
        }
        fillet_corner(prev, v, next, radius, &mut out)?;
    }
    Ok(out)
}

/// Round the corners of an open path, keeping the two endpoints fixed.
pub fn round_corners_open(path: &[Point], radius: f64) -> Result<Vec<Point>> {
    if radius == 0.0 || path.len() < 3 {
        return Ok(path.to_vec());
    }
    let mut out = Vec::with_capacity(path.len() * 8);
    out.push(path[0]);
    for i in 1..path.len() - 1 {
        fillet_corner(path[i - 1], path[i], path[i + 1], radius, &mut out)?;
    }
    out.push(*path.last().unwrap());
    Ok(out)
}

fn fillet_corner(
    prev: Point,
    v: Point,
    next: Point,
    radius: f64,
    out: &mut Vec<Point>,
) -> Result<()> {
    let ein = [v[0] - prev[0], v[1] - prev[1]];
    let eout = [next[0] - v[0], next[1] - v[1]];
    let (lin, lout) = (norm(ein), norm(eout));
    if lin == 0.0 || lout == 0.0 {
        return Err(GeometryError::DegenerateDimensions(
            "zero-length edge at fillet corner".into(),
        ));
    }
    let a = unit(ein);
    let b = unit(eout);
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    let turn = cross.atan2(dot);
    if turn.abs() < 1e-12 {
        out.push(v); // collinear
        return Ok(());
    }
    if (turn.abs() - std::f64::consts::PI).abs() < 1e-12 {
        return Err(GeometryError::DegenerateDimensions(
            "fillet at a cusp (edges fold back)".into(),
        ));
    }
    let tangent = radius * (turn.abs() / 2.0).tan();
    if tangent > lin / 2.0 + 1e-9 || tangent > lout / 2.0 + 1e-9 {
        return Err(GeometryError::DegenerateDimensions(format!(
            "fillet radius {radius} too large for edges {lin:.3} / {lout:.3}"
        )));
    }
    let t1 = [v[0] - a[0] * tangent, v[1] - a[1] * tangent];
    // Arc center sits off t1 along the normal of the incoming edge, on the
    // side the path turns toward.
    let side = turn.signum();
    let n1 = [-a[1] * side, a[0] * side];
    let center = [t1[0] + n1[0] * radius, t1[1] + n1[1] * radius];
    let start = (t1[1] - center[1]).atan2(t1[0] - center[0]);

    let segments = (turn.abs() / ARC_STEP_RAD).ceil().max(1.0) as usize;
    for k in 0..=segments {
        let theta = start + side * turn.abs() * k as f64 / segments as f64;
        out.push([
            center[0] + radius * theta.cos(),
            center[1] + radius * theta.sin(),
        ]);
    }
    Ok(())
}
