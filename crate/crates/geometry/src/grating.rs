//! Focusing grating coupler curves.
//!
//! Each grate edge follows the conic a = b*x + sqrt(x^2 + y^2) about the
//! focus at the origin, where `a` is the y-intercept distance. In polar form
//! r = a / (1 + b cos(theta)), so b = 0 gives circular arcs of radius a.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::params::GratingParams;
use crate::polygon::{Point, Polygon};

/// Chord-error tolerance for curve discretization (nm).
pub const CURVE_CHORD_TOL_NM: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrateCurve {
    /// y-intercept distance for this edge (nm).
    pub a: f64,
    /// Sampled points along the conic, symmetric about the x axis.
    pub points: Vec<Point>,
}

/// Implicit-equation residual a - b x - sqrt(x^2 + y^2); zero on the curve.
pub fn curve_residual(a: f64, b: f64, x: f64, y: f64) -> f64 {
    a - b * x - x.hypot(y)
}

/// Evaluate |y| on the curve for a given x; error where the conic has no
/// real solution.
pub fn curve_y(a: f64, b: f64, x: f64) -> Result<f64> {
    let t = a - b * x;
    let y2 = t * t - x * x;
    if t < 0.0 || y2 < 0.0 {
        return Err(GeometryError::NonRealCurve { a, b });
    }
    Ok(y2.sqrt())
}

/// Sample one conic over the fan, adaptively in polar angle.
fn sample_curve(a: f64, b: f64, fan_half_angle: f64) -> Vec<Point> {
    // r(theta) is smooth; bound the chord error by the local radius.
    let r_max = a / (1.0 - b.abs());
    let dtheta = (2.0 * (2.0 * CURVE_CHORD_TOL_NM / r_max).sqrt()).min(0.05);
    let steps = (2.0 * fan_half_angle / dtheta).ceil() as usize;
    (0..=steps)
        .map(|i| {
            let theta = -fan_half_angle + 2.0 * fan_half_angle * i as f64 / steps as f64;
            let r = a / (1.0 + b * theta.cos());
            [r * theta.cos(), r * theta.sin()]
        })
        .collect()
}

/// Emit the grate edge curves: the n-th grate pair sits at
/// a_n = (n+1) * pitch and a_n + fill * pitch.
pub fn grating_curves(params: &GratingParams) -> Result<Vec<GrateCurve>> {
    params.validate()?;
    let fan = params.fan_half_angle_deg.to_radians();
    let mut curves = Vec::with_capacity(2 * params.n_grates);
    for n in 0..params.n_grates {
        let a0 = (n as f64 + 1.0) * params.pitch;
        for a in [a0, a0 + params.fill * params.pitch] {
            curves.push(GrateCurve {
                a,
                points: sample_curve(a, params.b, fan),
            });
        }
    }
    Ok(curves)
}

/// Close each grate pair into an etched-slot polygon for layout export.
pub fn grating_polygons(params: &GratingParams) -> Result<Vec<Polygon>> {
    let curves = grating_curves(params)?;
    let mut polys = Vec::with_capacity(params.n_grates);
    for pair in curves.chunks(2) {
        let mut vertices = pair[0].points.clone();
        vertices.extend(pair[1].points.iter().rev().copied());
        let mut poly = Polygon::new("grating", vertices);
        poly.ensure_ccw();
        polys.push(poly);
    }
    Ok(polys)
}
