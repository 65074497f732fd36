//! Mirror-symmetry measurement for layouts.

use serde::{Deserialize, Serialize};

use crate::polygon::{Layout, Point};

/// A mirror plane in 2-D: the line through `origin` perpendicular to `normal`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MirrorPlane {
    pub origin: Point,
    pub normal: Point,
}

impl MirrorPlane {
    /// The plane x = 0.
    pub fn x0() -> Self {
        MirrorPlane {
            origin: [0.0, 0.0],
            normal: [1.0, 0.0],
        }
    }

    /// The plane y = 0.
    pub fn y0() -> Self {
        MirrorPlane {
            origin: [0.0, 0.0],
            normal: [0.0, 1.0],
        }
    }

    /// Householder reflection of a point through the plane.
    pub fn reflect(&self, p: Point) -> Point {
        let n = self.normal;
        let nn = n[0] * n[0] + n[1] * n[1];
        let d = ((p[0] - self.origin[0]) * n[0] + (p[1] - self.origin[1]) * n[1]) / nn;
        [p[0] - 2.0 * d * n[0], p[1] - 2.0 * d * n[1]]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Largest distance from any reflected vertex to its nearest original
    /// vertex, after matching each reflected vertex to the closest original.
    pub max_deviation: f64,
    pub vertex_count: usize,
}

/// Measure how far a layout is from mirror symmetry about a plane.
///
/// Every vertex is reflected and matched against the nearest original vertex;
/// the report carries the worst-case distance. Mismatch is data, not an
/// error: a 0 nm report means exact symmetry.
pub fn symmetry_check(layout: &Layout, plane: &MirrorPlane) -> SymmetryReport {
    let points: Vec<Point> = layout
        .polygons
        .iter()
        .flat_map(|p| p.vertices.iter().copied())
        .collect();
    if points.is_empty() {
        return SymmetryReport {
            max_deviation: 0.0,
            vertex_count: 0,
        };
    }
    let index = GridIndex::build(&points);
    let max_deviation = points
        .iter()
        .map(|&p| index.nearest_distance(plane.reflect(p)))
        .fold(0.0f64, f64::max);
    SymmetryReport {
        max_deviation,
        vertex_count: points.len(),
    }
}

/// Uniform-grid spatial index for nearest-vertex queries.
struct GridIndex {
    cell: f64,
    min: Point,
    nx: i64,
    ny: i64,
    bins: Vec<Vec<Point>>,
}

impl GridIndex {
    fn build(points: &[Point]) -> Self {
        let mut min = points[0];
        let mut max = points[0];
        for p in points {
            min[0] = min[0].min(p[0]);
            min[1] = min[1].min(p[1]);
            max[0] = max[0].max(p[0]);
            max[1] = max[1].max(p[1]);
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1.0);
        // aim for O(1) points per bin
        let target = (points.len() as f64).sqrt().ceil().max(1.0);
        let cell = (span / target).max(1e-6);
        let nx = ((max[0] - min[0]) / cell).floor() as i64 + 1;
        let ny = ((max[1] - min[1]) / cell).floor() as i64 + 1;
        let mut bins = vec![Vec::new(); (nx * ny) as usize];
        for &p in points {
            let (ix, iy) = Self::key(min, cell, nx, ny, p);
            bins[(iy * nx + ix) as usize].push(p);
        }
        GridIndex {
            cell,
            min,
            nx,
            ny,
            bins,
        }
    }

    fn key(min: Point, cell: f64, nx: i64, ny: i64, p: Point) -> (i64, i64) {
        let ix = (((p[0] - min[0]) / cell).floor() as i64).clamp(0, nx - 1);
        let iy = (((p[1] - min[1]) / cell).floor() as i64).clamp(0, ny - 1);
        (ix, iy)
    }

    fn nearest_distance(&self, p: Point) -> f64 {
        let (cx, cy) = Self::key(self.min, self.cell, self.nx, self.ny, p);
        let mut best = f64::INFINITY;
        let mut found_any = false;
        // expand rings until the found distance is safely within the ring
        for ring in 0..self.nx.max(self.ny) + 1 {
            for iy in (cy - ring).max(0)..=(cy + ring).min(self.ny - 1) {
                for ix in (cx - ring).max(0)..=(cx + ring).min(self.nx - 1) {
                    if ring > 0
                        && ix > cx - ring
                        && ix < cx + ring
                        && iy > cy - ring
                        && iy < cy + ring
                    {
                        continue; // interior already scanned
                    }
                    for q in &self.bins[(iy * self.nx + ix) as usize] {
                        found_any = true;
                        let d = (p[0] - q[0]).hypot(p[1] - q[1]);
                        best = best.min(d);
                    }
                }
            }
            if best <= (ring as f64) * self.cell && found_any {
                break;
            }
        }
        best
    }
}
