//! Polygon and layout primitives.
//!
//! All coordinates are in nanometres. A layout is a flat list of closed
//! polygon loops with layer tags; counter-clockwise loops mark exposed
//! (etched) area, clockwise loops carve solid islands out of an enclosing
//! loop (nonzero winding).

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polygon {
    pub layer: String,
    /// Closed loop; the first vertex is not repeated at the end.
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(layer: impl Into<String>, vertices: Vec<Point>) -> Self {
        Self {
            layer: layer.into(),
            vertices,
        }
    }

    /// Signed area by the shoelace formula; positive for counter-clockwise.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Reverse the winding direction in place.
    pub fn reverse(&mut self) {
        self.vertices.reverse();
    }

    /// Force counter-clockwise orientation.
    pub fn ensure_ccw(&mut self) {
        if self.signed_area() < 0.0 {
            self.reverse();
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            layer: self.layer.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|p| [p[0] + dx, p[1] + dy])
                .collect(),
        }
    }

    /// Mirror through the plane x = 0. Exact in floating point (sign flip).
    pub fn mirror_x(&self) -> Polygon {
        let mut v: Vec<Point> = self.vertices.iter().map(|p| [-p[0], p[1]]).collect();
        v.reverse(); // preserve winding sense
        Polygon {
            layer: self.layer.clone(),
            vertices: v,
        }
    }

    /// Mirror through the plane y = 0. Exact in floating point (sign flip).
    pub fn mirror_y(&self) -> Polygon {
        let mut v: Vec<Point> = self.vertices.iter().map(|p| [p[0], -p[1]]).collect();
        v.reverse();
        Polygon {
            layer: self.layer.clone(),
            vertices: v,
        }
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        BoundingBox::of_points(&self.vertices)
    }

    /// True if no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let (a1, a2) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                // skip adjacent edges (share a vertex)
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn shoelace(v: &[Point]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let [x0, y0] = v[i];
        let [x1, y1] = v[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn of_points(points: &[Point]) -> Option<Self> {
        let first = points.first()?;
        let mut bb = BoundingBox {
            min: *first,
            max: *first,
        };
        for p in points {
            bb.min[0] = bb.min[0].min(p[0]);
            bb.min[1] = bb.min[1].min(p[1]);
            bb.max[0] = bb.max[0].max(p[0]);
            bb.max[1] = bb.max[1].max(p[1]);
        }
        Some(bb)
    }

    pub fn union(self, other: BoundingBox) -> BoundingBox {
        BoundingBox {
            min: [self.min[0].min(other.min[0]), self.min[1].min(other.min[1])],
            max: [self.max[0].max(other.max[0]), self.max[1].max(other.max[1])],
        }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }
}

/// A set of closed polygon loops in nm, JSON-serializable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layout {
    pub units: String,
    pub polygons: Vec<Polygon>,
}

impl Default for Layout {
    fn default() -> Self {
        Self::new()
    }
}

impl Layout {
    pub fn new() -> Self {
        Layout {
            units: "nm".to_owned(),
            polygons: Vec::new(),
        }
    }

    pub fn push(&mut self, polygon: Polygon) {
        self.polygons.push(polygon);
    }

    pub fn extend(&mut self, polygons: impl IntoIterator<Item = Polygon>) {
        self.polygons.extend(polygons);
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        self.polygons
            .iter()
            .filter_map(|p| p.bounding_box())
            .reduce(BoundingBox::union)
    }

    pub fn layer_count(&self, layer: &str) -> usize {
        self.polygons.iter().filter(|p| p.layer == layer).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Layout> {
        let layout: Layout = serde_json::from_str(text)?;
        if layout.units != "nm" {
            return Err(GeometryError::Domain(format!(
                "layout units must be nm, got {}",
                layout.units
            )));
        }
        Ok(layout)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Layout> {
        Layout::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::new("test", vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    #[test]
    fn shoelace_square() {
        assert_eq!(unit_square().signed_area(), 1.0);
        let mut sq = unit_square();
        sq.reverse();
        assert_eq!(sq.signed_area(), -1.0);
    }

    #[test]
    fn simple_detection() {
        assert!(unit_square().is_simple());
        let bowtie = Polygon::new("test", vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(!bowtie.is_simple());
    }

    #[test]
    fn json_round_trip() {
        let mut layout = Layout::new();
        layout.push(unit_square());
        let text = layout.to_json().unwrap();
        let back = Layout::from_json(&text).unwrap();
        assert_eq!(back.polygons.len(), 1);
        assert_eq!(back.polygons[0].vertices, layout.polygons[0].vertices);
    }

    #[test]
    fn mirror_is_exact() {
        let p = Polygon::new("test", vec![[1.25, -3.5], [7.0, 2.0], [0.5, 4.0]]);
        let m = p.mirror_x().mirror_x();
        assert_eq!(m.vertices, p.vertices);
    }
}
