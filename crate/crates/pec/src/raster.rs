//! Antialiased coverage rasterization of layouts.
//!
//! Pixel values are the fractional area inside the exposed (nonzero-winding)
//! region, computed from exact x-interval coverage on 16 sub-rows per pixel
//! row.

use omc_geometry::Layout;

use crate::dosemap::DoseMap;
use crate::error::{PecError, Result};

const SUB_ROWS: usize = 16;

struct Edge {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    /// +1 for upward edges, -1 for downward.
    dir: i32,
}

/// Rasterize a layout at the given pixel size with `margin_nm` of empty
/// border on all sides.
pub fn rasterize(layout: &Layout, pixel: f64, margin_nm: f64) -> Result<DoseMap> {
    if !(pixel > 0.0) {
        return Err(PecError::InvalidParameter {
            name: "pixel",
            reason: format!("must be > 0, got {pixel}"),
        });
    }
    let bb = layout.bounding_box().ok_or(PecError::EmptyLayout)?;
    let origin = [bb.min[0] - margin_nm, bb.min[1] - margin_nm];
    let nx = ((bb.width() + 2.0 * margin_nm) / pixel).ceil().max(1.0) as usize;
    let ny = ((bb.height() + 2.0 * margin_nm) / pixel).ceil().max(1.0) as usize;
    let mut map = DoseMap::zeros(origin, pixel, nx, ny)?;

    // collect non-horizontal edges with winding direction
    let mut edges = Vec::new();
    for poly in &layout.polygons {
        let n = poly.vertices.len();
        for i in 0..n {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            if a[1] == b[1] {
                continue;
            }
            let (bottom, top, dir) = if a[1] < b[1] { (a, b, 1) } else { (b, a, -1) };
            edges.push(Edge {
                x0: bottom[0],
                y0: bottom[1],
                x1: top[0],
                y1: top[1],
                dir,
            });
        }
    }

    // bucket edges by pixel row for the scanline pass
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); ny];
    for (idx, e) in edges.iter().enumerate() {
        let r0 = (((e.y0 - origin[1]) / pixel).floor() as i64).clamp(0, ny as i64 - 1);
        let r1 = (((e.y1 - origin[1]) / pixel).floor() as i64).clamp(0, ny as i64 - 1);
        for row in r0..=r1 {
            buckets[row as usize].push(idx as u32);
        }
    }

    let mut crossings: Vec<(f64, i32)> = Vec::new();
    for (iy, bucket) in buckets.iter().enumerate() {
        for sub in 0..SUB_ROWS {
            let y = origin[1] + (iy as f64 + (sub as f64 + 0.5) / SUB_ROWS as f64) * pixel;
            crossings.clear();
            for &idx in bucket {
                let e = &edges[idx as usize];
                if e.y0 <= y && y < e.y1 {
                    let x = e.x0 + (y - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0);
                    crossings.push((x, e.dir));
                }
            }
            crossings.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut winding = 0;
            let mut span_start = 0.0;
            for &(x, dir) in crossings.iter() {
                if winding != 0 {
                    accumulate_span(&mut map, iy, span_start, x);
                }
                winding += dir;
                span_start = x;
            }
        }
    }
    Ok(map)
}

/// Add a covered x interval (world nm) into one pixel row.
fn accumulate_span(map: &mut DoseMap, iy: usize, xa: f64, xb: f64) {
    let pixel = map.pixel;
    let pa = ((xa - map.origin[0]) / pixel).max(0.0);
    let pb = ((xb - map.origin[0]) / pixel).min(map.nx as f64);
    if pb <= pa {
        return;
    }
    let i0 = pa.floor() as usize;
    let i1 = (pb.ceil() as usize).min(map.nx);
    for ix in i0..i1 {
        let overlap = (pb.min(ix as f64 + 1.0) - pa.max(ix as f64)).max(0.0);
        *map.at_mut(ix, iy) += overlap / SUB_ROWS as f64;
    }
}
