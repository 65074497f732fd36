//! Full resonator layout: C-hole train flanked by snowflake rows.
//!
//! The right half (x > 0) is generated cell by cell and mirrored through
//! x = 0, so the layout's mirror symmetry about the defect center plane is
//! exact. Each C-hole and snowflake is itself exactly symmetric about the
//! waveguide axis y = 0.

use crate::chole::c_hole_polygon;
use crate::error::Result;
use crate::params::{gradient_cell, CellParams, ResonatorParams};
use crate::polygon::{Layout, Polygon};
use crate::snowflake::snowflake_polygon;

/// Cell role along the train, innermost first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRole {
    Defect,
    Gradient(usize),
    Mirror,
    Taper(usize),
}

/// One emitted C-hole cell: role, dimensions, bridge width, chamfer.
#[derive(Debug, Clone, Copy)]
pub struct CellSpec {
    pub role: CellRole,
    pub cell: CellParams,
    pub d: f64,
    pub chamfer: f64,
}

/// The per-side cell sequence from the center outward.
pub fn cell_sequence(params: &ResonatorParams) -> Vec<CellSpec> {
    let mut cells = Vec::with_capacity(params.cells_per_side());
    for _ in 0..params.n_defect {
        cells.push(CellSpec {
            role: CellRole::Defect,
            cell: params.defect,
            d: params.d,
            chamfer: params.chamfer,
        });
    }
    // gradient index i runs 1 (mirror side) ..= n_gradient (defect side),
    // so spatially from the center outward the index decreases.
    for i in (1..=params.n_gradient).rev() {
        let cell = gradient_cell(&params.mirror, &params.defect, i, params.n_gradient)
            .expect("index in range by construction");
        cells.push(CellSpec {
            role: CellRole::Gradient(i),
            cell,
            d: params.d,
            chamfer: params.chamfer,
        });
    }
    for _ in 0..params.n_mirror {
        cells.push(CellSpec {
            role: CellRole::Mirror,
            cell: params.mirror,
            d: params.d,
            chamfer: params.chamfer,
        });
    }
    // Taper cells shrink linearly toward the open waveguide; the whole cell
    // (bridge and chamfer included) is scaled so the shape stays self-similar.
    for t in 1..=params.n_taper {
        let f = (params.n_taper + 1 - t) as f64 / (params.n_taper as f64 + 1.0);
        cells.push(CellSpec {
            role: CellRole::Taper(t),
            cell: params.mirror.scaled(f),
            d: params.d * f,
            chamfer: params.chamfer * f,
        });
    }
    cells
}

/// Generate the full vertebrae layout.
pub fn vertebrae_layout(params: &ResonatorParams) -> Result<Layout> {
    params.validate()?;
    let mut layout = Layout::new();

    // --- C-hole train ---------------------------------------------------
    // Right-side cell k (1-based from the center) sits at x = (k - 1/2) a,
    // bridge facing the center so the defect paddles meet at x = 0.
    let mut right_half: Vec<Polygon> = Vec::new();
    for (k, spec) in cell_sequence(params).iter().enumerate() {
        let hole = c_hole_polygon(&spec.cell, spec.d, spec.chamfer)?;
        // bridge toward -x: mirror the local cell, then move into place
        let x = (k as f64 + 0.5) * params.a;
        right_half.push(hole.mirror_x().translate(x, 0.0));
    }

    // --- snowflake lattice ----------------------------------------------
    // Triangular lattice rows above the waveguide; the innermost row sits at
    // y = s/2 and alternate rows shift by half a pitch. Columns cover the
    // cell train with one extra pitch of margin.
    let train_span = params.cells_per_side() as f64 * params.a;
    let n_cols = (train_span / params.a).ceil() as i64 + 1;
    let row_step = 3f64.sqrt() / 2.0 * params.a;
    let flake = snowflake_polygon(params.r, params.w, params.chamfer)?;
    let mut upper_rows: Vec<Polygon> = Vec::new();
    for m in 0..params.snowflake_rows {
        let y = params.s / 2.0 + m as f64 * row_step;
        let offset = if m % 2 == 0 { 0.5 } else { 0.0 };
        if offset == 0.0 {
            // on-axis column at x = 0 plus mirrored pairs
            upper_rows.push(flake.translate(0.0, y));
            for j in 1..=n_cols {
                upper_rows.push(flake.translate(j as f64 * params.a, y));
            }
        } else {
            for j in 0..n_cols {
                upper_rows.push(flake.translate((j as f64 + 0.5) * params.a, y));
            }
        }
    }
    right_half.extend(upper_rows);

    // Mirror x > 0 content through x = 0 (exact), keeping on-axis polygons
    // single; then mirror everything through y = 0 where needed.
    let mut full: Vec<Polygon> = Vec::new();
    for poly in &right_half {
        let bb = poly.bounding_box().expect("nonempty polygon");
        full.push(poly.clone());
        if bb.min[0] + bb.max[0] > 1e-9 {
            full.push(poly.mirror_x());
        }
    }
    let mut mirrored: Vec<Polygon> = Vec::new();
    for poly in &full {
        let bb = poly.bounding_box().expect("nonempty polygon");
        if bb.min[1] + bb.max[1] > 1e-9 {
            mirrored.push(poly.mirror_y());
        }
    }
    full.extend(mirrored);

    layout.extend(full);
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts_per_side() {
        let fab = ResonatorParams::fabrication();
        let seq = cell_sequence(&fab);
        assert_eq!(seq.len(), 2 + 3 + 3 + 1);
        let layout = vertebrae_layout(&fab).unwrap();
        assert_eq!(layout.layer_count("chole"), 2 * seq.len());
    }

    #[test]
    fn simulation_layout_counts() {
        let sim = ResonatorParams::simulation();
        let layout = vertebrae_layout(&sim).unwrap();
        // 10 cells per side, 2 sides
        assert_eq!(layout.layer_count("chole"), 20);
        assert!(layout.layer_count("snowflake") > 0);
    }

    #[test]
    fn periodic_train_when_uniform() {
        // n_gradient = 0 and mirror == defect gives a strictly periodic train.
        let mut params = ResonatorParams::simulation();
        params.defect = params.mirror;
        params.n_gradient = 0;
        params.n_taper = 0;
        let layout = vertebrae_layout(&params).unwrap();
        let holes: Vec<&Polygon> = layout
            .polygons
            .iter()
            .filter(|p| p.layer == "chole")
            .collect();
        // pick the right-side holes sorted by center x
        let mut right: Vec<&&Polygon> = holes
            .iter()
            .filter(|p| p.bounding_box().unwrap().min[0] > 0.0)
            .collect();
        right.sort_by(|a, b| {
            a.bounding_box().unwrap().min[0]
                .partial_cmp(&b.bounding_box().unwrap().min[0])
                .unwrap()
        });
        for pair in right.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for (va, vb) in a.vertices.iter().zip(b.vertices.iter()) {
                assert!((va[0] + params.a - vb[0]).abs() < 1e-9);
                assert!((va[1] - vb[1]).abs() < 1e-9);
            }
        }
    }
}
