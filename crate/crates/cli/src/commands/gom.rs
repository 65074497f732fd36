//! `omc gom`: coupling integrals over a field-mesh export.

use std::path::Path;

use anyhow::{Context, Result};
use omc_coupling::{g_om_total, load_field_mesh, MaterialProps};
use serde::Serialize;

use super::require_file;
use crate::provenance::Provenance;

#[derive(Serialize)]
struct GomReport {
    g_mb_re: f64,
    g_mb_im: f64,
    g_pe_re: f64,
    g_pe_im: f64,
    g_om_rad_s: f64,
    g_om_hz: f64,
    mesh: MeshStats,
    provenance: Provenance,
}

#[derive(Serialize)]
struct MeshStats {
    nodes: usize,
    cells: usize,
    solid_cells: usize,
    facets: usize,
    omega_o: f64,
    omega_m: f64,
}

pub fn run(mesh_path: &Path, material_path: &Path, out: &Path) -> Result<()> {
    require_file(mesh_path)?;
    require_file(material_path)?;
    let mesh = load_field_mesh(mesh_path).context("loading field mesh")?;
    let material = MaterialProps::read_json(material_path).context("loading material")?;
    let result = g_om_total(&mesh, &material).context("evaluating coupling integrals")?;
    let report = GomReport {
        g_mb_re: result.g_mb_re,
        g_mb_im: result.g_mb_im,
        g_pe_re: result.g_pe_re,
        g_pe_im: result.g_pe_im,
        g_om_rad_s: result.g_om,
        g_om_hz: result.g_om_hz,
        mesh: MeshStats {
            nodes: result.nodes,
            cells: result.cells,
            solid_cells: result.solid_cells,
            facets: result.facets,
            omega_o: mesh.omega_o,
            omega_m: mesh.omega_m,
        },
        provenance: Provenance::new("gom", &std::fs::read_to_string(material_path)?, None),
    };
    let text = serde_json::to_string_pretty(&report)?;
    std::fs::write(out, &text).with_context(|| format!("writing {}", out.display()))?;
    println!("{text}");
    Ok(())
}
