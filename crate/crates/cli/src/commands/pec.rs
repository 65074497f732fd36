//! `omc pec`: forward dose convolution and inverse correction.

use std::path::Path;

use anyhow::{Context, Result};
use omc_pec::{
    convolve_dose, correct_dose, rasterize, ConvolveOptions, CorrectionOptions, DoseMap, PsfModel,
};
use serde::Serialize;

use super::require_file;
use crate::provenance::Provenance;

#[derive(Serialize)]
struct ForwardReport {
    mass_in: f64,
    mass_out: f64,
    conservation_error: f64,
    margin_required_nm: f64,
    margin_actual_nm: Option<f64>,
    truncated: bool,
    warnings: Vec<String>,
    grid: [usize; 2],
    pixel_nm: f64,
    provenance: Provenance,
}

pub fn forward(
    layout_path: &Path,
    psf_path: &Path,
    pixel: f64,
    margin: f64,
    allow_truncation: bool,
    out: &Path,
) -> Result<()> {
    require_file(layout_path)?;
    require_file(psf_path)?;
    let layout = omc_geometry::Layout::read_json(layout_path).context("loading layout")?;
    let model = PsfModel::read_json(psf_path).context("loading PSF")?;
    let written = rasterize(&layout, pixel, margin).context("rasterizing")?;
    let (dose, diag) = convolve_dose(&written, &model, &ConvolveOptions { allow_truncation })
        .context("convolving")?;
    dose.write_binary(out)
        .with_context(|| format!("writing {}", out.display()))?;
    let report = ForwardReport {
        mass_in: diag.mass_in,
        mass_out: diag.mass_out,
        conservation_error: (diag.mass_out - diag.mass_in).abs() / diag.mass_in.max(1e-300),
        margin_required_nm: diag.margin_required_nm,
        margin_actual_nm: diag.margin_actual_nm,
        truncated: diag.truncated,
        warnings: diag.warnings.clone(),
        grid: [dose.nx, dose.ny],
        pixel_nm: dose.pixel,
        provenance: Provenance::new("pec forward", &std::fs::read_to_string(psf_path)?, None),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

#[derive(Serialize)]
struct CorrectReport {
    iterations: usize,
    residual: f64,
    converged: bool,
    grid: [usize; 2],
    pixel_nm: f64,
    provenance: Provenance,
}

pub fn correct(
    target_path: &Path,
    psf_path: &Path,
    tol: f64,
    iters: usize,
    allow_truncation: bool,
    out: &Path,
) -> Result<()> {
    require_file(target_path)?;
    require_file(psf_path)?;
    let target = DoseMap::read_binary(target_path).context("loading target dose")?;
    let model = PsfModel::read_json(psf_path).context("loading PSF")?;
    let result = correct_dose(
        &target,
        &model,
        &CorrectionOptions {
            max_iters: iters,
            tol,
            damping: 1.0,
            allow_truncation,
        },
    )
    .context("correcting")?;
    result
        .dose
        .write_binary(out)
        .with_context(|| format!("writing {}", out.display()))?;
    let report = CorrectReport {
        iterations: result.iterations,
        residual: result.residual,
        converged: result.converged,
        grid: [result.dose.nx, result.dose.ny],
        pixel_nm: result.dose.pixel,
        provenance: Provenance::new("pec correct", &std::fs::read_to_string(psf_path)?, None),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !result.converged {
        eprintln!(
            "warning: not converged after {} iterations (residual {:.3e})",
            result.iterations, result.residual
        );
    }
    Ok(())
}

pub fn raster(layout_path: &Path, pixel: f64, margin: f64, binary: bool, out: &Path) -> Result<()> {
    require_file(layout_path)?;
    let layout = omc_geometry::Layout::read_json(layout_path).context("loading layout")?;
    let mut map = rasterize(&layout, pixel, margin).context("rasterizing")?;
    if binary {
        for v in map.values.iter_mut() {
            *v = if *v >= 0.5 { 1.0 } else { 0.0 };
        }
    }
    map.write_binary(out)
        .with_context(|| format!("writing {}", out.display()))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "grid": [map.nx, map.ny],
            "pixel_nm": map.pixel,
            "mass": map.mass(),
        }))?
    );
    Ok(())
}
