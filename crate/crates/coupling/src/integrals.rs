//! The coupling integrals: mechanical and electromagnetic normalizations,
//! moving-boundary surface term, and photoelastic volume term.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CouplingError, Result};
use crate::material::{MaterialProps, EPS0, HBAR};
use crate::mesh::{FieldMesh, Strain6, Vec3c, MATERIAL_SOLID};
use crate::quadrature::{tet_points, tet_volume, tri_area, tri_points};

fn interp3(values: [&Vec3c; 4], bary: &[f64; 4]) -> Vec3c {
    let mut out = [Complex64::default(); 3];
    for (v, &w) in values.iter().zip(bary) {
        for k in 0..3 {
            out[k] += v[k] * w;
        }
    }
    out
}

fn interp3_tri(values: [&Vec3c; 3], bary: &[f64; 3]) -> Vec3c {
    let mut out = [Complex64::default(); 3];
    for (v, &w) in values.iter().zip(bary) {
        for k in 0..3 {
            out[k] += v[k] * w;
        }
    }
    out
}

fn norm_sq(v: &Vec3c) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn dot_nc(v: &Vec3c, n: &[f64; 3]) -> Complex64 {
    v[0] * n[0] + v[1] * n[1] + v[2] * n[2]
}

/// Mechanical normalization: integral of rho |Q|^2 over the solid (kg m^2).
pub fn mech_norm(mesh: &FieldMesh, mat: &MaterialProps) -> Result<f64> {
    let mut total = 0.0;
    for (_, cell) in mesh.solid_cells() {
        let p: Vec<[f64; 3]> = cell.nodes.iter().map(|&n| mesh.nodes[n as usize]).collect();
        let vol = tet_volume(p[0], p[1], p[2], p[3]).abs();
        let q: Vec<&Vec3c> = cell
            .nodes
            .iter()
            .map(|&n| &mesh.displacement[n as usize])
            .collect();
        for bary in tet_points() {
            let qv = interp3([q[0], q[1], q[2], q[3]], &bary);
            total += mat.rho_kg_m3 * norm_sq(&qv) * vol / 4.0;
        }
    }
    if !(total > 0.0) {
        return Err(CouplingError::ZeroField("displacement"));
    }
    Ok(total)
}

/// Electromagnetic normalization: integral of eps |E|^2 over all space.
pub fn em_norm(mesh: &FieldMesh, mat: &MaterialProps) -> Result<f64> {
    let mut total = 0.0;
    for cell in &mesh.cells {
        let eps = if cell.material == MATERIAL_SOLID {
            mat.permittivity()
        } else {
            EPS0
        };
        let p: Vec<[f64; 3]> = cell.nodes.iter().map(|&n| mesh.nodes[n as usize]).collect();
        let vol = tet_volume(p[0], p[1], p[2], p[3]).abs();
        let e: Vec<&Vec3c> = cell
            .nodes
            .iter()
            .map(|&n| &mesh.e_field[n as usize])
            .collect();
        for bary in tet_points() {
            let ev = interp3([e[0], e[1], e[2], e[3]], &bary);
            total += eps * norm_sq(&ev) * vol / 4.0;
        }
    }
    if !(total > 0.0) {
        return Err(CouplingError::ZeroField("e_field"));
    }
    Ok(total)
}

/// Mode prefactor (omega_o / 2) sqrt(hbar / (2 omega_m)).
fn prefactor(mesh: &FieldMesh) -> f64 {
    0.5 * mesh.omega_o * (HBAR / (2.0 * mesh.omega_m)).sqrt()
}

/// Moving-boundary contribution (rad/s, complex before the magnitude).
///
/// Surface integral of (Q.n) [ |E_par|^2 (eps_s - eps_0)
///                             - |D_perp|^2 (1/eps_s - 1/eps_0) ]
/// over the solid boundary, normalized by sqrt(mech_norm) * em_norm. Both
/// E_par and D_perp are continuous across the dielectric boundary, so the
/// single-valued nodal traces are the correct ones on either side.
pub fn g_mb(mesh: &FieldMesh, mat: &MaterialProps) -> Result<Complex64> {
    if mesh.facets.is_empty() {
        return Err(CouplingError::MissingField("boundary facets"));
    }
    let eps_s = mat.permittivity();
    let de = eps_s - EPS0;
    let dinv = 1.0 / eps_s - 1.0 / EPS0;
    let mut surface = Complex64::default();
    for (i, facet) in mesh.facets.iter().enumerate() {
        let p: Vec<[f64; 3]> = facet
            .nodes
            .iter()
            .map(|&n| mesh.nodes[n as usize])
            .collect();
        let area = tri_area(p[0], p[1], p[2]);
        if area <= 0.0 {
            return Err(CouplingError::DegenerateFacet { index: i, area });
        }
        let n = facet.normal;
        let q: Vec<&Vec3c> = facet
            .nodes
            .iter()
            .map(|&ni| &mesh.displacement[ni as usize])
            .collect();
        let e: Vec<&Vec3c> = facet
            .nodes
            .iter()
            .map(|&ni| &mesh.e_field[ni as usize])
            .collect();
        let d: Vec<&Vec3c> = facet
            .nodes
            .iter()
            .map(|&ni| &mesh.d_field[ni as usize])
            .collect();
        for bary in tri_points() {
            let qv = interp3_tri([q[0], q[1], q[2]], &bary);
            let ev = interp3_tri([e[0], e[1], e[2]], &bary);
            let dv = interp3_tri([d[0], d[1], d[2]], &bary);
            let qn = dot_nc(&qv, &n);
            let en = dot_nc(&ev, &n);
            let e_par = [ev[0] - en * n[0], ev[1] - en * n[1], ev[2] - en * n[2]];
            let dn = dot_nc(&dv, &n);
            let d_perp_sq = dn.norm_sqr();
            surface += qn * (norm_sq(&e_par) * de - d_perp_sq * dinv) * (area / 3.0);
        }
    }
    let denom = mech_norm(mesh, mat)?.sqrt() * em_norm(mesh, mat)?;
    Ok(-prefactor(mesh) * surface / denom)
}

/// Photoelastic tensor contraction (p : strain)_ij for a cubic crystal,
/// stress-like Voigt convention with tensor strain components:
/// diagonal: p11 e_ii + p12 (e_jj + e_kk); off-diagonal: 2 p44 e_ij.
pub fn photoelastic_contraction(mat: &MaterialProps, strain: &Strain6) -> [[Complex64; 3]; 3] {
    let [exx, eyy, ezz, eyz, exz, exy] = *strain;
    let diag =
        |eii: Complex64, ejj: Complex64, ekk: Complex64| mat.p11 * eii + mat.p12 * (ejj + ekk);
    let shear = |eij: Complex64| 2.0 * mat.p44 * eij;
    [
        [diag(exx, eyy, ezz), shear(exy), shear(exz)],
        [shear(exy), diag(eyy, exx, ezz), shear(eyz)],
        [shear(exz), shear(eyz), diag(ezz, exx, eyy)],
    ]
}

/// Photoelastic contribution (rad/s, complex before the magnitude).
///
/// Volume integral of (1/eps_0) E* . eps_s (p : strain) eps_s . E over the
/// solid, normalized as in `g_mb`. With scalar eps_s = eps_0 eps_r the
/// integrand prefactor reduces to eps_0 eps_r^2.
pub fn g_pe(mesh: &FieldMesh, mat: &MaterialProps) -> Result<Complex64> {
    if mesh.strain.len() != mesh.cells.len() {
        return Err(CouplingError::MissingField("strain"));
    }
    let factor = EPS0 * mat.eps_r * mat.eps_r;
    let mut volume_term = Complex64::default();
    for (ci, cell) in mesh.solid_cells() {
        let p: Vec<[f64; 3]> = cell.nodes.iter().map(|&n| mesh.nodes[n as usize]).collect();
        let vol = tet_volume(p[0], p[1], p[2], p[3]).abs();
        let pe = photoelastic_contraction(mat, &mesh.strain[ci]);
        let e: Vec<&Vec3c> = cell
            .nodes
            .iter()
            .map(|&n| &mesh.e_field[n as usize])
            .collect();
        for bary in tet_points() {
            let ev = interp3([e[0], e[1], e[2], e[3]], &bary);
            let mut acc = Complex64::default();
            for i in 0..3 {
                for j in 0..3 {
                    acc += ev[i].conj() * pe[i][j] * ev[j];
                }
            }
            volume_term += acc * (vol / 4.0);
        }
    }
    let denom = mech_norm(mesh, mat)?.sqrt() * em_norm(mesh, mat)?;
    Ok(prefactor(mesh) * factor * volume_term / denom)
}

/// Combined coupling report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingResult {
    pub g_mb_re: f64,
    pub g_mb_im: f64,
    pub g_pe_re: f64,
    pub g_pe_im: f64,
    /// |g_mb + g_pe| (rad/s).
    pub g_om: f64,
    /// g_om / 2 pi (Hz).
    pub g_om_hz: f64,
    pub nodes: usize,
    pub cells: usize,
    pub solid_cells: usize,
    pub facets: usize,
}

/// g_om = |g_MB + g_PE|, with both contributions reported.
pub fn g_om_total(mesh: &FieldMesh, mat: &MaterialProps) -> Result<CouplingResult> {
    mat.validate()?;
    mesh.validate()?;
    let mb = g_mb(mesh, mat)?;
    let pe = g_pe(mesh, mat)?;
    let g = (mb + pe).norm();
    Ok(CouplingResult {
        g_mb_re: mb.re,
        g_mb_im: mb.im,
        g_pe_re: pe.re,
        g_pe_im: pe.im,
        g_om: g,
        g_om_hz: g / (2.0 * std::f64::consts::PI),
        nodes: mesh.nodes.len(),
        cells: mesh.cells.len(),
        solid_cells: mesh.solid_cells().count(),
        facets: mesh.facets.len(),
    })
}
