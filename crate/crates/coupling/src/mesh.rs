//! Discretized field mesh: linear tetrahedra with nodal displacement and
//! electromagnetic fields, per-cell strain, and boundary facets of the solid.
//!
//! File format (.omcf): text header (units, counts, mode frequencies)
//! followed by little-endian binary arrays. One file per mode pair.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{CouplingError, Result};

pub const MATERIAL_VACUUM: u32 = 0;
pub const MATERIAL_SOLID: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub nodes: [u32; 4],
    pub material: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub nodes: [u32; 3],
    /// Outward unit normal of the solid.
    pub normal: [f64; 3],
}

pub type Vec3c = [Complex64; 3];
/// Symmetric strain in component order (xx, yy, zz, yz, xz, xy), tensor
/// components (not engineering shear).
pub type Strain6 = [Complex64; 6];

#[derive(Debug, Clone)]
pub struct FieldMesh {
    /// Node coordinates (m).
    pub nodes: Vec<[f64; 3]>,
    pub cells: Vec<Cell>,
    pub facets: Vec<Facet>,
    /// Nodal mechanical displacement (m).
    pub displacement: Vec<Vec3c>,
    /// Nodal electric field (V/m).
    pub e_field: Vec<Vec3c>,
    /// Nodal electric displacement (C/m^2).
    pub d_field: Vec<Vec3c>,
    /// Per-cell strain (dimensionless).
    pub strain: Vec<Strain6>,
    /// Optical mode frequency (rad/s).
    pub omega_o: f64,
    /// Mechanical mode frequency (rad/s).
    pub omega_m: f64,
}

impl FieldMesh {
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n == 0 || self.cells.is_empty() {
            return Err(CouplingError::Schema("mesh has no nodes or cells".into()));
        }
        for (name, len) in [
            ("displacement", self.displacement.len()),
            ("e_field", self.e_field.len()),
            ("d_field", self.d_field.len()),
        ] {
            if len != n {
                return Err(CouplingError::Schema(format!(
                    "{name} has {len} entries for {n} nodes"
                )));
            }
        }
        if self.strain.len() != self.cells.len() {
            return Err(CouplingError::Schema(format!(
                "strain has {} entries for {} cells",
                self.strain.len(),
                self.cells.len()
            )));
        }
        if !(self.omega_o > 0.0 && self.omega_m > 0.0) {
            return Err(CouplingError::Schema(
                "mode frequencies must be positive".into(),
            ));
        }
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.nodes.iter().any(|&ni| ni as usize >= n) {
                return Err(CouplingError::Schema(format!(
                    "cell {i} references a node out of range"
                )));
            }
            if cell.material > MATERIAL_SOLID {
                return Err(CouplingError::Schema(format!(
                    "cell {i} has unknown material id {}",
                    cell.material
                )));
            }
        }
        for (i, facet) in self.facets.iter().enumerate() {
            if facet.nodes.iter().any(|&ni| ni as usize >= n) {
                return Err(CouplingError::Schema(format!(
                    "facet {i} references a node out of range"
                )));
            }
            let norm = (facet.normal[0] * facet.normal[0]
                + facet.normal[1] * facet.normal[1]
                + facet.normal[2] * facet.normal[2])
                .sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(CouplingError::NonUnitNormal { index: i, norm });
            }
        }
        Ok(())
    }

    pub fn solid_cells(&self) -> impl Iterator<Item = (usize, &Cell)> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.material == MATERIAL_SOLID)
    }

    pub fn write_omcf(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "omcf 1")?;
        writeln!(f, "units m rad_s")?;
        writeln!(f, "omega_o {}", self.omega_o)?;
        writeln!(f, "omega_m {}", self.omega_m)?;
        writeln!(f, "nodes {}", self.nodes.len())?;
        writeln!(f, "cells {}", self.cells.len())?;
        writeln!(f, "facets {}", self.facets.len())?;
        writeln!(f, "data f64le")?;
        let write_f64 =
            |f: &mut std::io::BufWriter<std::fs::File>, v: f64| f.write_all(&v.to_le_bytes());
        for p in &self.nodes {
            for c in p {
                write_f64(&mut f, *c)?;
            }
        }
        for cell in &self.cells {
            for ni in cell.nodes {
                f.write_all(&ni.to_le_bytes())?;
            }
            f.write_all(&cell.material.to_le_bytes())?;
        }
        for facet in &self.facets {
            for ni in facet.nodes {
                f.write_all(&ni.to_le_bytes())?;
            }
        }
        for facet in &self.facets {
            for c in facet.normal {
                write_f64(&mut f, c)?;
            }
        }
        for field in [&self.displacement, &self.e_field, &self.d_field] {
            for v in field.iter() {
                for c in v {
                    write_f64(&mut f, c.re)?;
                    write_f64(&mut f, c.im)?;
                }
            }
        }
        for s in &self.strain {
            for c in s {
                write_f64(&mut f, c.re)?;
                write_f64(&mut f, c.im)?;
            }
        }
        Ok(())
    }
}

/// Load and validate a field mesh.
pub fn load_field_mesh(path: &Path) -> Result<FieldMesh> {
    let mut reader = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    let mut read_line = |reader: &mut BufReader<std::fs::File>| -> Result<String> {
        line.clear();
        reader.read_line(&mut line)?;
        Ok(line.trim_end().to_owned())
    };
    let magic = read_line(&mut reader)?;
    if magic != "omcf 1" {
        return Err(CouplingError::BadMeshFile(format!("bad magic `{magic}`")));
    }
    let units = read_line(&mut reader)?;
    if units != "units m rad_s" {
        return Err(CouplingError::Units(format!(
            "expected `units m rad_s`, got `{units}`"
        )));
    }
    let parse_kv = |expected: &str, s: String| -> Result<f64> {
        let mut it = s.split_whitespace();
        let key = it.next().unwrap_or("");
        if key != expected {
            return Err(CouplingError::BadMeshFile(format!(
                "expected `{expected}`, got `{s}`"
            )));
        }
        it.next()
            .unwrap_or("")
            .parse()
            .map_err(|e| CouplingError::BadMeshFile(format!("{expected}: {e}")))
    };
    let omega_o = {
        let s = read_line(&mut reader)?;
        parse_kv("omega_o", s)?
    };
    let omega_m = {
        let s = read_line(&mut reader)?;
        parse_kv("omega_m", s)?
    };
    let n_nodes = {
        let s = read_line(&mut reader)?;
        parse_kv("nodes", s)? as usize
    };
    let n_cells = {
        let s = read_line(&mut reader)?;
        parse_kv("cells", s)? as usize
    };
    let n_facets = {
        let s = read_line(&mut reader)?;
        parse_kv("facets", s)? as usize
    };
    let tag = read_line(&mut reader)?;
    if tag != "data f64le" {
        return Err(CouplingError::BadMeshFile(format!("bad data tag `{tag}`")));
    }

    let mut f64_buf = [0u8; 8];
    let mut u32_buf = [0u8; 4];
    let mut next_f64 = |r: &mut BufReader<std::fs::File>| -> Result<f64> {
        r.read_exact(&mut f64_buf)?;
        Ok(f64::from_le_bytes(f64_buf))
    };
    let mut next_u32 = |r: &mut BufReader<std::fs::File>| -> Result<u32> {
        r.read_exact(&mut u32_buf)?;
        Ok(u32::from_le_bytes(u32_buf))
    };

    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        nodes.push([
            next_f64(&mut reader)?,
            next_f64(&mut reader)?,
            next_f64(&mut reader)?,
        ]);
    }
    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let nodes4 = [
            next_u32(&mut reader)?,
            next_u32(&mut reader)?,
            next_u32(&mut reader)?,
            next_u32(&mut reader)?,
        ];
        let material = next_u32(&mut reader)?;
        cells.push(Cell {
            nodes: nodes4,
            material,
        });
    }
    let mut facet_nodes = Vec::with_capacity(n_facets);
    for _ in 0..n_facets {
        facet_nodes.push([
            next_u32(&mut reader)?,
            next_u32(&mut reader)?,
            next_u32(&mut reader)?,
        ]);
    }
    let mut facets = Vec::with_capacity(n_facets);
    for nodes3 in facet_nodes {
        facets.push(Facet {
            nodes: nodes3,
            normal: [0.0; 3],
        });
    }
    for facet in facets.iter_mut() {
        facet.normal = [
            next_f64(&mut reader)?,
            next_f64(&mut reader)?,
            next_f64(&mut reader)?,
        ];
    }
    let mut read_field = |r: &mut BufReader<std::fs::File>| -> Result<Vec<Vec3c>> {
        let mut out = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let mut v = [Complex64::default(); 3];
            for c in v.iter_mut() {
                let re = next_f64(r)?;
                let im = next_f64(r)?;
                *c = Complex64::new(re, im);
            }
            out.push(v);
        }
        Ok(out)
    };
    let displacement = read_field(&mut reader)?;
    let e_field = read_field(&mut reader)?;
    let d_field = read_field(&mut reader)?;
    let mut strain = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let mut s = [Complex64::default(); 6];
        for c in s.iter_mut() {
            let re = next_f64(&mut reader)?;
            let im = next_f64(&mut reader)?;
            *c = Complex64::new(re, im);
        }
        strain.push(s);
    }

    let mesh = FieldMesh {
        nodes,
        cells,
        facets,
        displacement,
        e_field,
        d_field,
        strain,
        omega_o,
        omega_m,
    };
    mesh.validate()?;
    Ok(mesh)
}
