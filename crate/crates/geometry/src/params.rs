//! Device parameterizations. All lengths in nm.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::smoothstep::smoothstep;

/// C-hole cell dimensions: outer opening height/width and the paddle held inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    /// C-hole outer height (nm).
    pub q: f64,
    /// C-hole outer width (nm).
    pub v: f64,
    /// Paddle length (nm).
    pub p: f64,
    /// Paddle width (nm).
    pub u: f64,
}

impl CellParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("q", self.q), ("v", self.v), ("p", self.p), ("u", self.u)] {
            if !(value > 0.0) {
                return Err(GeometryError::InvalidParameter {
                    name,
                    reason: format!("must be > 0, got {value}"),
                });
            }
        }
        if self.p >= self.v {
            return Err(GeometryError::InvalidParameter {
                name: "p",
                reason: format!("paddle length {} must be < outer width {}", self.p, self.v),
            });
        }
        if self.u >= self.q {
            return Err(GeometryError::InvalidParameter {
                name: "u",
                reason: format!("paddle width {} must be < outer height {}", self.u, self.q),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> CellParams {
        CellParams {
            q: self.q * k,
            v: self.v * k,
            p: self.p * k,
            u: self.u * k,
        }
    }
}

/// Interpolate cell parameters between the mirror and defect cells.
///
/// Gradient cell `i` of `n_gradient` carries the SmoothStep_1 fraction
/// evaluated at i/(n_gradient+1), so no gradient cell duplicates either
/// endpoint.
pub fn gradient_cell(
    mirror: &CellParams,
    defect: &CellParams,
    i: usize,
    n_gradient: usize,
) -> Result<CellParams> {
    if i < 1 || i > n_gradient {
        return Err(GeometryError::IndexOutOfRange {
            index: i,
            count: n_gradient,
        });
    }
    let s = smoothstep(1, i as f64 / (n_gradient as f64 + 1.0))?;
    let lerp = |m: f64, d: f64| m + (d - m) * s;
    Ok(CellParams {
        q: lerp(mirror.q, defect.q),
        v: lerp(mirror.v, defect.v),
        p: lerp(mirror.p, defect.p),
        u: lerp(mirror.u, defect.u),
    })
}

/// Full resonator parameterization: snowflake lattice, C-hole train, waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorParams {
    /// Lattice pitch (nm).
    pub a: f64,
    /// Snowflake radius (nm).
    pub r: f64,
    /// Snowflake arm width (nm).
    pub w: f64,
    pub mirror: CellParams,
    pub defect: CellParams,
    /// Gap (bridge) width holding each paddle (nm).
    pub d: f64,
    /// Waveguide span: separation of the innermost snowflake rows (nm).
    pub s: f64,
    /// Slab thickness (nm); carried as metadata, no effect on the 2-D layout.
    pub t: f64,
    /// Corner-rounding radius (nm).
    pub chamfer: f64,
    pub n_defect: usize,
    pub n_gradient: usize,
    pub n_mirror: usize,
    pub n_taper: usize,
    /// Snowflake rows flanking the waveguide on each side.
    pub snowflake_rows: usize,
}

impl ResonatorParams {
    /// Table values used for the finite element runs (simulation column).
    pub fn simulation() -> Self {
        ResonatorParams {
            a: 550.0,
            r: 245.0,
            w: 87.0,
            mirror: CellParams {
                q: 320.0,
                v: 480.0,
                p: 175.0,
                u: 210.0,
            },
            defect: CellParams {
                q: 310.0,
                v: 470.0,
                p: 220.0,
                u: 210.0,
            },
            d: 80.0,
            s: 1503.0,
            t: 250.0,
            chamfer: 20.0,
            n_defect: 1,
            n_gradient: 3,
            n_mirror: 6,
            n_taper: 0,
            snowflake_rows: 5,
        }
    }

    /// Table values used for the e-beam pattern (fabrication column).
    pub fn fabrication() -> Self {
        ResonatorParams {
            a: 572.0,
            r: 245.0,
            w: 62.0,
            mirror: CellParams {
                q: 299.0,
                v: 472.0,
                p: 182.0,
                u: 252.0,
            },
            defect: CellParams {
                q: 285.0,
                v: 453.0,
                p: 228.0,
                u: 249.0,
            },
            d: 115.0,
            s: 1563.0,
            t: 250.0,
            chamfer: 20.0,
            n_defect: 1,
            n_gradient: 3,
            n_mirror: 3,
            n_taper: 2,
            snowflake_rows: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mirror.validate()?;
        self.defect.validate()?;
        for (name, value) in [
            ("a", self.a),
            ("r", self.r),
            ("w", self.w),
            ("d", self.d),
            ("s", self.s),
            ("t", self.t),
        ] {
            if !(value > 0.0) {
                return Err(GeometryError::InvalidParameter {
                    name,
                    reason: format!("must be > 0, got {value}"),
                });
            }
        }
        if self.chamfer < 0.0 {
            return Err(GeometryError::InvalidParameter {
                name: "chamfer",
                reason: format!("must be >= 0, got {}", self.chamfer),
            });
        }
        if self.a <= 2.0 * self.r {
            return Err(GeometryError::InvalidParameter {
                name: "a",
                reason: format!(
                    "lattice pitch {} must exceed snowflake diameter {}",
                    self.a,
                    2.0 * self.r
                ),
            });
        }
        if self.d >= self.mirror.u || self.d >= self.defect.u {
            return Err(GeometryError::InvalidParameter {
                name: "d",
                reason: format!(
                    "bridge width {} must be narrower than the paddle ({}, {})",
                    self.d, self.mirror.u, self.defect.u
                ),
            });
        }
        for (name, cell) in [("mirror", self.mirror), ("defect", self.defect)] {
            if cell.v >= self.a {
                return Err(GeometryError::InvalidParameter {
                    name: "v",
                    reason: format!(
                        "{name} cell width {} must be below pitch {}",
                        cell.v, self.a
                    ),
                });
            }
        }
        Ok(())
    }

    /// Uniform scale of every length field; counts are untouched.
    pub fn scaled(&self, k: f64) -> ResonatorParams {
        ResonatorParams {
            a: self.a * k,
            r: self.r * k,
            w: self.w * k,
            mirror: self.mirror.scaled(k),
            defect: self.defect.scaled(k),
            d: self.d * k,
            s: self.s * k,
            t: self.t * k,
            chamfer: self.chamfer * k,
            ..*self
        }
    }

    pub fn cells_per_side(&self) -> usize {
        self.n_taper + self.n_mirror + self.n_gradient + self.n_defect
    }
}

/// Focusing grating coupler parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingParams {
    /// Grate pitch (nm).
    pub pitch: f64,
    /// Fill fraction of the pitch that is etched.
    pub fill: f64,
    /// Curve eccentricity parameter.
    pub b: f64,
    pub n_grates: usize,
    /// Waveguide width (nm).
    pub w: f64,
    /// Partial-etch depth (nm); metadata for the fabrication stack.
    pub h: f64,
    /// Slab thickness (nm); metadata.
    pub t: f64,
    /// Half-angle of the emitted fan about the +x axis (degrees).
    pub fan_half_angle_deg: f64,
}

impl GratingParams {
    /// Table values used in photolithography.
    pub fn fabrication() -> Self {
        GratingParams {
            pitch: 632.0,
            fill: 0.58,
            b: -0.05,
            n_grates: 40,
            w: 1000.0,
            h: 150.0,
            t: 250.0,
            fan_half_angle_deg: 75.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pitch > 0.0) {
            return Err(GeometryError::InvalidParameter {
                name: "pitch",
                reason: format!("must be > 0, got {}", self.pitch),
            });
        }
        if !(self.fill > 0.0 && self.fill < 1.0) {
            return Err(GeometryError::InvalidParameter {
                name: "fill",
                reason: format!("must be in (0, 1), got {}", self.fill),
            });
        }
        if !(self.b.abs() < 1.0) {
            return Err(GeometryError::InvalidParameter {
                name: "b",
                reason: format!("|b| must be < 1, got {}", self.b),
            });
        }
        if !(self.fan_half_angle_deg > 0.0 && self.fan_half_angle_deg < 90.0) {
            return Err(GeometryError::InvalidParameter {
                name: "fan_half_angle_deg",
                reason: format!("must be in (0, 90), got {}", self.fan_half_angle_deg),
            });
        }
        Ok(())
    }
}
