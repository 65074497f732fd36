//! Optomechanical coupling g_om = |g_MB + g_PE| from discretized
//! displacement and electric fields: moving-boundary surface integral and
//! photoelastic volume integral over first-order tetrahedral field exports.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod integrals;
pub mod material;
pub mod mesh;
pub mod quadrature;

pub use error::{CouplingError, Result};
pub use integrals::{
    em_norm, g_mb, g_om_total, g_pe, mech_norm, photoelastic_contraction, CouplingResult,
};
pub use material::{MaterialProps, EPS0, HBAR};
pub use mesh::{load_field_mesh, Cell, Facet, FieldMesh, Strain6, Vec3c};
