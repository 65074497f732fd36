//! Parametric layout generation for quasi-2D optomechanical crystal devices:
//! vertebrae resonator, snowflake lattice, and focusing grating couplers.
//!
//! All lengths are in nanometres; layouts are closed polygon loops with layer
//! tags, serializable to JSON and SVG.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chole;
pub mod error;
pub mod fillet;
pub mod grating;
pub mod params;
pub mod polygon;
pub mod smoothstep;
pub mod snowflake;
pub mod svg;
pub mod symmetry;
pub mod vertebrae;

pub use chole::c_hole_polygon;
pub use error::{GeometryError, Result};
pub use grating::{curve_residual, grating_curves, grating_polygons, GrateCurve};
pub use params::{gradient_cell, CellParams, GratingParams, ResonatorParams};
pub use polygon::{BoundingBox, Layout, Point, Polygon};
pub use smoothstep::smoothstep;
pub use snowflake::snowflake_polygon;
pub use svg::layout_to_svg;
pub use symmetry::{symmetry_check, MirrorPlane, SymmetryReport};
pub use vertebrae::{cell_sequence, vertebrae_layout, CellRole};
