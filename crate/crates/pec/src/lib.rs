//! Electron-beam proximity-effect correction: Gaussian-Pearson VII point
//! spread functions, antialiased layout rasterization, forward dose
//! convolution, and the inverse dose-correction solve.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convolve;
pub mod correct;
pub mod dosemap;
pub mod error;
pub mod expint;
pub mod fft2;
pub mod psf;
pub mod raster;

pub use convolve::{convolve_dose, ConvolveDiagnostics, ConvolveOptions, DoseConvolver};
pub use correct::{correct_dose, CorrectionOptions, CorrectionResult};
pub use dosemap::DoseMap;
pub use error::{PecError, Result};
pub use expint::expint;
pub use psf::{gp_eval, psf_eval, GpTerm, PsfModel};
pub use raster::rasterize;

/// The shipped GaAs 250 nm PSF file, verbatim.
pub const GAAS_250NM_PSF_JSON: &str = include_str!("../data/gaas-250nm.json");
