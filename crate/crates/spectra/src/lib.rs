//! Calibrated optomechanical thermal spectroscopy: cavity transmission,
//! thermal PSD and spectrum-analyzer forward models, synthetic scans, and
//! the inverse pipeline extracting the optomechanical coupling with
//! statistical and systematic uncertainties.
//!
//! All internal frequencies are angular (rad/s); trace files carry Hz.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod error;
pub mod extract;
pub mod fit;
pub mod lm;
pub mod model;
pub mod pipeline;
pub mod simulate;
pub mod trace;
pub mod types;

pub use background::remove_background;
pub use error::{Result, SpectraError};
pub use extract::{extract_gom, ExtractionResult, ScanFit, Systematics};
pub use fit::{fit_lorentzian, fit_tone, MechanicalFit, ToneFit};
pub use model::{sa_power, BackgroundPoly, PsdModel, Window};
pub use pipeline::{process_scan, PipelineConfig};
pub use simulate::{simulate_scan, DitherImprint, NoiseModel, ScanConfig};
pub use trace::{DetuningTag, SpectrumTrace};
pub use types::{
    s21_sq, thermal_occupation, CalibrationTone, MechanicalMode, OpticalResonance, HBAR, K_B,
};
