//! Dither-lock feedback simulation: a slowly drifting Lorentzian
//! transmission plant, wavelength dither with lock-in harmonic
//! demodulation, and a PID servo tracking the resonance peak (first
//! harmonic) or inflection points (second harmonic).

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lockin;
pub mod pid;
pub mod plant;
pub mod run;

pub use error::{LockError, Result};
pub use lockin::{lockin_demod, LockIn};
pub use pid::{Pid, PidGains};
pub use plant::{DriftProcess, PlantState, C_LIGHT};
pub use run::{run_lock, LockConfig, LockMode, LockRun, LockSide, TrajectoryPoint};
