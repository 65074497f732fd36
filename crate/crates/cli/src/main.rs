//! `omc`: layout generation, proximity-effect dose correction, coupling
//! integrals, calibrated spectrum fitting, scan synthesis, and dither-lock
//! simulation behind one binary.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod provenance;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "omc",
    version,
    about = "Optomechanical-crystal toolkit: layouts, dose correction, coupling, spectra, lock simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Random seed for stochastic subcommands.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (modules here are deterministic and single-threaded;
    /// accepted for interface compatibility).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a device layout (JSON or SVG by output extension).
    Layout {
        /// Flat key-value parameter file.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
    /// Proximity-effect dose operations.
    #[command(subcommand)]
    Pec(PecCommand),
    /// Optomechanical coupling from a field-mesh export.
    Gom {
        /// Field mesh (.omcf).
        #[arg(long)]
        mesh: PathBuf,
        /// Material properties JSON.
        #[arg(long)]
        material: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
    /// Fit a directory of spectrum-analyzer traces and extract the coupling.
    Fit {
        /// Directory of trace CSV files.
        #[arg(long)]
        traces: PathBuf,
        /// Calibration tone frequency (Hz).
        #[arg(long)]
        tone_freq: f64,
        /// Phase-modulation depth (rad).
        #[arg(long)]
        tone_depth: f64,
        /// Sample temperature (K).
        #[arg(long)]
        temp: f64,
        /// Systematic temperature uncertainty (K).
        #[arg(long, default_value_t = 0.0)]
        delta_temp: f64,
        /// Systematic depth uncertainty (rad).
        #[arg(long, default_value_t = 0.0)]
        delta_depth: f64,
        /// Background polynomial order.
        #[arg(long, default_value_t = 2)]
        background_order: usize,
        /// Result format: json embeds the per-scan table, csv writes it
        /// next to the result as <out>.scans.csv.
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
    /// Synthesize spectrum scans from a truth config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        scans: u64,
        /// Output directory for trace CSVs.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
    /// Run the dither-lock feedback simulation.
    LockSim {
        #[arg(long)]
        config: PathBuf,
        /// Simulated duration (s).
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        /// Trajectory CSV output.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
}

#[derive(Subcommand)]
enum PecCommand {
    /// Rasterize a layout into a target dose map (coverage in [0, 1]).
    Raster {
        #[arg(long)]
        layout: PathBuf,
        /// Pixel size (nm).
        #[arg(long)]
        pixel: f64,
        /// Empty margin around the layout (nm).
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        /// Quantize coverage to a binary clearing-dose target.
        #[arg(long, default_value_t = false)]
        binary: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
    /// Rasterize a layout and convolve with the PSF.
    Forward {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        psf: PathBuf,
        /// Pixel size (nm).
        #[arg(long)]
        pixel: f64,
        /// Empty margin around the layout (nm).
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        /// Accept dose leaking off the map edges.
        #[arg(long, default_value_t = false)]
        allow_truncation: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
    /// Solve the inverse dose-correction problem.
    Correct {
        /// Target dose map (binary).
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        psf: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 400)]
        iters: usize,
        #[arg(long, default_value_t = false)]
        allow_truncation: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        global: GlobalOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Layout { params, out, .. } => commands::layout::run(&params, &out),
        Command::Pec(PecCommand::Raster {
            layout,
            pixel,
            margin,
            binary,
            out,
            ..
        }) => commands::pec::raster(&layout, pixel, margin, binary, &out),
        Command::Pec(PecCommand::Forward {
            layout,
            psf,
            pixel,
            margin,
            allow_truncation,
            out,
            ..
        }) => commands::pec::forward(&layout, &psf, pixel, margin, allow_truncation, &out),
        Command::Pec(PecCommand::Correct {
            target,
            psf,
            tol,
            iters,
            allow_truncation,
            out,
            ..
        }) => commands::pec::correct(&target, &psf, tol, iters, allow_truncation, &out),
        Command::Gom {
            mesh,
            material,
            out,
            ..
        } => commands::gom::run(&mesh, &material, &out),
        Command::Fit {
            traces,
            tone_freq,
            tone_depth,
            temp,
            delta_temp,
            delta_depth,
            background_order,
            format,
            out,
            ..
        } => commands::fit::run(
            &traces,
            tone_freq,
            tone_depth,
            temp,
            delta_temp,
            delta_depth,
            background_order,
            format == "csv",
            &out,
        ),
        Command::Simulate {
            config,
            scans,
            out,
            global,
        } => commands::simulate::run(&config, scans, global.seed, &out),
        Command::LockSim {
            config,
            duration,
            out,
            global,
        } => commands::lock_sim::run(&config, duration, global.seed, &out),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.is::<commands::ConfigError>() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            };
            ExitCode::from(code)
        }
    }
}
