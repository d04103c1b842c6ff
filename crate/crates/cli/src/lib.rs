//! Command-line front end for parameter scans and plot data.

mod config;
mod csv;
mod error;
mod scans;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Axis, BerryMethod, Mode, RawConfig, ScanConfig};
pub use csv::{config_hash, fmt_g};
pub use error::{CliError, Result};
pub use scans::{run, run_berry_scan, run_echo, run_spectrum_scan, run_triple_table, run_witness_scan};

#[derive(Debug, Parser)]
#[command(
    name = "nlberry",
    version,
    about = "Stationary states, Berry phases and echoes of a nonlinear two-mode system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energies of all stationary states over an (R, v) grid.
    Spectrum(Flags),
    /// Berry phase of the lowest state over an (R, v) grid, in units of pi.
    Berry(Flags),
    /// Overlap of the two lowest stationary states.
    Witness(Flags),
    /// Dynamical Loschmidt echo under a slow loop drive.
    Echo(Flags),
    /// Sign changes around the threefold degeneracy.
    Triple(Flags),
}

impl Command {
    fn parts(&self) -> (Mode, &Flags) {
        match self {
            Command::Spectrum(f) => (Mode::Spectrum, f),
            Command::Berry(f) => (Mode::Berry, f),
            Command::Witness(f) => (Mode::Witness, f),
            Command::Echo(f) => (Mode::Echo, f),
            Command::Triple(f) => (Mode::Triple, f),
        }
    }
}

/// Flags shared by every subcommand. Axes take `start:stop:count` or a single value.
#[derive(Debug, Args)]
pub struct Flags {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "R", allow_hyphen_values = true)]
    pub bias: Option<String>,
    #[arg(long = "v", allow_hyphen_values = true)]
    pub coupling: Option<String>,
    #[arg(long = "c", allow_hyphen_values = true)]
    pub nonlinearity: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long)]
    pub loop_points: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long = "T")]
    pub duration: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    /// Polar angle of the echo drive.
    #[arg(long)]
    pub theta: Option<String>,
    /// Overlap of the degenerate pair used in the echo summary.
    #[arg(long = "s")]
    pub overlap: Option<String>,
    /// Magnitude of the echo drive.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<String>,
    /// Transport steps per loop for the sign table.
    #[arg(long)]
    pub samples: Option<String>,
    /// Emit every n-th echo sample.
    #[arg(long)]
    pub stride: Option<String>,
    /// `closed` or `discrete` Berry phase.
    #[arg(long)]
    pub method: Option<String>,
}

impl Flags {
    fn raw(&self) -> Result<RawConfig> {
        let mut raw = RawConfig::default();
        let pairs = [
            ("R", &self.bias),
            ("v", &self.coupling),
            ("c", &self.nonlinearity),
            ("phi", &self.phi),
            ("loop-points", &self.loop_points),
            ("dt", &self.dt),
            ("T", &self.duration),
            ("tol", &self.tol),
            ("theta", &self.theta),
            ("s", &self.overlap),
            ("amplitude", &self.amplitude),
            ("samples", &self.samples),
            ("stride", &self.stride),
            ("method", &self.method),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            raw.set("out", &out.to_string_lossy())?;
        }
        Ok(raw)
    }
}

/// Resolve the config for a parsed command line.
pub fn resolve(cli: &Cli) -> Result<ScanConfig> {
    let (mode, flags) = cli.command.parts();
    let mut raw = match &flags.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    raw.merge(&flags.raw()?);
    ScanConfig::resolve(mode, &raw)
}

/// Run a resolved config and write its CSV to the configured destination.
pub fn execute(cfg: &ScanConfig) -> Result<()> {
    let text = run(cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
