//! Command-line driver for point-cloud harmonic analysis.
//!
//! `info` reports sampling parameters, `basis` writes colour-mapped harmonic
//! basis functions, `spectrum` writes fractional spectra and `filter` filters
//! channels in a fractional spectral domain. Every command that takes `--out`
//! writes a `manifest.json` recording the resolved configuration and the
//! SHA-256 of the input; outputs are byte-identical across identical runs.

pub mod args;
pub mod colormap;
pub mod commands;
pub mod error;
pub mod pipeline;
pub mod svg;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::CliError;

/// Runs one parsed command, printing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    cli.command.pipeline().validate()?;
    match &cli.command {
        Command::Info(a) => commands::info(a, out),
        Command::Basis(a) => commands::basis(a, out),
        Command::Spectrum(a) => commands::spectrum(a, out),
        Command::Filter(a) => commands::filter(a, out),
    }
}
