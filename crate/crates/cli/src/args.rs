use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracharm_core::{
    FilterKind, PlyFormat, DEFAULT_CONDITION_LIMIT, DEFAULT_DENSE_LIMIT, DEFAULT_EXPONENT_MARGIN,
};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "fracharm",
    version,
    about = "Manifold harmonic and fractional harmonic analysis of point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print point count, bounding box, sampling scale and operator parameters.
    Info(PipelineArgs),
    /// Write colour-mapped PLYs of harmonic basis functions.
    Basis(BasisArgs),
    /// Write fractional spectra of the chosen channels for each order.
    Spectrum(SpectrumArgs),
    /// Filter the chosen channels in a fractional spectral domain.
    Filter(FilterArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info(_) => "info",
            Command::Basis(_) => "basis",
            Command::Spectrum(_) => "spectrum",
            Command::Filter(_) => "filter",
        }
    }

    pub fn pipeline(&self) -> &PipelineArgs {
        match self {
            Command::Info(p) => p,
            Command::Basis(b) => &b.pipeline,
            Command::Spectrum(s) => &s.pipeline,
            Command::Filter(f) => &f.pipeline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Ascii,
    Binary,
}

impl From<Format> for PlyFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Ascii => PlyFormat::Ascii,
            Format::Binary => PlyFormat::BinaryLittleEndian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Colormap {
    /// Blue, white, red.
    Bwr,
    Gray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Magnitude,
    Real,
    Imag,
}

/// Options shared by every command.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    /// Input PLY file.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory; created if missing. Optional for `info`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Downsample to this many points by farthest-point sampling.
    #[arg(long)]
    pub target_points: Option<usize>,
    /// Sampling scale; estimated as the mean nearest-neighbour distance if absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Tangent-plane radius as a multiple of epsilon.
    #[arg(long, default_value_t = 10.0)]
    pub r_scale: f64,
    /// Kernel cutoff as a multiple of epsilon.
    #[arg(long, default_value_t = 10.0)]
    pub delta_scale: f64,
    /// Voronoi clip radius as a multiple of the kernel cutoff.
    #[arg(long, default_value_t = 0.5)]
    pub clip_scale: f64,
    /// Heat parameter; overrides --t-exponent.
    #[arg(long, conflicts_with = "t_exponent")]
    pub t: Option<f64>,
    /// Exponent margin M in t = epsilon^(1/2 + M).
    #[arg(long, default_value_t = DEFAULT_EXPONENT_MARGIN)]
    pub t_exponent: f64,
    /// Signals to transform: `x`, `y`, `z` or names of scalar vertex properties.
    #[arg(long, value_delimiter = ',', default_value = "x,y,z")]
    pub channels: Vec<String>,
    /// Largest point count handed to the dense eigensolver.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    /// Largest accepted eigenvector condition number of the Fourier matrix.
    #[arg(long, default_value_t = DEFAULT_CONDITION_LIMIT)]
    pub cond_limit: f64,
    /// Encoding of written PLY files.
    #[arg(long, value_enum, default_value_t = Format::Binary)]
    pub format: Format,
    /// Seed for downsampling tie-breaks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write Q and B in Matrix Market format.
    #[arg(long)]
    pub dump_matrices: bool,
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

impl PipelineArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.input.as_os_str().is_empty() {
            return Err(config("--input must not be empty"));
        }
        if self.out.as_ref().is_some_and(|o| o.as_os_str().is_empty()) {
            return Err(config("--out must not be empty"));
        }
        if let Some(n) = self.target_points {
            if n < 4 {
                return Err(config(format!(
                    "--target-points must be at least 4, got {n}"
                )));
            }
        }
        if let Some(e) = self.epsilon {
            positive("epsilon", e)?;
        }
        positive("r-scale", self.r_scale)?;
        positive("delta-scale", self.delta_scale)?;
        positive("clip-scale", self.clip_scale)?;
        if let Some(t) = self.t {
            positive("t", t)?;
        }
        positive("t-exponent", self.t_exponent)?;
        positive("cond-limit", self.cond_limit)?;
        if self.channels.is_empty() || self.channels.iter().any(|c| c.is_empty()) {
            return Err(config("--channels must list nonempty names"));
        }
        for (i, c) in self.channels.iter().enumerate() {
            if self.channels[..i].contains(c) {
                return Err(config(format!("channel `{c}` listed twice")));
            }
        }
        Ok(())
    }

    /// Output directory, required by every command but `info`.
    pub fn out_dir(&self) -> Result<&PathBuf, CliError> {
        self.out
            .as_ref()
            .ok_or_else(|| config("--out is required for this command"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BasisArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
    /// Write modes 1..=K.
    #[arg(long, default_value_t = 6)]
    pub modes: usize,
    /// Explicit mode indices; overrides --modes.
    #[arg(long, value_delimiter = ',', conflicts_with = "modes")]
    pub mode_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Colormap::Bwr)]
    pub colormap: Colormap,
}

impl BasisArgs {
    pub fn selected_modes(&self) -> Vec<usize> {
        if self.mode_list.is_empty() {
            (1..=self.modes).collect()
        } else {
            self.mode_list.clone()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrderArgs {
    /// Fractional order.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "orders")]
    pub order: Option<f64>,
    /// Comma-separated fractional orders.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub orders: Vec<f64>,
}

impl OrderArgs {
    /// Requested orders; 1 when none are given.
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let orders = match (self.order, self.orders.is_empty()) {
            (Some(a), _) => vec![a],
            (None, false) => self.orders.clone(),
            (None, true) => vec![1.0],
        };
        if let Some(a) = orders.iter().find(|a| !a.is_finite()) {
            return Err(config(format!("orders must be finite, got {a}")));
        }
        for (i, a) in orders.iter().enumerate() {
            if orders[..i].contains(a) {
                return Err(config(format!("order {a} listed twice")));
            }
        }
        Ok(orders)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub orders: OrderArgs,
    /// Quantity drawn in the stem plots.
    #[arg(long, value_enum, default_value_t = PlotKind::Magnitude)]
    pub plot: PlotKind,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FilterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub orders: OrderArgs,
    /// low, high or band.
    #[arg(long)]
    pub filter: FilterKind,
    /// First passed mode (high and band).
    #[arg(long)]
    pub cutoff_lo: Option<usize>,
    /// Last passed mode (low and band).
    #[arg(long)]
    pub cutoff_hi: Option<usize>,
    /// Raised-cosine transition width in modes.
    #[arg(long, default_value_t = 0)]
    pub rolloff: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gain_pass: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gain_stop: f64,
}

impl FilterArgs {
    /// Cutoffs `(lo, hi)` for a basis of `n` modes.
    pub fn cutoffs(&self, n: usize) -> Result<(usize, usize), CliError> {
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| config(format!("--filter {} requires --{flag}", self.filter_name())))
        };
        let (lo, hi) = match self.filter {
            FilterKind::Lowpass => (0, need(self.cutoff_hi, "cutoff-hi")?),
            FilterKind::Highpass => (need(self.cutoff_lo, "cutoff-lo")?, n.saturating_sub(1)),
            FilterKind::Bandpass => (
                need(self.cutoff_lo, "cutoff-lo")?,
                need(self.cutoff_hi, "cutoff-hi")?,
            ),
        };
        if lo > hi || hi >= n {
            return Err(config(format!(
                "cutoffs must satisfy 0 <= lo <= hi < N = {n}, got lo = {lo}, hi = {hi}"
            )));
        }
        Ok((lo, hi))
    }

    fn filter_name(&self) -> &'static str {
        match self.filter {
            FilterKind::Lowpass => "low",
            FilterKind::Highpass => "high",
            FilterKind::Bandpass => "band",
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.gain_pass.is_finite() || !self.gain_stop.is_finite() {
            return Err(config("filter gains must be finite"));
        }
        Ok(())
    }
}
