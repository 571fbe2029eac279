//! Plain-text spectrum export: one CSV per channel and a JSON mirror.
//!
//! Numbers are printed with Rust's shortest round-trip formatting so equal
//! inputs always produce byte-identical files.

use std::io::{self, Write};

use num_complex::Complex;
use serde::Serialize;

use crate::harmonic_spectral::SpectralSignal;
use crate::scalar::Real;

/// Parameters recorded alongside an exported spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumMeta {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub r: f64,
    pub delta: f64,
    pub order: f64,
}

/// Writes `mode_index,lambda,coeff_real,coeff_imag` rows for one channel.
pub fn write_spectrum_csv<T: Real, W: Write>(
    mut w: W,
    lambdas: &[T],
    coeffs: &[Complex<T>],
) -> io::Result<()> {
    if lambdas.len() != coeffs.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!(
                "{} eigenvalues for {} coefficients",
                lambdas.len(),
                coeffs.len()
            ),
        ));
    }
    writeln!(w, "mode_index,lambda,coeff_real,coeff_imag")?;
    for (k, (l, z)) in lambdas.iter().zip(coeffs).enumerate() {
        writeln!(
            w,
            "{k},{},{},{}",
            l.to_f64_lossy(),
            z.re.to_f64_lossy(),
            z.im.to_f64_lossy()
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ChannelJson<'a> {
    name: &'a str,
    re: Vec<f64>,
    im: Vec<f64>,
    abs: Vec<f64>,
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    #[serde(flatten)]
    meta: SpectrumMeta,
    basis_id: String,
    lambda: Vec<f64>,
    channels: Vec<ChannelJson<'a>>,
}

/// JSON document with metadata, eigenvalues and every channel's coefficients.
///
/// Channels beyond `names.len()` are named `c<k>`.
pub fn spectrum_json<T: Real>(
    meta: SpectrumMeta,
    lambdas: &[T],
    sig: &SpectralSignal<T>,
    names: &[&str],
) -> serde_json::Value {
    let fallback: Vec<String> = (0..sig.coeffs.len()).map(|k| format!("c{k}")).collect();
    let channels = sig
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| ChannelJson {
            name: names.get(k).copied().unwrap_or(&fallback[k]),
            re: c.iter().map(|z| z.re.to_f64_lossy()).collect(),
            im: c.iter().map(|z| z.im.to_f64_lossy()).collect(),
            abs: c.iter().map(|z| z.norm().to_f64_lossy()).collect(),
        })
        .collect();
    let doc = SpectrumJson {
        meta,
        basis_id: format!("{:016x}", sig.basis_id.0),
        lambda: lambdas.iter().map(|l| l.to_f64_lossy()).collect(),
        channels,
    };
    serde_json::to_value(doc).expect("spectrum document is always serializable")
}
