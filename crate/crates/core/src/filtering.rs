//! Spectral filtering in a fractional domain: transform to order `a`, weight
//! each mode, transform back.
//!
//! Modes are indexed by their position in the eigenvalue-ascending ordering
//! of the harmonic basis, which serves as the frequency axis for every order.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fractional::{pmfht_forward, FractionalOperator, Reconstruction};
use crate::harmonic_spectral::{pmht_forward, HarmonicBasis, SpectralSignal};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    /// Pass modes `0..=cutoff_hi`.
    Lowpass,
    /// Pass modes `cutoff_lo..N`.
    Highpass,
    /// Pass modes `cutoff_lo..=cutoff_hi`.
    Bandpass,
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" | "lowpass" => Ok(FilterKind::Lowpass),
            "high" | "highpass" => Ok(FilterKind::Highpass),
            "band" | "bandpass" => Ok(FilterKind::Bandpass),
            other => Err(Error::InvalidArgument(format!(
                "unknown filter kind `{other}`"
            ))),
        }
    }
}

/// Mode mask applied in the order-`order` spectral domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FilterSpec<T = f64> {
    pub kind: FilterKind,
    pub cutoff_lo: usize,
    pub cutoff_hi: usize,
    pub order: T,
    pub gain_passband: T,
    pub gain_stopband: T,
    /// Width in modes of a raised-cosine transition outside the passband; 0 is an ideal mask.
    pub rolloff: usize,
}

impl<T: Real> FilterSpec<T> {
    pub fn lowpass(cutoff_hi: usize, order: T) -> Self {
        Self::new(FilterKind::Lowpass, 0, cutoff_hi, order)
    }

    /// High-pass; `cutoff_hi` is ignored by the mask and set by [`validate`](Self::validate) callers.
    pub fn highpass(cutoff_lo: usize, n: usize, order: T) -> Self {
        Self::new(FilterKind::Highpass, cutoff_lo, n.saturating_sub(1), order)
    }

    pub fn bandpass(cutoff_lo: usize, cutoff_hi: usize, order: T) -> Self {
        Self::new(FilterKind::Bandpass, cutoff_lo, cutoff_hi, order)
    }

    pub fn new(kind: FilterKind, cutoff_lo: usize, cutoff_hi: usize, order: T) -> Self {
        Self {
            kind,
            cutoff_lo,
            cutoff_hi,
            order,
            gain_passband: T::one(),
            gain_stopband: T::zero(),
            rolloff: 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.cutoff_lo > self.cutoff_hi || self.cutoff_hi >= n {
            return Err(Error::InvalidArgument(format!(
                "cutoffs must satisfy 0 <= lo <= hi < {n}, got lo = {}, hi = {}",
                self.cutoff_lo, self.cutoff_hi
            )));
        }
        if !self.order.is_finite()
            || !self.gain_passband.is_finite()
            || !self.gain_stopband.is_finite()
        {
            return Err(Error::InvalidArgument(
                "filter order and gains must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Gain for each of the `n` modes.
    pub fn mask(&self, n: usize) -> Vec<T> {
        let pass = self.gain_passband;
        let stop = self.gain_stopband;
        let w = self.rolloff;
        // Raised cosine: distance 0 from the band edge -> pass, distance > w -> stop.
        let taper = |dist: usize| -> T {
            if dist == 0 {
                pass
            } else if dist > w {
                stop
            } else {
                let x = T::from_usize_lossy(dist) / T::from_usize_lossy(w + 1);
                let c = T::lit(0.5) * (T::one() + (T::PI() * x).cos());
                stop + (pass - stop) * c
            }
        };
        (0..n)
            .map(|k| {
                let below = match self.kind {
                    FilterKind::Lowpass => 0,
                    _ => self.cutoff_lo.saturating_sub(k),
                };
                let above = match self.kind {
                    FilterKind::Highpass => 0,
                    _ => k.saturating_sub(self.cutoff_hi),
                };
                taper(below.max(above))
            })
            .collect()
    }
}

/// Output of a filtering run.
#[derive(Debug, Clone)]
pub struct FilterOutput<T = f64> {
    /// Spectrum of the input in the filter's domain.
    pub before: SpectralSignal<T>,
    /// Spectrum after masking.
    pub after: SpectralSignal<T>,
    pub reconstruction: Reconstruction<T>,
}

/// Filters each channel of `f` in the fractional domain of `spec.order`.
pub fn apply_filter<T: Real>(
    opr: &FractionalOperator<T>,
    basis: &HarmonicBasis<T>,
    f: &[Vec<T>],
    spec: &FilterSpec<T>,
) -> Result<FilterOutput<T>> {
    if opr.id() != basis.id() {
        return Err(Error::BasisMismatch);
    }
    let n = basis.len();
    spec.validate(n)?;
    let mask = spec.mask(n);
    let before = pmfht_forward(opr, f, spec.order)?;
    let mut after = before.clone();
    for c in &mut after.coeffs {
        for (z, &g) in c.iter_mut().zip(&mask) {
            *z = *z * g;
        }
    }
    let powers = opr.eigenvalue_powers(-spec.order);
    let mut complex: Vec<Vec<Complex<T>>> = Vec::with_capacity(f.len());
    for c in &after.coeffs {
        complex.push(apply_with_powers(opr, &powers, c));
    }
    Ok(FilterOutput {
        before,
        after,
        reconstruction: Reconstruction::from_complex(complex),
    })
}

fn apply_with_powers<T: Real>(
    opr: &FractionalOperator<T>,
    powers: &[Complex<T>],
    x: &[Complex<T>],
) -> Vec<Complex<T>> {
    let x = ndarray::Array1::from(x.to_vec());
    let mut y = opr.eigenvectors_inverse().dot(&x);
    for (v, &w) in y.iter_mut().zip(powers) {
        *v = *v * w;
    }
    opr.eigenvectors().dot(&y).to_vec()
}

/// Dirichlet energy `sum_i lambda_i |<f, H_i>_B|^2`.
pub fn smoothness_energy<T: Real>(basis: &HarmonicBasis<T>, f: &[T]) -> Result<T> {
    let sig = pmht_forward(basis, &[f.to_vec()])?;
    Ok(sig.coeffs[0]
        .iter()
        .zip(&basis.lambdas)
        .map(|(z, &l)| l * z.norm_sqr())
        .sum())
}
