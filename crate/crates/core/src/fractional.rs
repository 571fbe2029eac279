//! Fractional powers of the manifold Fourier matrix and the fractional
//! harmonic transform of arbitrary real order.
//!
//! With `F_M = P J P^-1`, the order-`a` matrix is `P J^a P^-1` where every
//! scalar power uses the principal branch, `lambda^a = exp(a Log lambda)` with
//! `Arg lambda` in `(-pi, pi]`. The logarithms are computed once at
//! decomposition time and reused for every order, so `J^a J^b = J^(a+b)`
//! holds entrywise up to rounding.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::harmonic_spectral::{manifold_fourier_matrix, BasisId, HarmonicBasis, SpectralSignal};
use crate::linalg::{complex_inverse, general_eigen, one_norm};
use crate::scalar::Real;

/// Default bound on the 1-norm condition number of the eigenvector matrix.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e10;
/// Relative bound on `max |P J P^-1 - F_M|`.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;
/// Relative imaginary residue above which a real reconstruction is flagged.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-6;
/// Eigenvalues with `|Arg| > pi - BRANCH_CUT_MARGIN` are reported for non-integer orders.
pub const BRANCH_CUT_MARGIN: f64 = 1e-9;

/// Eigen-decomposition of a manifold Fourier matrix, ready for fractional powers.
#[derive(Debug, Clone)]
pub struct FractionalOperator<T = f64> {
    p: Array2<Complex<T>>,
    p_inv: Array2<Complex<T>>,
    eigenvalues: Vec<Complex<T>>,
    /// Principal logarithms of `eigenvalues`, computed once.
    logs: Vec<Complex<T>>,
    cond_p: T,
    reconstruction_error: T,
    id: BasisId,
}

impl<T: Real> FractionalOperator<T> {
    /// Decomposes the Fourier matrix of `basis`.
    pub fn from_basis(basis: &HarmonicBasis<T>) -> Result<Self> {
        decompose_fourier_matrix(&manifold_fourier_matrix(basis))
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<Complex<T>> {
        &self.p
    }

    pub fn eigenvectors_inverse(&self) -> &Array2<Complex<T>> {
        &self.p_inv
    }

    /// 1-norm condition number of the eigenvector matrix.
    pub fn cond_p(&self) -> T {
        self.cond_p
    }

    /// Relative `max |P J P^-1 - F_M|` measured at decomposition time.
    pub fn reconstruction_error(&self) -> T {
        self.reconstruction_error
    }

    /// Diagonal of `J^a`.
    pub fn eigenvalue_powers(&self, a: T) -> Vec<Complex<T>> {
        self.logs.iter().map(|&l| (l * a).exp()).collect()
    }

    /// Indices of eigenvalues on (or within `BRANCH_CUT_MARGIN` of) the negative
    /// real axis. Non-empty only for non-integer `a`.
    pub fn branch_cut_modes(&self, a: T) -> Vec<usize> {
        if a.fract() == T::zero() {
            return Vec::new();
        }
        let limit = T::PI() - T::lit(BRANCH_CUT_MARGIN);
        self.logs
            .iter()
            .enumerate()
            .filter(|(_, l)| l.im.abs() > limit)
            .map(|(k, _)| k)
            .collect()
    }

    fn warn_branch_cut(&self, a: T) {
        let modes = self.branch_cut_modes(a);
        if !modes.is_empty() {
            log::warn!(
                "order {a}: {} eigenvalue(s) lie on the principal-branch cut; principal values used",
                modes.len()
            );
        }
    }

    /// `F^(a) x` for a complex vector, without forming `F^(a)`.
    pub fn apply(&self, a: T, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: x.len(),
            });
        }
        self.warn_branch_cut(a);
        Ok(self.apply_unchecked(&self.eigenvalue_powers(a), x))
    }

    fn apply_unchecked(&self, powers: &[Complex<T>], x: &[Complex<T>]) -> Vec<Complex<T>> {
        let x = Array1::from(x.to_vec());
        let mut y = self.p_inv.dot(&x);
        for (v, &w) in y.iter_mut().zip(powers) {
            *v = *v * w;
        }
        self.p.dot(&y).to_vec()
    }
}

/// Principal logarithm with `Arg` in `(-pi, pi]`.
fn principal_ln<T: Real>(z: Complex<T>) -> Complex<T> {
    let mut arg = z.im.atan2(z.re);
    if arg == -T::PI() {
        arg = T::PI();
    }
    Complex::new(z.norm().ln(), arg)
}

/// Eigen-decomposes `F_M` with the default conditioning limit.
pub fn decompose_fourier_matrix<T: Real>(f_m: &Array2<T>) -> Result<FractionalOperator<T>> {
    decompose_fourier_matrix_with_limit(f_m, T::lit(DEFAULT_CONDITION_LIMIT))
}

pub fn decompose_fourier_matrix_with_limit<T: Real>(
    f_m: &Array2<T>,
    condition_limit: T,
) -> Result<FractionalOperator<T>> {
    let n = f_m.nrows();
    if n == 0 || f_m.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "Fourier matrix must be square and non-empty, got {}x{}",
            n,
            f_m.ncols()
        )));
    }
    let eig = general_eigen(f_m)?;
    if let Some(k) = eig.values.iter().position(|z| z.norm() == T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "Fourier matrix is singular (eigenvalue {k} is zero)"
        )));
    }
    let p = eig.vectors;
    let p_inv = match complex_inverse(&p) {
        Ok(inv) => inv,
        Err(_) => {
            return Err(Error::IllConditioned {
                cond: f64::INFINITY,
                threshold: condition_limit.to_f64_lossy(),
            })
        }
    };
    let cond_p = one_norm(&p) * one_norm(&p_inv);
    if !cond_p.is_finite() || cond_p > condition_limit {
        return Err(Error::IllConditioned {
            cond: cond_p.to_f64_lossy(),
            threshold: condition_limit.to_f64_lossy(),
        });
    }

    let mut pj = p.clone();
    for (mut col, &lam) in pj.columns_mut().into_iter().zip(&eig.values) {
        col.mapv_inplace(|z| z * lam);
    }
    let rebuilt = pj.dot(&p_inv);
    let scale = f_m.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let mut worst = T::zero();
    for (z, &x) in rebuilt.iter().zip(f_m.iter()) {
        worst = worst.max((z - Complex::new(x, T::zero())).norm());
    }
    let reconstruction_error = worst / scale;
    if !(reconstruction_error <= T::lit(RECONSTRUCTION_TOL)) {
        return Err(Error::ReconstructionFailure {
            error: reconstruction_error.to_f64_lossy(),
            limit: RECONSTRUCTION_TOL,
        });
    }

    let logs = eig.values.iter().map(|&z| principal_ln(z)).collect();
    Ok(FractionalOperator {
        p,
        p_inv,
        eigenvalues: eig.values,
        logs,
        cond_p,
        reconstruction_error,
        id: BasisId::of_matrix(f_m),
    })
}

/// Dense `F^(a) = P J^a P^-1`.
pub fn fractional_matrix<T: Real>(opr: &FractionalOperator<T>, a: T) -> Array2<Complex<T>> {
    opr.warn_branch_cut(a);
    let powers = opr.eigenvalue_powers(a);
    let mut pj = opr.p.clone();
    for (mut col, &w) in pj.columns_mut().into_iter().zip(&powers) {
        col.mapv_inplace(|z| z * w);
    }
    pj.dot(&opr.p_inv)
}

/// Fractional harmonic transform of order `a`, per channel.
pub fn pmfht_forward<T: Real>(
    opr: &FractionalOperator<T>,
    f: &[Vec<T>],
    a: T,
) -> Result<SpectralSignal<T>> {
    opr.warn_branch_cut(a);
    let powers = opr.eigenvalue_powers(a);
    let mut coeffs = Vec::with_capacity(f.len());
    for c in f {
        if c.len() != opr.len() {
            return Err(Error::LengthMismatch {
                expected: opr.len(),
                found: c.len(),
            });
        }
        let x: Vec<Complex<T>> = c.iter().map(|&v| Complex::new(v, T::zero())).collect();
        coeffs.push(opr.apply_unchecked(&powers, &x));
    }
    Ok(SpectralSignal {
        coeffs,
        order: a,
        basis_id: opr.id,
    })
}

/// Result of mapping a spectral signal back to the spatial domain.
#[derive(Debug, Clone)]
pub struct Reconstruction<T = f64> {
    /// Real parts, one vector per channel.
    pub values: Vec<Vec<T>>,
    /// Full complex result.
    pub complex: Vec<Vec<Complex<T>>>,
    /// Largest per-channel ratio `|Im| / |Re|` (Euclidean norms).
    pub imag_residue: T,
    /// Set when `imag_residue` exceeds [`IMAGINARY_RESIDUE_TOL`].
    pub warning: Option<String>,
}

impl<T: Real> Reconstruction<T> {
    pub(crate) fn from_complex(complex: Vec<Vec<Complex<T>>>) -> Self {
        let mut imag_residue = T::zero();
        for c in &complex {
            let re = c.iter().map(|z| z.re * z.re).sum::<T>().sqrt();
            let im = c.iter().map(|z| z.im * z.im).sum::<T>().sqrt();
            let r = if re > T::zero() {
                im / re
            } else if im > T::zero() {
                T::infinity()
            } else {
                T::zero()
            };
            imag_residue = imag_residue.max(r);
        }
        let warning = (imag_residue > T::lit(IMAGINARY_RESIDUE_TOL)).then(|| {
            let msg = format!(
                "imaginary residue {:e} exceeds {IMAGINARY_RESIDUE_TOL:e}; \
                 the spectrum lost conjugate symmetry (branch cut or asymmetric filtering)",
                imag_residue.to_f64_lossy()
            );
            log::warn!("{msg}");
            msg
        });
        let values = complex
            .iter()
            .map(|c| c.iter().map(|z| z.re).collect())
            .collect();
        Self {
            values,
            complex,
            imag_residue,
            warning,
        }
    }
}

/// Inverse transform: applies `F^(-a)` to a signal of order `a`.
pub fn pmfht_inverse<T: Real>(
    opr: &FractionalOperator<T>,
    sig: &SpectralSignal<T>,
) -> Result<Reconstruction<T>> {
    if sig.basis_id != opr.id {
        return Err(Error::BasisMismatch);
    }
    let a = -sig.order;
    opr.warn_branch_cut(a);
    let powers = opr.eigenvalue_powers(a);
    let mut out = Vec::with_capacity(sig.coeffs.len());
    for c in &sig.coeffs {
        if c.len() != opr.len() {
            return Err(Error::LengthMismatch {
                expected: opr.len(),
                found: c.len(),
            });
        }
        out.push(opr.apply_unchecked(&powers, c));
    }
    Ok(Reconstruction::from_complex(out))
}
