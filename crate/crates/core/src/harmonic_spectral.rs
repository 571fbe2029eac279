//! Manifold harmonic basis from the generalized eigenproblem `Q H = lambda B H`
//! and the forward/inverse harmonic transform.
//!
//! The problem is solved through the symmetric matrix `S = B^-1/2 Q B^-1/2`.
//! Its eigenvectors `V` are orthonormal, so `H = B^-1/2 V` satisfies
//! `H^T B H = I`. Eigenvalues of `S` are non-positive; the basis stores their
//! negatives, ascending, so mode 0 is the constant function.

use std::hash::{Hash, Hasher};

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lbo_assembly::LboPair;
use crate::linalg::symmetric_eigen;
use crate::scalar::Real;

/// Default upper bound on the point count for dense eigensolves.
pub const DEFAULT_DENSE_LIMIT: usize = 4000;

/// Relative tolerance on positive generalized eigenvalues of `(Q, B)`.
/// Raised to `1000 * machine epsilon` for scalars coarser than `f64`.
pub const SEMIDEFINITE_TOL: f64 = 1e-8;

/// Identifies the Fourier matrix a spectral signal was computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct BasisId(pub u64);

impl BasisId {
    /// Fingerprint of a dense real matrix (shape and exact entries).
    pub fn of_matrix<T: Real>(m: &Array2<T>) -> Self {
        let mut h = std::hash::DefaultHasher::new();
        m.dim().hash(&mut h);
        for x in m.iter() {
            x.to_f64_lossy().to_bits().hash(&mut h);
        }
        BasisId(h.finish())
    }
}

/// Coefficients of one or more channels in a spectral domain of a given order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSignal<T = f64> {
    /// One coefficient vector per input channel.
    pub coeffs: Vec<Vec<Complex<T>>>,
    /// Fractional order of the domain; 1 is the ordinary harmonic spectrum.
    pub order: T,
    pub basis_id: BasisId,
}

impl<T: Real> SpectralSignal<T> {
    pub fn channels(&self) -> usize {
        self.coeffs.len()
    }
}

/// B-orthonormal eigenbasis of the discrete operator.
#[derive(Debug, Clone)]
pub struct HarmonicBasis<T = f64> {
    /// Non-negative eigenvalues, ascending.
    pub lambdas: Vec<T>,
    /// Eigenvectors as columns.
    pub h: Array2<T>,
    /// Diagonal of the mass matrix the basis is orthonormal against.
    pub mass: Vec<T>,
    id: BasisId,
}

impl<T: Real> HarmonicBasis<T> {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    /// Column `k` of `H`.
    pub fn mode(&self, k: usize) -> Vec<T> {
        self.h.column(k).to_vec()
    }

    /// B-weighted inner product `f^T B g`.
    pub fn inner(&self, f: &[T], g: &[T]) -> T {
        f.iter()
            .zip(g)
            .zip(&self.mass)
            .map(|((&a, &b), &m)| a * b * m)
            .sum()
    }

    /// `max |H^T B H - I|`.
    pub fn orthonormality_error(&self) -> T {
        let bh = self.scaled_rows();
        let gram = self.h.t().dot(&bh);
        let mut worst = T::zero();
        for ((i, j), &g) in gram.indexed_iter() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((g - target).abs());
        }
        worst
    }

    /// `B H`.
    fn scaled_rows(&self) -> Array2<T> {
        let mut bh = self.h.clone();
        for (mut row, &m) in bh.rows_mut().into_iter().zip(&self.mass) {
            row.mapv_inplace(|x| x * m);
        }
        bh
    }
}

/// Solves `Q H = lambda B H` densely with the default size limit.
pub fn solve_harmonic_basis<T: Real>(pair: &LboPair<T>) -> Result<HarmonicBasis<T>> {
    solve_harmonic_basis_with_limit(pair, DEFAULT_DENSE_LIMIT)
}

pub fn solve_harmonic_basis_with_limit<T: Real>(
    pair: &LboPair<T>,
    dense_limit: usize,
) -> Result<HarmonicBasis<T>> {
    let n = pair.len();
    if n > dense_limit {
        return Err(Error::TooLarge {
            n,
            limit: dense_limit,
        });
    }
    if let Some(i) = pair
        .b
        .iter()
        .position(|b| !(*b > T::zero()) || !b.is_finite())
    {
        return Err(Error::NonPositiveMass { index: i });
    }
    let inv_sqrt_b: Vec<T> = pair.b.iter().map(|b| T::one() / b.sqrt()).collect();
    let mut s = Array2::zeros((n, n));
    for (i, j, q) in pair.q.triplets() {
        s[[i, j]] = q * inv_sqrt_b[i] * inv_sqrt_b[j];
    }
    let eig = symmetric_eigen(&s)?;

    // Eigenvalues of S ascend (most negative first); lambdas are their negatives ascending.
    let max_abs = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let largest = eig.values[n - 1];
    let tol = T::lit(SEMIDEFINITE_TOL).max(T::lit(1000.0) * T::epsilon());
    if largest > tol * max_abs {
        return Err(Error::NotSemidefinite {
            value: largest.to_f64_lossy(),
        });
    }
    let mut lambdas = Vec::with_capacity(n);
    let mut h = Array2::zeros((n, n));
    for (col, k) in (0..n).rev().enumerate() {
        lambdas.push((-eig.values[k]).max(T::zero()));
        let mut v: Array1<T> = eig.vectors.column(k).to_owned();
        for (x, &w) in v.iter_mut().zip(&inv_sqrt_b) {
            *x = *x * w;
        }
        // Re-normalize in the B inner product.
        let norm = v
            .iter()
            .zip(&pair.b)
            .map(|(&x, &b)| x * x * b)
            .sum::<T>()
            .sqrt();
        let mut pivot = T::zero();
        for &x in v.iter() {
            if x.abs() > pivot.abs() {
                pivot = x;
            }
        }
        let sign = if pivot < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        let scale = sign / norm;
        h.column_mut(col).assign(&v.mapv(|x| x * scale));
    }
    let mut basis = HarmonicBasis {
        lambdas,
        h,
        mass: pair.b.clone(),
        id: BasisId(0),
    };
    basis.id = BasisId::of_matrix(&manifold_fourier_matrix_unchecked(&basis));
    Ok(basis)
}

fn check_channels<T>(n: usize, f: &[Vec<T>]) -> Result<()> {
    for c in f {
        if c.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: c.len(),
            });
        }
    }
    Ok(())
}

/// Forward harmonic transform `H^T B f` per channel.
pub fn pmht_forward<T: Real>(basis: &HarmonicBasis<T>, f: &[Vec<T>]) -> Result<SpectralSignal<T>> {
    let n = basis.len();
    check_channels(n, f)?;
    let coeffs = f
        .iter()
        .map(|c| {
            let bf: Array1<T> = c.iter().zip(&basis.mass).map(|(&x, &m)| x * m).collect();
            basis
                .h
                .t()
                .dot(&bf)
                .iter()
                .map(|&x| Complex::new(x, T::zero()))
                .collect()
        })
        .collect();
    Ok(SpectralSignal {
        coeffs,
        order: T::one(),
        basis_id: basis.id,
    })
}

/// Inverse harmonic transform `H c` per channel. Imaginary parts are ignored.
pub fn pmht_inverse<T: Real>(
    basis: &HarmonicBasis<T>,
    sig: &SpectralSignal<T>,
) -> Result<Vec<Vec<T>>> {
    if sig.basis_id != basis.id {
        return Err(Error::BasisMismatch);
    }
    if sig.order != T::one() {
        return Err(Error::OrderMismatch {
            expected: 1.0,
            found: sig.order.to_f64_lossy(),
        });
    }
    check_channels(basis.len(), &sig.coeffs)?;
    Ok(sig
        .coeffs
        .iter()
        .map(|c| {
            let re: Array1<T> = c.iter().map(|z| z.re).collect();
            basis.h.dot(&re).to_vec()
        })
        .collect())
}

fn manifold_fourier_matrix_unchecked<T: Real>(basis: &HarmonicBasis<T>) -> Array2<T> {
    let mut fm = basis.h.t().to_owned();
    for (mut col, &m) in fm.columns_mut().into_iter().zip(&basis.mass) {
        col.mapv_inplace(|x| x * m);
    }
    fm
}

/// The manifold Fourier matrix `F_M = H^T B`, whose inverse is `H`.
pub fn manifold_fourier_matrix<T: Real>(basis: &HarmonicBasis<T>) -> Array2<T> {
    let fm = manifold_fourier_matrix_unchecked(basis);
    debug_assert!({
        let prod = fm.dot(&basis.h);
        prod.indexed_iter().all(|((i, j), &x)| {
            let target = if i == j { T::one() } else { T::zero() };
            (x - target).abs() <= T::lit(1e-8)
        })
    });
    fm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;

    /// Path graph with unit masses except one heavier node.
    fn path_pair(n: usize) -> LboPair<f64> {
        let mut trip = Vec::new();
        for i in 0..n - 1 {
            trip.push((i, i + 1, 1.0));
            trip.push((i + 1, i, 1.0));
            trip.push((i, i, -1.0));
            trip.push((i + 1, i + 1, -1.0));
        }
        let q = SparseMatrix::from_triplets(n, n, trip).unwrap();
        let mut b = vec![1.0; n];
        b[0] = 2.0;
        LboPair {
            q,
            b,
            t: 1.0,
            delta: 1.0,
        }
    }

    #[test]
    fn path_graph_basis() {
        let pair = path_pair(12);
        let basis = solve_harmonic_basis(&pair).unwrap();
        assert!(basis.orthonormality_error() < 1e-12);
        assert!(basis.lambdas[0].abs() < 1e-12);
        assert!(basis.lambdas.windows(2).all(|w| w[0] <= w[1]));
        let h0 = basis.mode(0);
        assert!(h0.iter().all(|&x| (x - h0[0]).abs() < 1e-12 && x > 0.0));
        // Largest-magnitude entry of every column is positive.
        for k in 0..12 {
            let col = basis.mode(k);
            let piv = col
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(piv > 0.0);
        }
    }

    #[test]
    fn forward_inverse_and_mismatch() {
        let pair = path_pair(8);
        let basis = solve_harmonic_basis(&pair).unwrap();
        let f = vec![(0..8).map(|i| (i as f64).sin()).collect::<Vec<_>>()];
        let sig = pmht_forward(&basis, &f).unwrap();
        let back = pmht_inverse(&basis, &sig).unwrap();
        for (a, b) in back[0].iter().zip(&f[0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut wrong = sig.clone();
        wrong.order = 0.5;
        assert!(matches!(
            pmht_inverse(&basis, &wrong),
            Err(Error::OrderMismatch { .. })
        ));
        wrong.order = 1.0;
        wrong.basis_id = BasisId(wrong.basis_id.0 ^ 1);
        assert!(matches!(
            pmht_inverse(&basis, &wrong),
            Err(Error::BasisMismatch)
        ));
        assert!(pmht_forward(&basis, &[vec![1.0; 3]]).is_err());
    }

    #[test]
    fn dense_limit_and_bad_mass() {
        let pair = path_pair(6);
        assert!(matches!(
            solve_harmonic_basis_with_limit(&pair, 5),
            Err(Error::TooLarge { n: 6, limit: 5 })
        ));
        let mut bad = pair.clone();
        bad.b[3] = 0.0;
        assert!(matches!(
            solve_harmonic_basis(&bad),
            Err(Error::NonPositiveMass { index: 3 })
        ));
    }

    #[test]
    fn indefinite_operator_rejected() {
        let q = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let pair = LboPair {
            q,
            b: vec![1.0, 1.0],
            t: 1.0,
            delta: 1.0,
        };
        assert!(matches!(
            solve_harmonic_basis(&pair),
            Err(Error::NotSemidefinite { .. })
        ));
    }

    #[test]
    fn fourier_matrix_inverts_basis() {
        let basis = solve_harmonic_basis(&path_pair(10)).unwrap();
        let fm = manifold_fourier_matrix(&basis);
        let col = basis.mode(2);
        let e = fm.dot(&Array1::from(col));
        for (k, &x) in e.iter().enumerate() {
            assert!((x - if k == 2 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        assert_eq!(BasisId::of_matrix(&fm), basis.id());
    }
}
