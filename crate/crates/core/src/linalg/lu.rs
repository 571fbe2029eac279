//! Complex dense inverse by Gauss-Jordan elimination with partial pivoting.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inverse of a square complex matrix.
///
/// Fails with [`Error::IllConditioned`] when a pivot vanishes exactly.
pub fn complex_inverse<T: Real>(a: &Array2<Complex<T>>) -> Result<Array2<Complex<T>>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "complex_inverse needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let w = 2 * n;
    // Augmented [A | I], row-major.
    let mut m = vec![Complex::new(T::zero(), T::zero()); n * w];
    for i in 0..n {
        for j in 0..n {
            m[i * w + j] = a[[i, j]];
        }
        m[i * w + n + i] = Complex::new(T::one(), T::zero());
    }
    let abs1 = |z: Complex<T>| z.re.abs() + z.im.abs();

    for col in 0..n {
        let mut piv = col;
        let mut best = abs1(m[col * w + col]);
        for r in (col + 1)..n {
            let v = abs1(m[r * w + col]);
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == T::zero() || !best.is_finite() {
            return Err(Error::IllConditioned {
                cond: f64::INFINITY,
                threshold: f64::INFINITY,
            });
        }
        if piv != col {
            for j in 0..w {
                m.swap(piv * w + j, col * w + j);
            }
        }
        let inv_p = Complex::new(T::one(), T::zero()) / m[col * w + col];
        for j in col..w {
            m[col * w + j] = m[col * w + j] * inv_p;
        }
        let (before, rest) = m.split_at_mut(col * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [Complex<T>]| {
            let f = row[col];
            if f.re == T::zero() && f.im == T::zero() {
                return;
            }
            for j in col..w {
                row[j] = row[j] - f * pivot_row[j];
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
    }

    let mut inv = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            inv[[i, j]] = m[i * w + n + j];
        }
    }
    Ok(inv)
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm<T: Real>(a: &Array2<Complex<T>>) -> T {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<T>())
        .fold(T::zero(), T::max)
}
