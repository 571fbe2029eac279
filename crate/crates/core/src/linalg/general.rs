//! Eigen-decomposition of a general real square matrix.
//!
//! Orthogonal reduction to upper Hessenberg form, Francis double-shift QR to
//! real Schur form, then back-substitution for the eigenvectors of the
//! quasi-triangular factor. Complex conjugate pairs are returned as complex
//! eigenvalues with complex eigenvector columns.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct GeneralEigen<T> {
    /// Eigenvalues in the order produced by the Schur form.
    pub values: Vec<Complex<T>>,
    /// Eigenvectors as columns, each with unit Euclidean norm.
    pub vectors: Array2<Complex<T>>,
}

/// Computes eigenvalues and right eigenvectors of the real matrix `a`.
pub fn general_eigen<T: Real>(a: &Array2<T>) -> Result<GeneralEigen<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "general_eigen needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(GeneralEigen {
            values: Vec::new(),
            vectors: Array2::zeros((0, 0)),
        });
    }
    // Logical (row-major) order regardless of memory layout.
    let mut h: Vec<T> = a.iter().copied().collect();
    let mut v = vec![T::zero(); n * n];
    hessenberg(n, &mut h, &mut v);
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    schur(n, &mut h, &mut v, &mut d, &mut e)?;
    let v = back_substitute(n, &mut h, v, &d, &e);

    let mut values = Vec::with_capacity(n);
    let mut vectors = Array2::zeros((n, n));
    let mut j = 0;
    while j < n {
        if e[j] == T::zero() {
            values.push(Complex::new(d[j], T::zero()));
            for i in 0..n {
                vectors[[i, j]] = Complex::new(v[[i, j]], T::zero());
            }
            j += 1;
        } else {
            // Columns j, j+1 hold real and imaginary parts for d[j] + i e[j].
            values.push(Complex::new(d[j], e[j]));
            values.push(Complex::new(d[j], -e[j]));
            for i in 0..n {
                let re = v[[i, j]];
                let im = v[[i, j + 1]];
                vectors[[i, j]] = Complex::new(re, im);
                vectors[[i, j + 1]] = Complex::new(re, -im);
            }
            j += 2;
        }
    }
    for mut col in vectors.columns_mut() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::zero() {
            col.mapv_inplace(|z| z / norm);
        }
    }
    Ok(GeneralEigen { values, vectors })
}

/// Householder reduction to Hessenberg form; the accumulated transform goes to `v`.
fn hessenberg<T: Real>(n: usize, h: &mut [T], v: &mut [T]) {
    let idx = |i: usize, j: usize| i * n + j;
    let high = n - 1;
    let mut ort = vec![T::zero(); n];
    for m in 1..high {
        let mut scale = T::zero();
        for i in m..=high {
            scale = scale + h[idx(i, m - 1)].abs();
        }
        if scale == T::zero() {
            continue;
        }
        let mut hh = T::zero();
        for i in (m..=high).rev() {
            ort[i] = h[idx(i, m - 1)] / scale;
            hh = hh + ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > T::zero() {
            g = -g;
        }
        hh = hh - ort[m] * g;
        ort[m] = ort[m] - g;

        // H <- (I - u u'/hh) H
        let mut fcol = vec![T::zero(); n];
        for i in m..=high {
            let oi = ort[i];
            let row = &h[idx(i, 0)..idx(i, 0) + n];
            for j in m..n {
                fcol[j] = fcol[j] + oi * row[j];
            }
        }
        for j in m..n {
            fcol[j] = fcol[j] / hh;
        }
        for i in m..=high {
            let oi = ort[i];
            let row = &mut h[idx(i, 0)..idx(i, 0) + n];
            for j in m..n {
                row[j] = row[j] - fcol[j] * oi;
            }
        }
        // H <- H (I - u u'/hh)
        for i in 0..=high {
            let row = &mut h[idx(i, 0)..idx(i, 0) + n];
            let mut f = T::zero();
            for j in m..=high {
                f = f + ort[j] * row[j];
            }
            f = f / hh;
            for j in m..=high {
                row[j] = row[j] - f * ort[j];
            }
        }
        ort[m] = scale * ort[m];
        h[idx(m, m - 1)] = scale * g;
    }

    for i in 0..n {
        for j in 0..n {
            v[idx(i, j)] = if i == j { T::one() } else { T::zero() };
        }
    }
    for m in (1..high).rev() {
        if h[idx(m, m - 1)] == T::zero() {
            continue;
        }
        for i in (m + 1)..=high {
            ort[i] = h[idx(i, m - 1)];
        }
        let mut gcol = vec![T::zero(); n];
        for i in m..=high {
            let oi = ort[i];
            let row = &v[idx(i, 0)..idx(i, 0) + n];
            for j in m..=high {
                gcol[j] = gcol[j] + oi * row[j];
            }
        }
        let denom_a = ort[m];
        let denom_b = h[idx(m, m - 1)];
        for j in m..=high {
            // Double division avoids possible underflow.
            gcol[j] = (gcol[j] / denom_a) / denom_b;
        }
        for i in m..=high {
            let oi = ort[i];
            let row = &mut v[idx(i, 0)..idx(i, 0) + n];
            for j in m..=high {
                row[j] = row[j] + gcol[j] * oi;
            }
        }
    }
}

/// Francis double-shift QR iteration to real Schur form.
fn schur<T: Real>(nn: usize, h: &mut [T], v: &mut [T], d: &mut [T], e: &mut [T]) -> Result<()> {
    let idx = |i: usize, j: usize| i * nn + j;
    let low = 0usize;
    let high = nn - 1;
    let eps = T::epsilon();
    let zero = T::zero();
    let half = T::lit(0.5);
    let mut exshift = zero;
    let (mut p, mut q, mut r, mut s, mut z): (T, T, T, T, T);
    let (mut w, mut x, mut y);

    let mut norm = zero;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm = norm + h[idx(i, j)].abs();
        }
    }

    let max_total = 100 * nn.max(10);
    let mut total_iter = 0usize;
    let mut iter = 0usize;
    let mut n = nn as isize - 1;
    while n >= low as isize {
        let nu = n as usize;
        // Look for a single small sub-diagonal element.
        let mut l = nu;
        while l > low {
            s = h[idx(l - 1, l - 1)].abs() + h[idx(l, l)].abs();
            if s == zero {
                s = norm;
            }
            if h[idx(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root.
            h[idx(nu, nu)] = h[idx(nu, nu)] + exshift;
            d[nu] = h[idx(nu, nu)];
            e[nu] = zero;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // Two roots.
            w = h[idx(nu, nu - 1)] * h[idx(nu - 1, nu)];
            p = (h[idx(nu - 1, nu - 1)] - h[idx(nu, nu)]) * half;
            q = p * p + w;
            z = q.abs().sqrt();
            h[idx(nu, nu)] = h[idx(nu, nu)] + exshift;
            h[idx(nu - 1, nu - 1)] = h[idx(nu - 1, nu - 1)] + exshift;
            x = h[idx(nu, nu)];

            if q >= zero {
                z = if p >= zero { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != zero {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = zero;
                e[nu] = zero;
                x = h[idx(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p = p / r;
                q = q / r;

                for j in (nu - 1)..nn {
                    z = h[idx(nu - 1, j)];
                    h[idx(nu - 1, j)] = q * z + p * h[idx(nu, j)];
                    h[idx(nu, j)] = q * h[idx(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[idx(i, nu - 1)];
                    h[idx(i, nu - 1)] = q * z + p * h[idx(i, nu)];
                    h[idx(i, nu)] = q * h[idx(i, nu)] - p * z;
                }
                for i in low..=high {
                    z = v[idx(i, nu - 1)];
                    v[idx(i, nu - 1)] = q * z + p * v[idx(i, nu)];
                    v[idx(i, nu)] = q * v[idx(i, nu)] - p * z;
                }
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[idx(nu, nu)];
            y = zero;
            w = zero;
            if l < nu {
                y = h[idx(nu - 1, nu - 1)];
                w = h[idx(nu, nu - 1)] * h[idx(nu - 1, nu)];
            }

            // Exceptional shifts.
            if iter == 10 {
                exshift = exshift + x;
                for i in low..=nu {
                    h[idx(i, i)] = h[idx(i, i)] - x;
                }
                s = h[idx(nu, nu - 1)].abs() + h[idx(nu - 1, nu - 2)].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) * half;
                s = s * s + w;
                if s > zero {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) * half + s);
                    for i in low..=nu {
                        h[idx(i, i)] = h[idx(i, i)] - s;
                    }
                    exshift = exshift + s;
                    x = T::lit(0.964);
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > max_total {
                return Err(Error::NonConvergence(format!(
                    "Schur iteration exceeded {max_total} sweeps"
                )));
            }

            // Look for two consecutive small sub-diagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[idx(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[idx(m + 1, m)] + h[idx(m, m + 1)];
                q = h[idx(m + 1, m + 1)] - z - r - s;
                r = h[idx(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                if h[idx(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[idx(m - 1, m - 1)].abs() + z.abs() + h[idx(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=nu {
                h[idx(i, i - 2)] = zero;
                if i > m + 2 {
                    h[idx(i, i - 3)] = zero;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[idx(k, k - 1)];
                    q = h[idx(k + 1, k - 1)];
                    r = if notlast { h[idx(k + 2, k - 1)] } else { zero };
                    x = p.abs() + q.abs() + r.abs();
                    if x == zero {
                        continue;
                    }
                    p = p / x;
                    q = q / x;
                    r = r / x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < zero {
                    s = -s;
                }
                if s != zero {
                    if k != m {
                        h[idx(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[idx(k, k - 1)] = -h[idx(k, k - 1)];
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;

                    for j in k..nn {
                        p = h[idx(k, j)] + q * h[idx(k + 1, j)];
                        if notlast {
                            p = p + r * h[idx(k + 2, j)];
                            h[idx(k + 2, j)] = h[idx(k + 2, j)] - p * z;
                        }
                        h[idx(k, j)] = h[idx(k, j)] - p * x;
                        h[idx(k + 1, j)] = h[idx(k + 1, j)] - p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[idx(i, k)] + y * h[idx(i, k + 1)];
                        if notlast {
                            p = p + z * h[idx(i, k + 2)];
                            h[idx(i, k + 2)] = h[idx(i, k + 2)] - p * r;
                        }
                        h[idx(i, k)] = h[idx(i, k)] - p;
                        h[idx(i, k + 1)] = h[idx(i, k + 1)] - p * q;
                    }
                    for i in low..=high {
                        let row = &mut v[idx(i, 0)..idx(i, 0) + nn];
                        p = x * row[k] + y * row[k + 1];
                        if notlast {
                            p = p + z * row[k + 2];
                            row[k + 2] = row[k + 2] - p * r;
                        }
                        row[k] = row[k] - p;
                        row[k + 1] = row[k + 1] - p * q;
                    }
                }
            }
        }
    }
    Ok(())
}

#[inline]
fn cdiv<T: Real>(xr: T, xi: T, yr: T, yi: T) -> (T, T) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Eigenvectors of the quasi-triangular Schur factor, mapped back through `v`.
fn back_substitute<T: Real>(nn: usize, h: &mut [T], v: Vec<T>, d: &[T], e: &[T]) -> Array2<T> {
    let idx = |i: usize, j: usize| i * nn + j;
    let zero = T::zero();
    let eps = T::epsilon();

    let mut norm = zero;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm = norm + h[idx(i, j)].abs();
        }
    }
    let vmat = Array2::from_shape_vec((nn, nn), v).expect("square buffer");
    if norm == zero {
        return vmat;
    }

    let (mut r, mut s, mut z) = (zero, zero, zero);
    for n in (0..nn).rev() {
        let p = d[n];
        let q = e[n];
        if q == zero {
            // Real vector.
            let mut l = n;
            h[idx(n, n)] = T::one();
            for i in (0..n).rev() {
                let w = h[idx(i, i)] - p;
                r = zero;
                for j in l..=n {
                    r = r + h[idx(i, j)] * h[idx(j, n)];
                }
                if e[i] < zero {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == zero {
                        h[idx(i, n)] = if w != zero { -r / w } else { -r / (eps * norm) };
                    } else {
                        let x = h[idx(i, i + 1)];
                        let y = h[idx(i + 1, i)];
                        let qq = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        let t = (x * s - z * r) / qq;
                        h[idx(i, n)] = t;
                        h[idx(i + 1, n)] = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    let t = h[idx(i, n)].abs();
                    if (eps * t) * t > T::one() {
                        for j in i..=n {
                            h[idx(j, n)] = h[idx(j, n)] / t;
                        }
                    }
                }
            }
        } else if q < zero {
            // Complex vector; last component imaginary.
            let mut l = n - 1;
            if h[idx(n, n - 1)].abs() > h[idx(n - 1, n)].abs() {
                h[idx(n - 1, n - 1)] = q / h[idx(n, n - 1)];
                h[idx(n - 1, n)] = -(h[idx(n, n)] - p) / h[idx(n, n - 1)];
            } else {
                let (cr, ci) = cdiv(zero, -h[idx(n - 1, n)], h[idx(n - 1, n - 1)] - p, q);
                h[idx(n - 1, n - 1)] = cr;
                h[idx(n - 1, n)] = ci;
            }
            h[idx(n, n - 1)] = zero;
            h[idx(n, n)] = T::one();
            for i in (0..n.saturating_sub(1)).rev() {
                let mut ra = zero;
                let mut sa = zero;
                for j in l..=n {
                    ra = ra + h[idx(i, j)] * h[idx(j, n - 1)];
                    sa = sa + h[idx(i, j)] * h[idx(j, n)];
                }
                let w = h[idx(i, i)] - p;
                if e[i] < zero {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == zero {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[idx(i, n - 1)] = cr;
                        h[idx(i, n)] = ci;
                    } else {
                        let x = h[idx(i, i + 1)];
                        let y = h[idx(i + 1, i)];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * T::lit(2.0) * q;
                        if vr == zero && vi == zero {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[idx(i, n - 1)] = cr;
                        h[idx(i, n)] = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h[idx(i + 1, n - 1)] =
                                (-ra - w * h[idx(i, n - 1)] + q * h[idx(i, n)]) / x;
                            h[idx(i + 1, n)] = (-sa - w * h[idx(i, n)] - q * h[idx(i, n - 1)]) / x;
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * h[idx(i, n - 1)], -s - y * h[idx(i, n)], z, q);
                            h[idx(i + 1, n - 1)] = cr;
                            h[idx(i + 1, n)] = ci;
                        }
                    }
                    let t = h[idx(i, n - 1)].abs().max(h[idx(i, n)].abs());
                    if (eps * t) * t > T::one() {
                        for j in i..=n {
                            h[idx(j, n - 1)] = h[idx(j, n - 1)] / t;
                            h[idx(j, n)] = h[idx(j, n)] / t;
                        }
                    }
                }
            }
        }
    }

    // V <- V * triu(H).
    let mut upper = Array2::zeros((nn, nn));
    for i in 0..nn {
        for j in i..nn {
            upper[[i, j]] = h[idx(i, j)];
        }
    }
    vmat.dot(&upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
    }

    fn max_residual(a: &Array2<f64>, eig: &GeneralEigen<f64>) -> f64 {
        let ac = a.mapv(|x| Complex::new(x, 0.0));
        let av = ac.dot(&eig.vectors);
        let mut worst: f64 = 0.0;
        for (j, lam) in eig.values.iter().enumerate() {
            for i in 0..a.nrows() {
                worst = worst.max((av[[i, j]] - lam * eig.vectors[[i, j]]).norm());
            }
        }
        worst
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let a = ndarray::arr2(&[[0.0, -1.0], [1.0, 0.0]]);
        let eig = general_eigen(&a).unwrap();
        let mut ims: Vec<f64> = eig.values.iter().map(|z| z.im).collect();
        ims.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((ims[0] + 1.0).abs() < 1e-15 && (ims[1] - 1.0).abs() < 1e-15);
        assert!(max_residual(&a, &eig) < 1e-14);
    }

    #[test]
    fn random_matrices_satisfy_eigen_equation() {
        for &n in &[1usize, 2, 3, 7, 50, 150] {
            let a = random_matrix(n, 7 + n as u64);
            let eig = general_eigen(&a).unwrap();
            assert_eq!(eig.values.len(), n);
            assert!(max_residual(&a, &eig) < 1e-10 * n as f64, "n = {n}");
        }
    }

    #[test]
    fn triangular_and_identity() {
        let a = ndarray::arr2(&[[2.0, 1.0, 0.5], [0.0, 3.0, 1.0], [0.0, 0.0, -1.0]]);
        let eig = general_eigen(&a).unwrap();
        let mut re: Vec<f64> = eig.values.iter().map(|z| z.re).collect();
        re.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(re, vec![-1.0, 2.0, 3.0]);
        assert!(max_residual(&a, &eig) < 1e-14);

        let eye = Array2::<f64>::eye(5);
        let eig = general_eigen(&eye).unwrap();
        assert!(eig
            .values
            .iter()
            .all(|z| (z - Complex::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn eigenvalues_match_nalgebra_schur() {
        let n = 40;
        let a = random_matrix(n, 1234);
        let eig = general_eigen(&a).unwrap();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
        let reference: Vec<Complex<f64>> = m
            .complex_eigenvalues()
            .iter()
            .map(|z| Complex::new(z.re, z.im))
            .collect();
        for z in &eig.values {
            let best = reference
                .iter()
                .map(|w| (w - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "eigenvalue {z} has no match");
        }
    }
}
