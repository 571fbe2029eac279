#![allow(dead_code)]

use std::path::PathBuf;

use fracharm_core::*;
use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bunny_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/bunny.ply")
}

pub fn bunny() -> PointCloud {
    read_ply(bunny_path()).expect("bundled bunny fixture")
}

/// `n x n` grid in the z = 0 plane with spacing `h`, points at `(i + offset) h`.
pub fn grid(n: usize, h: f64, offset: f64) -> PointCloud {
    let pts = (0..n * n)
        .map(|k| {
            [
                ((k % n) as f64 + offset) * h,
                ((k / n) as f64 + offset) * h,
                0.0,
            ]
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

pub fn circle(n: usize) -> PointCloud {
    let pts = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

pub fn gauss(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Uniform points on the unit sphere (normalized Gaussians).
pub fn sphere_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| loop {
            let v = [gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)];
            let m = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if m > 1e-6 {
                break [v[0] / m, v[1] / m, v[2] / m];
            }
        })
        .collect()
}

pub fn sphere(n: usize, seed: u64) -> PointCloud {
    PointCloud::new(sphere_points(n, seed)).unwrap()
}

/// Everything up to the harmonic basis, with default parameters.
pub struct Pipeline {
    pub cloud: PointCloud,
    pub index: NeighborIndex,
    pub epsilon: f64,
    pub weights: AreaWeights,
    pub pair: LboPair,
    pub basis: HarmonicBasis,
}

pub fn pipeline(cloud: PointCloud) -> Pipeline {
    let index = build_index(&cloud);
    let epsilon = estimate_epsilon(&index).unwrap().epsilon;
    let (r, delta) = (10.0 * epsilon, 10.0 * epsilon);
    let weights = all_area_weights(&cloud, &index, r, delta).unwrap();
    let t = default_t(epsilon, DEFAULT_EXPONENT_MARGIN).unwrap();
    let pair = assemble_lbo(&cloud, &index, &weights, t, delta).unwrap();
    let basis = solve_harmonic_basis(&pair).unwrap();
    Pipeline {
        cloud,
        index,
        epsilon,
        weights,
        pair,
        basis,
    }
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b)
}

pub fn complex_rel_err(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn frobenius(a: &Array2<Complex<f64>>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_frobenius(a: &Array2<Complex<f64>>, b: &Array2<Complex<f64>>) -> f64 {
    frobenius(&(a - b)) / frobenius(b)
}

pub fn complexify(a: &Array2<f64>) -> Array2<Complex<f64>> {
    a.mapv(|x| Complex::new(x, 0.0))
}

/// Plain triple loop, independent of ndarray's `dot`.
pub fn naive_matmul(a: &Array2<Complex<f64>>, b: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
    let (n, m, p) = (a.nrows(), a.ncols(), b.ncols());
    let mut out = Array2::zeros((n, p));
    for i in 0..n {
        for j in 0..p {
            let mut s = Complex::new(0.0, 0.0);
            for k in 0..m {
                s += a[[i, k]] * b[[k, j]];
            }
            out[[i, j]] = s;
        }
    }
    out
}
