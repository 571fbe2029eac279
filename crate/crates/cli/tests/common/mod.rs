#![allow(dead_code)]

use std::path::{Path, PathBuf};

use clap::Parser;
use fracharm_core::{write_ply, PlyFormat, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bunny_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/bunny.ply")
}

pub static BUNNY: std::sync::LazyLock<String> =
    std::sync::LazyLock::new(|| bunny_path().to_str().unwrap().to_string());

/// Runs a command in-process and returns its standard output.
pub fn run(args: &[&str]) -> Result<String, fracharm::CliError> {
    let cli =
        fracharm::Cli::try_parse_from(std::iter::once("fracharm").chain(args.iter().copied()))
            .expect("arguments parse");
    let mut out = Vec::new();
    fracharm::run(&cli, &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn sphere_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p = [gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)];
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            p.map(|c| c / r)
        })
        .collect()
}

pub fn save(cloud: &PointCloud, dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(name);
    write_ply(cloud, &path, PlyFormat::BinaryLittleEndian).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rows of a spectrum CSV as (lambda, re, im).
pub fn read_spectrum_csv(path: &Path) -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("mode_index,lambda,coeff_real,coeff_imag")
    );
    lines
        .enumerate()
        .map(|(k, l)| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[0].parse::<usize>().unwrap(), k);
            (
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

/// Diagonal of a Matrix Market dump of B.
pub fn read_mass(path: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    let dims: Vec<usize> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    let mut b = vec![0.0; dims[0]];
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert_eq!(i, j);
        b[i - 1] = f[2].parse().unwrap();
    }
    b
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let n: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    d / n
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
