mod common;

use std::sync::OnceLock;

use fracharm_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Fixture {
    basis: HarmonicBasis,
    op: FractionalOperator,
    coords: Vec<Vec<f64>>,
}

fn bunny() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let p = common::pipeline(downsample(&common::bunny(), 150, 0).unwrap());
        let op = FractionalOperator::from_basis(&p.basis).unwrap();
        let coords = p.cloud.coordinate_channels();
        Fixture {
            basis: p.basis,
            op,
            coords,
        }
    })
}

#[test]
fn all_pass_is_identity() {
    let f = bunny();
    let n = f.basis.len();
    for a in [-2.0, -1.3, -0.5, 0.0, 0.5, 1.0, 1.7, 2.0] {
        let out = apply_filter(&f.op, &f.basis, &f.coords, &FilterSpec::lowpass(n - 1, a)).unwrap();
        for (g, x) in out.reconstruction.values.iter().zip(&f.coords) {
            assert!(common::rel_err(g, x) <= 1e-6, "order {a}");
        }
    }
}

#[test]
fn mode_zero_projects_to_weighted_mean() {
    let f = bunny();
    let out = apply_filter(&f.op, &f.basis, &f.coords, &FilterSpec::lowpass(0, 1.0)).unwrap();
    let total: f64 = f.basis.mass.iter().sum();
    for (g, x) in out.reconstruction.values.iter().zip(&f.coords) {
        let mean = x.iter().zip(&f.basis.mass).map(|(v, m)| v * m).sum::<f64>() / total;
        for v in g {
            assert!((v - mean).abs() <= 1e-8 * mean.abs().max(1.0));
        }
    }
}

#[test]
fn complementary_masks_partition() {
    let f = bunny();
    let n = f.basis.len();
    for cut in [0, 5, 40, n - 2] {
        let lo = apply_filter(&f.op, &f.basis, &f.coords, &FilterSpec::lowpass(cut, 1.0)).unwrap();
        let hi = apply_filter(
            &f.op,
            &f.basis,
            &f.coords,
            &FilterSpec::highpass(cut + 1, n, 1.0),
        )
        .unwrap();
        for c in 0..3 {
            let sum: Vec<f64> = lo.reconstruction.values[c]
                .iter()
                .zip(&hi.reconstruction.values[c])
                .map(|(a, b)| a + b)
                .collect();
            assert!(common::rel_err(&sum, &f.coords[c]) <= 1e-8);
        }
    }
}

#[test]
fn lowpass_never_raises_energy() {
    let f = bunny();
    let n = f.basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..10 {
        let x = common::random_vector(n, &mut rng);
        let before = smoothness_energy(&f.basis, &x).unwrap();
        let cut = 3 + 13 * trial;
        let out = apply_filter(&f.op, &f.basis, &[x], &FilterSpec::lowpass(cut, 1.0)).unwrap();
        let after = smoothness_energy(&f.basis, &out.reconstruction.values[0]).unwrap();
        assert!(after <= before, "cut {cut}: {after} > {before}");
    }
}

#[test]
fn energy_of_constants_and_modes() {
    let f = bunny();
    let n = f.basis.len();
    assert!(smoothness_energy(&f.basis, &vec![3.0; n]).unwrap().abs() < 1e-10);
    for k in [1, 7, 60] {
        let e = smoothness_energy(&f.basis, &f.basis.mode(k)).unwrap();
        assert!((e - f.basis.lambdas[k]).abs() <= 1e-9 * f.basis.lambdas[k]);
    }
    assert!(smoothness_energy(&f.basis, &[1.0]).is_err());
}

#[test]
fn filtering_is_linear() {
    let f = bunny();
    let n = f.basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (x, y) = (
        common::random_vector(n, &mut rng),
        common::random_vector(n, &mut rng),
    );
    let (alpha, beta) = (1.7, -0.6);
    let combo: Vec<f64> = x
        .iter()
        .zip(&y)
        .map(|(a, b)| alpha * a + beta * b)
        .collect();
    for spec in [
        FilterSpec::bandpass(4, 30, 0.6),
        FilterSpec::lowpass(20, 1.0),
        FilterSpec::highpass(9, n, -0.8),
    ] {
        let run = |v: &[f64]| apply_filter(&f.op, &f.basis, &[v.to_vec()], &spec).unwrap();
        let (fx, fy, fc) = (run(&x), run(&y), run(&combo));
        let expected: Vec<_> = fx.reconstruction.complex[0]
            .iter()
            .zip(&fy.reconstruction.complex[0])
            .map(|(a, b)| a * alpha + b * beta)
            .collect();
        assert!(common::complex_rel_err(&fc.reconstruction.complex[0], &expected) <= 1e-8);
    }
}

#[test]
fn highpass_removes_mean_shape() {
    let f = bunny();
    let n = f.basis.len();
    let out = apply_filter(&f.op, &f.basis, &f.coords, &FilterSpec::highpass(1, n, 1.0)).unwrap();
    let diag = {
        let c = &f.coords;
        (0..3)
            .map(|k| {
                let (lo, hi) = c[k]
                    .iter()
                    .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
                (hi - lo).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    };
    let total: f64 = f.basis.mass.iter().sum();
    for g in &out.reconstruction.values {
        let mean = g.iter().zip(&f.basis.mass).map(|(v, m)| v * m).sum::<f64>() / total;
        assert!(mean.abs() < 1e-6 * diag);
    }
}

#[test]
fn spec_and_basis_mismatch_rejected() {
    let f = bunny();
    let n = f.basis.len();
    assert!(apply_filter(&f.op, &f.basis, &f.coords, &FilterSpec::lowpass(n, 1.0)).is_err());
    let other = common::pipeline(common::sphere(40, 1)).basis;
    assert!(matches!(
        apply_filter(&f.op, &other, &f.coords, &FilterSpec::lowpass(3, 1.0)),
        Err(Error::BasisMismatch)
    ));
}

#[test]
fn noisy_sphere_lowpass_reduces_radial_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let pts: Vec<[f64; 3]> = common::sphere_points(500, 30)
        .into_iter()
        .map(|p| p.map(|v| v + 0.01 * common::gauss(&mut rng)))
        .collect();
    let p = common::pipeline(PointCloud::new(pts).unwrap());
    let op = FractionalOperator::from_basis(&p.basis).unwrap();
    let coords = p.cloud.coordinate_channels();
    let rms = |c: &[Vec<f64>]| {
        let n = c[0].len();
        let s: f64 = (0..n)
            .map(|i| ((c[0][i].powi(2) + c[1][i].powi(2) + c[2][i].powi(2)).sqrt() - 1.0).powi(2))
            .sum();
        (s / n as f64).sqrt()
    };
    let out = apply_filter(&op, &p.basis, &coords, &FilterSpec::lowpass(20, 1.0)).unwrap();
    let (before, after) = (rms(&coords), rms(&out.reconstruction.values));
    eprintln!(
        "noisy sphere RMS radial error: {before:.5} -> {after:.5} ({:.2}x)",
        before / after
    );
    assert!(after < before);
    for c in 0..3 {
        let e0 = smoothness_energy(&p.basis, &coords[c]).unwrap();
        let e1 = smoothness_energy(&p.basis, &out.reconstruction.values[c]).unwrap();
        assert!(e1 < e0);
    }
}
