mod common;

use fracharm_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct GridOperator {
    cloud: PointCloud,
    pair: LboPair,
    interior: Vec<usize>,
}

/// `n x n` grid of spacing `h`, heat parameter `t`, default neighbourhoods.
/// `interior` holds points at least `margin` spacings from the rim.
fn grid_operator(n: usize, h: f64, t: f64, margin: usize) -> GridOperator {
    let cloud = common::grid(n, h, 0.0);
    let idx = build_index(&cloud);
    let eps = estimate_epsilon(&idx).unwrap().epsilon;
    let w = all_area_weights(&cloud, &idx, 10.0 * eps, 10.0 * eps).unwrap();
    let pair = assemble_lbo(&cloud, &idx, &w, t, 10.0 * eps).unwrap();
    let interior = (0..n * n)
        .filter(|k| {
            let (i, j) = (k % n, k / n);
            i >= margin && j >= margin && i < n - margin && j < n - margin
        })
        .collect();
    GridOperator {
        cloud,
        pair,
        interior,
    }
}

fn check_quadratics(g: &GridOperator) {
    let p = g.cloud.points();
    let x: Vec<f64> = p.iter().map(|q| q[0]).collect();
    let x2: Vec<f64> = p.iter().map(|q| q[0] * q[0]).collect();
    let r2: Vec<f64> = p.iter().map(|q| q[0] * q[0] + q[1] * q[1]).collect();
    let lx = apply_lbo(&g.pair, &x).unwrap();
    let lx2 = apply_lbo(&g.pair, &x2).unwrap();
    let lr2 = apply_lbo(&g.pair, &r2).unwrap();
    for &i in &g.interior {
        assert!((lx2[i] - 2.0).abs() < 0.15 * 2.0, "x^2 at {i}: {}", lx2[i]);
        assert!(
            (lr2[i] - 4.0).abs() < 0.15 * 4.0,
            "x^2+y^2 at {i}: {}",
            lr2[i]
        );
        // Scale: the operator applied to |x - x_i| around i.
        let scale: f64 = g
            .pair
            .q
            .row(i)
            .filter(|&(j, _)| j != i)
            .map(|(j, q)| q * (x[j] - x[i]).abs())
            .sum::<f64>()
            / g.pair.b[i];
        assert!(lx[i].abs() <= 0.1 * scale, "x at {i}: {} vs {scale}", lx[i]);
    }
}

#[test]
fn unit_grid_laplacian_of_quadratics() {
    // eps = 1, so the default heat parameter is t = eps = eps^2 = 1.
    let g = grid_operator(25, 1.0, 1.0, 10);
    assert!(!g.interior.is_empty());
    check_quadratics(&g);
}

#[test]
fn fine_grid_laplacian_with_t_at_eps_squared() {
    let h = 0.05;
    let g = grid_operator(31, h, h * h, 11);
    check_quadratics(&g);
}

fn check_operator(pair: &LboPair) {
    let n = pair.len();
    let q = pair.q.to_dense();
    let max_diag = (0..n).map(|i| q[[i, i]].abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            assert_eq!(q[[i, j]], q[[j, i]]);
            if i != j {
                assert!(q[[i, j]] >= 0.0);
            }
        }
        let row: f64 = q.row(i).sum();
        assert!(row.abs() <= 1e-10 * max_diag, "row {i}: {row}");
        assert!(pair.b[i] > 0.0);
    }
    // Independent spectrum of B^-1/2 Q B^-1/2.
    let s = nalgebra::DMatrix::from_fn(n, n, |i, j| q[[i, j]] / (pair.b[i] * pair.b[j]).sqrt());
    let ev = s.symmetric_eigenvalues();
    let max_abs = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(ev.iter().all(|&v| v <= 1e-8 * max_abs));
    let ones = vec![1.0; n];
    let l1 = apply_lbo(pair, &ones).unwrap();
    assert!(l1.iter().all(
        |v| v.abs() <= 1e-10 * max_diag / pair.b.iter().cloned().fold(f64::INFINITY, f64::min)
    ));
}

#[test]
fn operator_invariants_on_bunny_and_sphere() {
    let bunny = common::pipeline(downsample(&common::bunny(), 150, 0).unwrap());
    check_operator(&bunny.pair);
    let sphere = common::pipeline(common::sphere(200, 3));
    check_operator(&sphere.pair);
}

#[test]
fn matrix_market_dump_parses_back() {
    let p = common::pipeline(common::sphere(60, 8));
    let (mut q, mut b) = (Vec::new(), Vec::new());
    p.pair.write_matrix_market(&mut q, &mut b).unwrap();
    let text = String::from_utf8(q).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    let dims: Vec<usize> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(dims, vec![60, 60, p.pair.q.nnz()]);
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let v: f64 = f[2].parse().unwrap();
        assert_eq!(v, p.pair.q.get(i - 1, j - 1));
    }
    let b = String::from_utf8(b).unwrap();
    assert_eq!(b.lines().filter(|l| !l.starts_with('%')).count(), 61);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_positions_scales_operator(seed in any::<u64>(), c in 0.3..4.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<[f64; 3]> = (0..40)
            .map(|_| {
                let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                [x, y, 0.3 * x * y]
            })
            .collect();
        let a = PointCloud::new(pts.clone()).unwrap();
        let b = PointCloud::new(pts.iter().map(|p| p.map(|v| v * c)).collect()).unwrap();
        let (ia, ib) = (build_index(&a), build_index(&b));
        let (t, delta) = (0.1, 0.9);
        let wa = all_area_weights(&a, &ia, 1.0, delta).unwrap();
        let wb = AreaWeights { areas: wa.areas.iter().map(|v| v * c * c).collect() };
        let pa = assemble_lbo(&a, &ia, &wa, t, delta).unwrap();
        let pb = assemble_lbo(&b, &ib, &wb, t * c * c, delta * c).unwrap();
        let f: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let la = apply_lbo(&pa, &f).unwrap();
        let lb = apply_lbo(&pb, &f).unwrap();
        let expected: Vec<f64> = la.iter().map(|v| v / (c * c)).collect();
        prop_assert!(common::rel_err(&lb, &expected) < 1e-12);
    }
}
