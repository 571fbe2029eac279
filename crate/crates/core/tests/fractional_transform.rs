mod common;

use std::sync::OnceLock;

use fracharm_core::*;
use ndarray::Array2;
use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Fixture {
    basis: HarmonicBasis,
    fm: Array2<f64>,
    op: FractionalOperator,
}

/// 50 random points on the unit sphere.
fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let p = common::pipeline(common::sphere(50, 21));
        let fm = manifold_fourier_matrix(&p.basis);
        let op = FractionalOperator::from_basis(&p.basis).unwrap();
        Fixture {
            basis: p.basis,
            fm,
            op,
        }
    })
}

fn identity(n: usize) -> Array2<Complex<f64>> {
    common::complexify(&Array2::eye(n))
}

fn max_abs(a: &Array2<Complex<f64>>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn decomposition_reconstructs_fourier_matrix() {
    let f = fixture();
    let n = f.fm.nrows();
    let mut pj = f.op.eigenvectors().clone();
    for (mut col, &l) in pj.columns_mut().into_iter().zip(f.op.eigenvalues()) {
        col.mapv_inplace(|z| z * l);
    }
    let rebuilt = common::naive_matmul(&pj, f.op.eigenvectors_inverse());
    let fm_c = common::complexify(&f.fm);
    assert!(max_abs(&(&rebuilt - &fm_c)) <= 1e-7 * max_abs(&fm_c));
    assert!(f.op.cond_p().is_finite() && f.op.cond_p() < DEFAULT_CONDITION_LIMIT);
    assert!(f.op.eigenvalues().iter().all(|z| z.norm() > 0.0));
    assert_eq!(f.op.len(), n);
}

#[test]
fn eigenvalues_are_reciprocals_of_basis_eigenvalues() {
    let f = fixture();
    let n = f.basis.len();
    let h = nalgebra::DMatrix::from_fn(n, n, |i, j| f.basis.h[[i, j]]);
    let mut expected: Vec<Complex<f64>> = h.complex_eigenvalues().iter().map(|z| z.inv()).collect();
    for got in f.op.eigenvalues() {
        let (k, d) = expected
            .iter()
            .enumerate()
            .map(|(k, e)| (k, (e - got).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(d < 1e-7, "{got} unmatched ({d:e})");
        expected.swap_remove(k);
    }
}

#[test]
fn zero_one_two_orders() {
    let f = fixture();
    let n = f.fm.nrows();
    let fm_c = common::complexify(&f.fm);
    assert!(max_abs(&(fractional_matrix(&f.op, 0.0) - identity(n))) <= 1e-8);
    assert!(common::rel_frobenius(&fractional_matrix(&f.op, 1.0), &fm_c) <= 1e-8);
    let sq = common::naive_matmul(&fm_c, &fm_c);
    assert!(common::rel_frobenius(&fractional_matrix(&f.op, 2.0), &sq) <= 1e-7);
}

#[test]
fn integer_orders_match_repeated_products() {
    let f = fixture();
    let n = f.fm.nrows();
    let fm = common::complexify(&f.fm);
    let h = common::complexify(&f.basis.h);
    let power = |k: i32| {
        let step = if k >= 0 { &fm } else { &h };
        (0..k.unsigned_abs()).fold(identity(n), |acc, _| common::naive_matmul(&acc, step))
    };
    for k in -2..=3 {
        let err = common::rel_frobenius(&fractional_matrix(&f.op, k as f64), &power(k));
        assert!(err <= 1e-6, "k = {k}: {err:e}");
    }
}

#[test]
fn continuity_in_order() {
    let f = fixture();
    for a in [-1.7, -0.4, 0.3, 0.9, 1.6] {
        let fa = fractional_matrix(&f.op, a);
        let fb = fractional_matrix(&f.op, a + 1e-6);
        assert!(common::frobenius(&(&fb - &fa)) <= 1e-3 * common::frobenius(&fa));
    }
}

#[test]
fn negative_order_inverts() {
    let f = fixture();
    let n = f.fm.nrows();
    for a in [0.35, 1.0, 1.8] {
        let prod = fractional_matrix(&f.op, -a).dot(&fractional_matrix(&f.op, a));
        assert!(max_abs(&(prod - identity(n))) <= 1e-6);
    }
}

#[test]
fn forward_transform_special_orders() {
    let f = fixture();
    let n = f.fm.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = common::random_vector(n, &mut rng);

    let s0 = pmfht_forward(&f.op, std::slice::from_ref(&x), 0.0).unwrap();
    assert_eq!(s0.order, 0.0);
    let re: Vec<f64> = s0.coeffs[0].iter().map(|z| z.re).collect();
    let im: Vec<f64> = s0.coeffs[0].iter().map(|z| z.im).collect();
    assert!(common::rel_err(&re, &x) < 1e-9);
    assert!(common::norm(&im) <= 1e-9 * common::norm(&x));

    let pmht = pmht_forward(&f.basis, std::slice::from_ref(&x)).unwrap();
    let s1 = pmfht_forward(&f.op, std::slice::from_ref(&x), 1.0).unwrap();
    assert!(common::complex_rel_err(&s1.coeffs[0], &pmht.coeffs[0]) <= 1e-8);
    assert_eq!(s1.basis_id, pmht.basis_id);

    let half = pmfht_forward(&f.op, std::slice::from_ref(&x), 0.5).unwrap();
    let twice = f.op.apply(0.5, &half.coeffs[0]).unwrap();
    assert!(common::complex_rel_err(&twice, &pmht.coeffs[0]) <= 1e-6);
}

#[test]
fn inverse_transform() {
    let f = fixture();
    let n = f.fm.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = common::random_vector(n, &mut rng);
    let sig = pmfht_forward(&f.op, std::slice::from_ref(&x), 0.7).unwrap();
    let back = pmfht_inverse(&f.op, &sig).unwrap();
    assert!(common::rel_err(&back.values[0], &x) <= 1e-6);
    assert!(back.imag_residue <= 1e-6);
    assert!(back.warning.is_none());

    let pmht = pmht_forward(&f.basis, std::slice::from_ref(&x)).unwrap();
    let via_op = pmfht_inverse(&f.op, &pmht).unwrap();
    let via_basis = pmht_inverse(&f.basis, &pmht).unwrap();
    assert!(common::rel_err(&via_op.values[0], &via_basis[0]) <= 1e-8);

    let other =
        FractionalOperator::from_basis(&common::pipeline(common::sphere(50, 22)).basis).unwrap();
    assert!(matches!(
        pmfht_inverse(&other, &sig),
        Err(Error::BasisMismatch)
    ));
    assert!(matches!(
        pmfht_forward(&f.op, &[vec![0.0; n - 1]], 0.5),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn defective_matrix_rejected() {
    // A Jordan block perturbed just enough to be diagonalizable.
    let mut m = Array2::<f64>::eye(6);
    for i in 0..5 {
        m[[i, i + 1]] = 1.0;
    }
    m[[5, 0]] = 1e-14;
    let err = decompose_fourier_matrix(&m).unwrap_err();
    assert!(
        matches!(
            err,
            Error::IllConditioned { .. } | Error::ReconstructionFailure { .. }
        ),
        "{err}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn index_additivity(a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let f = fixture();
        let lhs = fractional_matrix(&f.op, a).dot(&fractional_matrix(&f.op, b));
        let rhs = fractional_matrix(&f.op, a + b);
        prop_assert!(common::rel_frobenius(&lhs, &rhs) <= 1e-6);
    }
}
