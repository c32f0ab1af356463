mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use povmlab::bounds::{max_relative_success, prs_max_from_invariants, qubit_quadratic_a};
use povmlab::ensemble::StateEnsemble;
use povmlab::hermitian::{
    eig_hermitian, min_eigenvalue, pinv_psd, sqrt_psd, support_projector, trace_product,
    HermitianOperator,
};
use proptest::prelude::*;

fn hermitian(max_dim: usize) -> impl Strategy<Value = HermitianOperator> {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |v| {
            let m = DMatrix::from_fn(d, d, |i, j| Complex64::new(v[i * d + j].0, v[i * d + j].1));
            HermitianOperator::hermitian_part(m).0
        })
    })
}

/// `X X^dagger` for a random `d x r` factor, so rank-deficient cases appear.
fn psd(max_dim: usize) -> impl Strategy<Value = HermitianOperator> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(d, r)| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * r).prop_map(move |v| {
            let x = DMatrix::from_fn(d, r, |i, j| Complex64::new(v[i * r + j].0, v[i * r + j].1));
            HermitianOperator::hermitian_part(&x * x.adjoint()).0
        })
    })
}

fn scale(a: &HermitianOperator) -> f64 {
    a.frobenius_norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigendecomposition_reconstructs(a in hermitian(8)) {
        let eig = eig_hermitian(&a).unwrap();
        prop_assert!(eig.reconstruct().distance(&a) <= 1e-10 * scale(&a));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = eig.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).abs() <= 1e-10 * scale(&a));
        // unitary eigenvectors
        let v = &eig.eigenvectors;
        let id = DMatrix::<Complex64>::identity(a.dim(), a.dim());
        prop_assert!((v.adjoint() * v - id).norm() <= 1e-10);
    }

    #[test]
    fn square_root_squares_back(a in psd(8)) {
        let r = sqrt_psd(&a).unwrap();
        prop_assert!(min_eigenvalue(&r).unwrap() >= -1e-10 * scale(&a));
        let back = HermitianOperator::hermitian_part(r.matrix() * r.matrix()).0;
        prop_assert!(back.distance(&a) <= 1e-9 * scale(&a));
    }

    #[test]
    fn pseudoinverse_identities(a in psd(8)) {
        let cutoff = 1e-9;
        let p = pinv_psd(&a, cutoff).unwrap();
        let proj = support_projector(&a, cutoff).unwrap();
        let apa = a.matrix() * p.matrix() * a.matrix();
        let pap = p.matrix() * a.matrix() * p.matrix();
        prop_assert!((apa - a.matrix()).norm() <= 1e-7 * scale(&a));
        prop_assert!((pap - p.matrix()).norm() <= 1e-7 * scale(&p));
        // A A^+ is the support projector
        prop_assert!((a.matrix() * p.matrix() - proj.matrix()).norm() <= 1e-6);
    }

    #[test]
    fn trace_product_is_symmetric_and_real(a in hermitian(6), b in hermitian(6)) {
        prop_assume!(a.dim() == b.dim());
        let ab = trace_product(&a, &b).unwrap();
        let ba = trace_product(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * scale(&a) * scale(&b));
        prop_assert!((trace_product(&a, &a).unwrap() - a.frobenius_norm().powi(2)).abs() <= 1e-10 * scale(&a).powi(2));
    }

    #[test]
    fn overlap_gram_is_psd(seed in any::<u64>(), n in 2usize..5, d in 2usize..4) {
        let mut rng = common::rng(seed);
        let e = common::random_ensemble(&mut rng, n, d);
        let (gram, purities) = e.overlaps_and_purities().unwrap();
        let gram_op = HermitianOperator::from_real_rows(
            &(0..n).map(|i| (0..n).map(|j| gram[(i, j)]).collect()).collect::<Vec<_>>(),
        ).unwrap();
        prop_assert!(min_eigenvalue(&gram_op).unwrap() >= -1e-12);
        for (i, p) in purities.iter().enumerate() {
            prop_assert!((gram[(i, i)] - p).abs() <= 1e-14);
            prop_assert!(*p >= 1.0 / d as f64 - 1e-12 && *p <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn qubit_routes_agree(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let e = common::random_ensemble(&mut rng, 2, 2);
        let b = max_relative_success(&e).unwrap();
        for j in 0..2 {
            prop_assert!((qubit_quadratic_a(&e, j).unwrap() - b.per_state_a[j]).abs() <= 1e-10);
        }
    }

    #[test]
    fn invariant_route_matches_eigenvalue_route(purity in 0.5..1.0f64, cos in -1.0..1.0f64) {
        // equal-prior qubits with equal Bloch lengths r and opening angle acos(cos)
        let r = (2.0 * purity - 1.0).sqrt();
        prop_assume!(cos.abs() < 1.0 - 1e-6);
        let bloch = |x: f64, z: f64| {
            let m = DMatrix::from_row_slice(2, 2, &[
                Complex64::new(1.0 + z, 0.0), Complex64::new(x, 0.0),
                Complex64::new(x, 0.0), Complex64::new(1.0 - z, 0.0),
            ]) * Complex64::new(0.5, 0.0);
            HermitianOperator::new(m).unwrap()
        };
        let half = cos.acos() / 2.0;
        let rho1 = bloch(r * half.sin(), r * half.cos());
        let rho2 = bloch(-r * half.sin(), r * half.cos());
        let overlap = trace_product(&rho1, &rho2).unwrap();
        let e = StateEnsemble::new(vec![rho1, rho2], vec![0.5, 0.5]).unwrap();
        let eigen = max_relative_success(&e).unwrap().prs_max;
        let invariant = prs_max_from_invariants(purity, overlap).unwrap();
        prop_assert!((eigen - invariant).abs() <= 1e-10, "{} vs {}", eigen, invariant);
    }
}
