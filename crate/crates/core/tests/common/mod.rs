//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use povmlab::ensemble::StateEnsemble;
use povmlab::hermitian::{pinv_psd, sqrt_psd, HermitianOperator};
use povmlab::solver::Povm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    // Box-Muller; the tests only need a rotation-invariant spread
    let mut normal = || {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    DMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(), normal()))
}

/// `G G^dagger / Tr` for a `dim x rank` Gaussian `G`.
pub fn random_state(rng: &mut impl Rng, dim: usize, rank: usize) -> HermitianOperator {
    let g = gaussian_matrix(rng, dim, rank);
    let (op, _) = HermitianOperator::hermitian_part(&g * g.adjoint());
    let t = op.trace();
    op.scaled(1.0 / t)
}

pub fn random_priors(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Full-rank mixed states in `dim`, `n` of them, random priors.
pub fn random_ensemble(rng: &mut impl Rng, n: usize, dim: usize) -> StateEnsemble {
    let states = (0..n).map(|_| random_state(rng, dim, dim)).collect();
    StateEnsemble::new(states, random_priors(rng, n)).expect("generated ensemble is valid")
}

/// `S^-1/2 A_k S^-1/2` with `S = sum_k A_k` for random PSD `A_k`.
pub fn random_povm(rng: &mut impl Rng, outcomes: usize, dim: usize) -> Povm {
    let raw: Vec<HermitianOperator> = (0..outcomes)
        .map(|_| {
            let rank = rng.gen_range(1..=dim);
            random_state(rng, dim, rank)
        })
        .collect();
    let total = raw
        .iter()
        .fold(HermitianOperator::zeros(dim), |acc, a| &acc + a);
    let w = pinv_psd(&sqrt_psd(&total).unwrap(), 1e-14).unwrap();
    Povm::new(raw.iter().map(|a| a.sandwich(&w)).collect()).expect("normalized POVM")
}

/// `(1 + ||p_1 rho_1 - p_2 rho_2||_1) / 2`, trace norm via singular values.
pub fn helstrom_oracle(e: &StateEnsemble) -> f64 {
    let (p, s) = (e.priors(), e.states());
    let diff = s[0].matrix().scale(p[0]) - s[1].matrix().scale(p[1]);
    0.5 * (1.0 + diff.singular_values().sum())
}
