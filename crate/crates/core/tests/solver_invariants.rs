mod common;

use std::f64::consts::FRAC_PI_4;

use povmlab::certificate::check_default;
use povmlab::ensemble::{symmetric_qubit_pair, StateEnsemble};
use povmlab::hermitian::{min_eigenvalue, trace_product, HermitianOperator};
use povmlab::qubit_analytic::{envelope_prs, SymmetricQubitProblem};
use povmlab::solver::{solve, solve_with, Acceleration, SolverConfig, Sweep};

/// Closure, positivity and the inconclusive-rate constraint after every sweep.
fn assert_sweep_invariants(e: &StateEnsemble, target: f64, cfg: &SolverConfig) -> usize {
    let sigma = e.average_state();
    let mut sweeps = 0;
    let result = solve_with(e, target, cfg, |s: &Sweep| {
        sweeps += 1;
        let closure = s.povm.sum().distance(&HermitianOperator::identity(e.dim()));
        assert!(closure <= 1e-9 * e.dim() as f64, "closure {closure:e}");
        for el in s.povm.elements() {
            assert!(min_eigenvalue(el).unwrap() >= -1e-9);
        }
        let pi = trace_product(&sigma, s.povm.inconclusive()).unwrap();
        assert!((pi - target).abs() <= 1e-10, "P_I {pi} vs {target}");
    })
    .unwrap();
    assert_eq!(result.iterations, sweeps);
    sweeps
}

#[test]
fn invariants_hold_every_sweep_on_random_ensembles() {
    let mut rng = common::rng(7);
    for (n, d) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3)] {
        let e = common::random_ensemble(&mut rng, n, d);
        for target in [0.0, 0.1, 0.4, 0.8] {
            assert_sweep_invariants(&e, target, &SolverConfig::default());
        }
    }
}

#[test]
fn invariants_hold_with_extrapolation() {
    let e = symmetric_qubit_pair(0.8, FRAC_PI_4).unwrap();
    let cfg = SolverConfig {
        acceleration: Acceleration::Squarem,
        ..SolverConfig::default()
    };
    for target in [0.2, 0.5, 0.7] {
        assert_sweep_invariants(&e, target, &cfg);
    }
}

#[test]
fn helstrom_endpoint_matches_trace_norm() {
    let mut rng = common::rng(11);
    for d in [2, 3] {
        for _ in 0..5 {
            let e = common::random_ensemble(&mut rng, 2, d);
            let r = solve(&e, 0.0, &SolverConfig::default()).unwrap();
            assert!((r.success_rate - common::helstrom_oracle(&e)).abs() <= 1e-8);
            assert_eq!(r.inconclusive_rate, 0.0);
        }
    }
}

#[test]
fn tradeoff_is_monotone_then_flat() {
    let problem = SymmetricQubitProblem::new(0.9, FRAC_PI_4).unwrap();
    let e = problem.ensemble().unwrap();
    let mut last = 0.0;
    for k in 0..=16 {
        let pi = 0.05 * k as f64;
        let r = solve(&e, pi, &SolverConfig::default()).unwrap();
        assert!(
            r.relative_success_rate >= last - 1e-6,
            "P_RS dropped at P_I = {pi}"
        );
        assert!((r.relative_success_rate - envelope_prs(&problem, pi).unwrap()).abs() <= 1e-6);
        last = r.relative_success_rate;
    }
    assert!((last - 0.912514).abs() < 1e-6);
}

#[test]
fn solved_povms_are_certified() {
    let mut rng = common::rng(3);
    for (n, d) in [(2, 2), (3, 3)] {
        let e = common::random_ensemble(&mut rng, n, d);
        for target in [0.0, 0.3] {
            let r = solve(&e, target, &SolverConfig::default()).unwrap();
            if !r.converged {
                continue;
            }
            let c = check_default(&e, &r.povm).unwrap();
            assert!(c.optimal, "n={n} d={d} P_I={target}: {c:?}");
            assert!(c.duality_gap().abs() <= 1e-8);
        }
    }
}

#[test]
fn near_one_target_lands_on_plateau() {
    let e = symmetric_qubit_pair(0.9, FRAC_PI_4).unwrap();
    let r = solve(&e, 0.999, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert!((r.inconclusive_rate - 0.999).abs() < 1e-10);
    assert!((r.relative_success_rate - 0.912514).abs() < 1e-6);
}
