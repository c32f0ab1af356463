//! Closed-form optimum for two mixed qubits placed symmetrically about the z
//! axis with equal priors and equal purity.
//!
//! The optimal conclusive elements are proportional to the pure projectors
//! `psi_±(phi)` at an angle `phi` in `[pi/2, pi)`, and the inconclusive element
//! is proportional to `|0><0|`. Sweeping `phi` from `pi/2` (minimum error,
//! `P_I = 0`) up to `phi_max` traces the optimal trade-off between `P_RS` and
//! `P_I`; beyond `phi_max` the family stays a valid POVM but is no longer
//! optimal, and the optimal curve is flat at `P_RS,max`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::ensemble::{symmetric_qubit_pair, symmetric_qubit_vector, StateEnsemble};
use crate::hermitian::HermitianOperator;
use crate::solver::Povm;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricQubitProblem {
    eta: f64,
    theta: f64,
}

impl SymmetricQubitProblem {
    /// `eta` in `(0, 1]`, `theta` in `(0, pi/2)`.
    pub fn new(eta: f64, theta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1], got {eta}"
            )));
        }
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in (0, pi/2), got {theta}"
            )));
        }
        Ok(Self { eta, theta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn ensemble(&self) -> Result<StateEnsemble> {
        symmetric_qubit_pair(self.eta, self.theta)
    }

    /// `1 + eta cos(theta)`; `P_I` stays below half of this on the family.
    fn weight(&self) -> f64 {
        1.0 + self.eta * self.theta.cos()
    }

    /// Supremum (not attained) of `P_I` over the analytic family.
    pub fn pi_supremum(&self) -> f64 {
        0.5 * self.weight()
    }

    /// `P_I` at which the optimal curve reaches its plateau.
    pub fn plateau_onset(&self) -> f64 {
        analytic_pi(self, phi_max_and_prs_max(self).0)
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !(FRAC_PI_2..PI).contains(&phi) {
        return Err(Error::InvalidParameter(format!(
            "phi must lie in [pi/2, pi), got {phi}"
        )));
    }
    Ok(())
}

fn inv_tan2_half(phi: f64) -> f64 {
    1.0 / (phi / 2.0).tan().powi(2)
}

/// `Pi_± = psi_±(phi) / (2 sin^2(phi/2))`, `Pi_0 = (1 - cot^2(phi/2)) |0><0|`.
/// Only `phi` enters; the problem selects which ensemble the POVM is meant for.
pub fn analytic_povm(_problem: &SymmetricQubitProblem, phi: f64) -> Result<Povm> {
    check_phi(phi)?;
    let norm = 1.0 / (2.0 * (phi / 2.0).sin().powi(2));
    let pi0 = HermitianOperator::diagonal(&[1.0 - inv_tan2_half(phi), 0.0]);
    let pi1 = HermitianOperator::outer(&symmetric_qubit_vector(phi, 1.0)).scaled(norm);
    let pi2 = HermitianOperator::outer(&symmetric_qubit_vector(phi, -1.0)).scaled(norm);
    Povm::new(vec![pi0, pi1, pi2])
}

/// `P_RS = (1 + eta cos(phi - theta)) / (2 (1 + eta cos(theta) cos(phi)))`.
pub fn analytic_prs(p: &SymmetricQubitProblem, phi: f64) -> f64 {
    (1.0 + p.eta * (phi - p.theta).cos()) / (2.0 * (1.0 + p.eta * p.theta.cos() * phi.cos()))
}

/// `P_I = (1 + eta cos(theta)) (1 - cot^2(phi/2)) / 2`.
pub fn analytic_pi(p: &SymmetricQubitProblem, phi: f64) -> f64 {
    0.5 * p.weight() * (1.0 - inv_tan2_half(phi))
}

/// Inverts [`analytic_pi`]: `tan^2(phi/2) = 1 / (1 - 2 P_I / (1 + eta cos(theta)))`.
/// Fails for `P_I` outside `[0, (1 + eta cos(theta))/2)`.
pub fn phi_for_pi(p: &SymmetricQubitProblem, target_pi: f64) -> Result<f64> {
    if !(target_pi >= 0.0 && target_pi < p.pi_supremum()) {
        return Err(Error::InfeasibleTarget {
            target: target_pi,
            supremum: p.pi_supremum(),
        });
    }
    let tan2 = 1.0 / (1.0 - target_pi / p.pi_supremum());
    Ok(2.0 * tan2.sqrt().atan())
}

/// [`phi_for_pi`] clamped at `phi_max`: the angle of the optimal POVM family
/// member used on the plateau. Accepts any `P_I` in `[0, 1)`.
pub fn phi_for_pi_clamped(p: &SymmetricQubitProblem, target_pi: f64) -> Result<f64> {
    let (phi_max, _) = phi_max_and_prs_max(p);
    if !(0.0..1.0).contains(&target_pi) {
        return Err(Error::InvalidParameter(format!(
            "P_I must lie in [0, 1), got {target_pi}"
        )));
    }
    if target_pi >= p.plateau_onset() {
        return Ok(phi_max);
    }
    Ok(phi_for_pi(p, target_pi)?.min(phi_max))
}

/// `cos(phi_max) = -eta cos(theta)` and
/// `P_RS,max = (1 + eta sin(theta) / sqrt(1 - eta^2 cos^2(theta))) / 2`.
pub fn phi_max_and_prs_max(p: &SymmetricQubitProblem) -> (f64, f64) {
    let c = p.eta * p.theta.cos();
    let phi_max = (-c).acos();
    let prs_max = 0.5 * (1.0 + p.eta * p.theta.sin() / (1.0 - c * c).sqrt());
    (phi_max, prs_max)
}

/// Optimal `P_RS` at inconclusive rate `target_pi`: the analytic curve up to the
/// plateau onset and `P_RS,max` beyond it.
pub fn envelope_prs(p: &SymmetricQubitProblem, target_pi: f64) -> Result<f64> {
    Ok(analytic_prs(p, phi_for_pi_clamped(p, target_pi)?))
}
