//! The plateau of the relative success rate.
//!
//! Once `Pi_0` is positive definite the stationarity condition forces
//! `L = a sigma`, and `P_RS = a`. A conclusive outcome for state `j` then has
//! to live in the kernel of `a sigma - p_j rho_j`, so the largest attainable
//! `a` is
//!
//! ```text
//! a_j = p_j * max eig(sigma^-1/2 rho_j sigma^-1/2),    P_RS,max = max_j a_j.
//! ```

use serde::Serialize;

use crate::ensemble::StateEnsemble;
use crate::hermitian::{eig_hermitian, trace_product, HermitianOperator};
use crate::{Error, Result};

/// `sigma` counts as singular when its smallest eigenvalue is at or below this.
pub const SINGULAR_SIGMA_TOL: f64 = 1e-12;
/// Relative eigenvalue threshold defining the numerical kernel.
pub const KERNEL_TOL: f64 = 1e-9;
/// Accepted disagreement between the quadratic root and the eigenvalue route.
pub const ROOT_MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauBound {
    pub prs_max: f64,
    pub per_state_a: Vec<f64>,
    /// Index `j*` (0-based) of the state attaining `prs_max`; first on ties.
    pub argmax_state: usize,
    /// Multiplicity of the top eigenvalue of `sigma^-1/2 rho_j* sigma^-1/2`.
    pub kernel_dimension: usize,
}

fn inverse_sqrt_sigma(e: &StateEnsemble) -> Result<HermitianOperator> {
    let eig = eig_hermitian(&e.average_state())?;
    if eig.min() <= SINGULAR_SIGMA_TOL {
        return Err(Error::SingularAverageState(eig.min()));
    }
    Ok(eig.map(|r| 1.0 / r.sqrt()))
}

pub fn max_relative_success(e: &StateEnsemble) -> Result<PlateauBound> {
    let w = inverse_sqrt_sigma(e)?;
    let mut per_state_a = Vec::with_capacity(e.len());
    let mut multiplicities = Vec::with_capacity(e.len());
    for (p, rho) in e.iter() {
        let eig = eig_hermitian(&rho.sandwich(&w))?;
        let top = eig.max();
        let mult = eig
            .eigenvalues
            .iter()
            .filter(|&&r| (top - r).abs() <= KERNEL_TOL * top.abs().max(1.0))
            .count();
        per_state_a.push(p * top);
        multiplicities.push(mult);
    }
    let (argmax_state, &prs_max) = per_state_a
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (j, a)| match best {
            Some((_, b)) if b >= a => best,
            _ => Some((j, a)),
        })
        .expect("ensemble has at least one state");
    Ok(PlateauBound {
        prs_max,
        per_state_a,
        argmax_state,
        kernel_dimension: multiplicities[argmax_state],
    })
}

/// Roots of `det[a sigma - p_j rho_j] = 0` for a qubit, written as
/// `(a - p)^2 = a^2 Tr[sigma^2] - 2 a p Tr[sigma rho] + p^2 Tr[rho^2]`.
/// Returns the root that agrees with the eigenvalue route.
pub fn qubit_quadratic_a(e: &StateEnsemble, j: usize) -> Result<f64> {
    if e.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "quadratic route needs qubits, got dim {}",
            e.dim()
        )));
    }
    if j >= e.len() {
        return Err(Error::InvalidParameter(format!(
            "state index {j} out of range"
        )));
    }
    let eigen_route = max_relative_success(e)?.per_state_a[j];

    let sigma = e.average_state();
    let rho = &e.states()[j];
    let p = e.priors()[j];
    let s = trace_product(&sigma, &sigma)?;
    let t = trace_product(&sigma, rho)?;
    let q = trace_product(rho, rho)?;
    // a^2 (1 - S) - 2 a p (1 - T) + p^2 (1 - P) = 0
    let qa = 1.0 - s;
    let qb = -2.0 * p * (1.0 - t);
    let qc = p * p * (1.0 - q);
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let roots = [
        (-qb + disc.sqrt()) / (2.0 * qa),
        (-qb - disc.sqrt()) / (2.0 * qa),
    ];
    roots
        .into_iter()
        .min_by(|x, y| (x - eigen_route).abs().total_cmp(&(y - eigen_route).abs()))
        .filter(|r| (r - eigen_route).abs() <= ROOT_MATCH_TOL)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "quadratic roots {roots:?} disagree with eigenvalue route {eigen_route}"
            ))
        })
}

/// `P_RS,max = (1 + sqrt((P - O) / (2 - P - O))) / 2` for two equal-prior
/// qubit states of common purity `P` and overlap `O`.
pub fn prs_max_from_invariants(purity: f64, overlap: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(0.5 - SLACK..=1.0 + SLACK).contains(&purity) {
        return Err(Error::InvalidParameter(format!(
            "purity must lie in [1/2, 1], got {purity}"
        )));
    }
    if !(overlap <= purity + SLACK) {
        return Err(Error::InvalidParameter(format!(
            "overlap {overlap} exceeds purity {purity}"
        )));
    }
    let denom = 2.0 - purity - overlap;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "2 - P - O must be > 0, got {denom}"
        )));
    }
    let ratio = ((purity - overlap) / denom).max(0.0);
    Ok(0.5 * (1.0 + ratio.sqrt()))
}

/// Projector onto the kernel of `a sigma - p_j* rho_j*` at `a = prs_max`: the
/// direction of the conclusive element for `j*` on the plateau. Eigenvalues
/// within `KERNEL_TOL * prs_max * max eig(sigma)` of zero span the kernel.
pub fn plateau_povm_direction(
    e: &StateEnsemble,
    bound: &PlateauBound,
) -> Result<HermitianOperator> {
    let j = bound.argmax_state;
    if j >= e.len() {
        return Err(Error::InvalidParameter(format!(
            "state index {j} out of range"
        )));
    }
    let sigma = e.average_state();
    let m = &sigma.scaled(bound.prs_max) - &e.states()[j].scaled(e.priors()[j]);
    let eig = eig_hermitian(&m)?;
    // relative to the size of the two terms, so an exactly cancelling pair is all kernel
    let scale = bound.prs_max * eig_hermitian(&sigma)?.max();
    let smallest = eig
        .eigenvalues
        .iter()
        .map(|r| r.abs() / scale)
        .fold(f64::INFINITY, f64::min);
    if smallest > KERNEL_TOL {
        return Err(Error::EmptyKernel(smallest));
    }
    Ok(eig.map(|r| {
        if r.abs() <= KERNEL_TOL * scale {
            1.0
        } else {
            0.0
        }
    }))
}
