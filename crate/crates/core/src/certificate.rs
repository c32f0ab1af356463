//! Optimality certificates for candidate POVMs.
//!
//! Given a POVM, the multipliers are reconstructed from
//!
//! ```text
//! a P_I = Tr[L Pi_0]
//! L     = sum_j p_j rho_j Pi_j + a sigma Pi_0
//! ```
//!
//! and then the stationarity conditions `(L - p_j rho_j) Pi_j = 0`,
//! `(L - a sigma) Pi_0 = 0` and the positivity conditions `L - p_j rho_j >= 0`,
//! `L - a sigma >= 0` are measured. When all hold, `Tr[L] - a P_I` is an upper
//! bound on the success rate of every POVM with the same inconclusive rate and
//! the candidate attains it.
//!
//! When `Pi_0` is a projector orthogonal to the conclusive elements the first
//! equation reads `0 = 0 a` and leaves `a` free; `a` is then chosen to maximize
//! the smallest positivity margin, which is concave in `a`.
//!
//! Positivity is sufficient for optimality; a negative margin is reported but
//! is not taken as proof of suboptimality.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::ensemble::StateEnsemble;
use crate::hermitian::{min_eigenvalue, trace_of_product, trace_product, HermitianOperator};
use crate::solver::{success_and_inconclusive, Povm};
use crate::{Error, Result};

/// Default bound on the stationarity residuals.
pub const DEFAULT_TOL_EXTREMAL: f64 = 1e-8;
/// Default slack on the positivity margins (margins must be `>= -tol`).
pub const DEFAULT_TOL_POSITIVITY: f64 = 1e-9;

/// Below this inconclusive rate the scalar multiplier is not defined.
const PI_FLOOR: f64 = 1e-12;
/// `P_I - Tr[sigma Pi_0^2]` below this fraction of `P_I` leaves `a` undetermined.
const DEGENERATE_TOL: f64 = 1e-10;
const GOLDEN_STEPS: usize = 100;

/// Multipliers reconstructed from a POVM.
#[derive(Clone, Debug)]
pub struct Multipliers {
    pub lambda: HermitianOperator,
    /// `None` when `P_I` is (numerically) zero.
    pub a: Option<f64>,
    /// Frobenius norm of the anti-Hermitian part dropped from `L`.
    pub anti_hermitian_residual: f64,
}

impl Multipliers {
    /// `Tr[L] - a P_I`, the upper bound on `P_S` at inconclusive rate `pi`.
    pub fn dual_bound(&self, pi: f64) -> f64 {
        self.lambda.trace() - self.a.unwrap_or(0.0) * pi
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    #[serde(skip)]
    pub lambda: HermitianOperator,
    pub a: Option<f64>,
    /// Index 0 is the inconclusive condition.
    pub extremal_residuals: Vec<f64>,
    /// Index 0 is `None` when `a` is not defined.
    pub positivity_margins: Vec<Option<f64>>,
    pub dual_bound: f64,
    pub success_rate: f64,
    pub inconclusive_rate: f64,
    pub anti_hermitian_residual: f64,
    pub tol_extremal: f64,
    pub tol_positivity: f64,
    pub optimal: bool,
}

impl Certificate {
    pub fn max_extremal_residual(&self) -> f64 {
        self.extremal_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_positivity_margin(&self) -> f64 {
        self.positivity_margins
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `P_S - (Tr[L] - a P_I)`; zero at certified optima.
    pub fn duality_gap(&self) -> f64 {
        self.success_rate - self.dual_bound
    }
}

fn product(a: &HermitianOperator, b: &HermitianOperator) -> DMatrix<Complex64> {
    a.matrix() * b.matrix()
}

/// Solves the multiplier equations for a candidate POVM.
pub fn multipliers_from_povm(e: &StateEnsemble, povm: &Povm) -> Result<Multipliers> {
    if povm.elements().len() != e.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "POVM has {} elements, ensemble needs {}",
            povm.elements().len(),
            e.len() + 1
        )));
    }
    if povm.dim() != e.dim() {
        return Err(Error::DimensionMismatch(povm.dim(), e.dim()));
    }
    let sigma = e.average_state();
    let pi0 = povm.inconclusive();
    let pi = trace_product(&sigma, pi0)?;

    // sum_j p_j rho_j Pi_j
    let mut conclusive = DMatrix::<Complex64>::zeros(e.dim(), e.dim());
    for ((p, rho), el) in e.iter().zip(&povm.elements()[1..]) {
        conclusive += product(rho, el) * Complex64::new(p, 0.0);
    }

    let (raw, a) = if pi <= PI_FLOOR {
        (conclusive, None)
    } else {
        let quadratic = trace_of_product(&product(&sigma, pi0), pi0.matrix()).re;
        let denom = pi - quadratic;
        let numerator = trace_of_product(&conclusive, pi0.matrix()).re;
        let a = if denom.abs() > DEGENERATE_TOL * pi {
            numerator / denom
        } else if numerator.abs() <= DEGENERATE_TOL {
            let ps = conclusive.trace().re;
            most_positive_a(e, &sigma, &conclusive, pi0, ps / (1.0 - pi).max(PI_FLOOR))?
        } else {
            return Err(Error::SingularMultiplier { pi, quadratic });
        };
        let raw = conclusive + product(&sigma, pi0) * Complex64::new(a, 0.0);
        (raw, Some(a))
    };
    let (lambda, anti) = HermitianOperator::hermitian_part(raw);
    if anti > 0.0 {
        log::debug!("dropped anti-Hermitian part of norm {anti:e} from the multiplier");
    }
    Ok(Multipliers {
        lambda,
        a,
        anti_hermitian_residual: anti,
    })
}

/// Smallest eigenvalue of `L(a) - a sigma` and `L(a) - p_j rho_j` with
/// `L(a) = conclusive + a sigma Pi_0`, Hermitized.
fn smallest_margin(
    e: &StateEnsemble,
    sigma: &HermitianOperator,
    conclusive: &DMatrix<Complex64>,
    pi0: &HermitianOperator,
    a: f64,
) -> Result<f64> {
    let raw = conclusive + product(sigma, pi0) * Complex64::new(a, 0.0);
    let (lambda, _) = HermitianOperator::hermitian_part(raw);
    let mut margin = min_eigenvalue(&(&lambda - &sigma.scaled(a)))?;
    for (p, rho) in e.iter() {
        margin = margin.min(min_eigenvalue(&(&lambda - &rho.scaled(p)))?);
    }
    Ok(margin)
}

/// Golden-section search for the `a` in `[0, upper]` maximizing the smallest
/// positivity margin. Any feasible `a` obeys `a <= P_RS`, since
/// `L >= a sigma` gives `a <= Tr[L] = P_S + a P_I`.
fn most_positive_a(
    e: &StateEnsemble,
    sigma: &HermitianOperator,
    conclusive: &DMatrix<Complex64>,
    pi0: &HermitianOperator,
    upper: f64,
) -> Result<f64> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let f = |a: f64| smallest_margin(e, sigma, conclusive, pi0, a);
    let (mut lo, mut hi) = (0.0, upper.max(0.0));
    let (mut x1, mut x2) = (hi - ratio * (hi - lo), lo + ratio * (hi - lo));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Certificate with the default tolerances.
pub fn check_default(e: &StateEnsemble, povm: &Povm) -> Result<Certificate> {
    check(e, povm, DEFAULT_TOL_EXTREMAL, DEFAULT_TOL_POSITIVITY)
}

/// Measures the stationarity and positivity conditions. `optimal` is set iff
/// every residual is `<= tol_extremal` and every margin is `>= -tol_positivity`.
pub fn check(
    e: &StateEnsemble,
    povm: &Povm,
    tol_extremal: f64,
    tol_positivity: f64,
) -> Result<Certificate> {
    let m = multipliers_from_povm(e, povm)?;
    let sigma = e.average_state();
    let (ps, pi) = success_and_inconclusive(e, povm)?;

    let mut extremal_residuals = Vec::with_capacity(e.len() + 1);
    let mut positivity_margins = Vec::with_capacity(e.len() + 1);

    let pi0 = povm.inconclusive();
    let shifted0 = &m.lambda - &sigma.scaled(m.a.unwrap_or(0.0));
    if pi0.frobenius_norm() == 0.0 {
        // inactive constraint
        extremal_residuals.push(0.0);
    } else {
        extremal_residuals.push(product(&shifted0, pi0).norm());
    }
    positivity_margins.push(match m.a {
        Some(_) => Some(min_eigenvalue(&shifted0)?),
        None => None,
    });

    for ((p, rho), el) in e.iter().zip(&povm.elements()[1..]) {
        let shifted = &m.lambda - &rho.scaled(p);
        extremal_residuals.push(product(&shifted, el).norm());
        positivity_margins.push(Some(min_eigenvalue(&shifted)?));
    }

    let dual_bound = m.dual_bound(pi);
    let optimal = extremal_residuals.iter().all(|&r| r <= tol_extremal)
        && positivity_margins
            .iter()
            .flatten()
            .all(|&g| g >= -tol_positivity);
    Ok(Certificate {
        lambda: m.lambda,
        a: m.a,
        extremal_residuals,
        positivity_margins,
        dual_bound,
        success_rate: ps,
        inconclusive_rate: pi,
        anti_hermitian_residual: m.anti_hermitian_residual,
        tol_extremal,
        tol_positivity,
        optimal,
    })
}
