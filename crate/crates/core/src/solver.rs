//! Optimal POVM for a fixed inconclusive fraction via the symmetrized
//! self-consistent iteration
//!
//! ```text
//! Pi_j <- p_j^2 L^-1 rho_j Pi_j rho_j L^-1          (j = 1..N)
//! Pi_0 <- a^2   L^-1 sigma Pi_0 sigma L^-1
//! L     = [ sum_j p_j^2 rho_j Pi_j rho_j + a^2 sigma Pi_0 sigma ]^(1/2)
//! ```
//!
//! Every update is a congruence of a PSD operator, so positivity holds by
//! construction, and the outcomes sum to `L^-1 L^2 L^-1`, the projector onto
//! the support of `L`. The scalar `a` is fixed at each sweep by bisection so
//! that the updated `Pi_0` has exactly the requested `Tr[sigma Pi_0]`.

use serde::Serialize;

use crate::ensemble::StateEnsemble;
use crate::hermitian::{
    eig_hermitian, pinv_psd, sqrt_psd, support_projector, trace_product, HermitianOperator,
    DEFAULT_PINV_CUTOFF,
};
use crate::{Error, Result};

/// Closure residual allowed per unit of dimension.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Smallest eigenvalue allowed for a POVM element.
pub const ELEMENT_PSD_TOL: f64 = 1e-9;
/// `P_RS` is undefined once `P_I >= 1 - RELATIVE_RATE_GUARD`.
pub const RELATIVE_RATE_GUARD: f64 = 1e-12;

/// Upper end of the bracket search for `a`.
const MAX_BRACKET: f64 = 1_152_921_504_606_846_976.0; // 2^60

/// A measurement with `N + 1` outcomes; element 0 is the inconclusive one.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

/// Closure and positivity diagnostics for a candidate POVM.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PovmReport {
    /// `|sum_j Pi_j - 1|_F`.
    pub closure_residual: f64,
    pub min_eigenvalues: Vec<f64>,
    pub violations: Vec<String>,
}

impl PovmReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Povm {
    /// Validates closure and positivity.
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let p = Self::from_elements_unchecked(elements);
        let report = p.check()?;
        if !report.is_valid() {
            return Err(Error::InvalidParameter(report.violations.join("; ")));
        }
        Ok(p)
    }

    pub fn from_elements_unchecked(elements: Vec<HermitianOperator>) -> Self {
        Self { elements }
    }

    pub fn check(&self) -> Result<PovmReport> {
        let mut violations = Vec::new();
        if self.elements.len() < 2 {
            violations.push(format!(
                "need at least 2 elements, got {}",
                self.elements.len()
            ));
        }
        let d = self.dim();
        if let Some((j, e)) = self.elements.iter().enumerate().find(|(_, e)| e.dim() != d) {
            violations.push(format!(
                "element {j} has dimension {}, expected {d}",
                e.dim()
            ));
            return Ok(PovmReport {
                closure_residual: f64::NAN,
                min_eigenvalues: Vec::new(),
                violations,
            });
        }
        let min_eigenvalues = self
            .elements
            .iter()
            .map(|e| eig_hermitian(e).map(|x| x.min()))
            .collect::<Result<Vec<_>>>()?;
        for (j, &m) in min_eigenvalues.iter().enumerate() {
            if m < -ELEMENT_PSD_TOL {
                violations.push(format!("element {j} has min eigenvalue {m}"));
            }
        }
        let closure_residual = self.closure_residual();
        if closure_residual > CLOSURE_TOL * d as f64 {
            violations.push(format!(
                "elements do not sum to identity (residual {closure_residual})"
            ));
        }
        Ok(PovmReport {
            closure_residual,
            min_eigenvalues,
            violations,
        })
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, j: usize) -> &HermitianOperator {
        &self.elements[j]
    }

    pub fn inconclusive(&self) -> &HermitianOperator {
        &self.elements[0]
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, HermitianOperator::dim)
    }

    /// Number of conclusive outcomes `N`.
    pub fn outcomes(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn sum(&self) -> HermitianOperator {
        self.elements
            .iter()
            .fold(HermitianOperator::zeros(self.dim()), |acc, e| &acc + e)
    }

    pub fn closure_residual(&self) -> f64 {
        self.sum()
            .distance(&HermitianOperator::identity(self.dim()))
    }

    /// Largest Frobenius distance between corresponding elements.
    pub fn max_change(&self, other: &Povm) -> f64 {
        self.elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }
}

/// Extrapolation applied on top of the plain fixed-point map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Acceleration {
    /// Plain iteration of the symmetrized map.
    #[default]
    None,
    /// Squared extrapolation (SQUAREM): two map evaluations, a steplength
    /// extrapolation clamped back onto the PSD cone, then one stabilizing map
    /// evaluation. Every kept iterate is a map output, so closure, positivity
    /// and the inconclusive-rate constraint hold exactly as in plain mode.
    Squarem,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once the max Frobenius change of any element in one sweep is at most this.
    pub povm_tolerance: f64,
    /// Accepted `|P_I(a) - target|` in the bisection for `a`.
    pub bisection_tolerance: f64,
    pub bisection_max_steps: usize,
    pub pinv_cutoff: f64,
    pub acceleration: Acceleration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            povm_tolerance: 1e-12,
            bisection_tolerance: 1e-14,
            bisection_max_steps: 200,
            pinv_cutoff: DEFAULT_PINV_CUTOFF,
            acceleration: Acceleration::None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("povm_tolerance", self.povm_tolerance),
            ("bisection_tolerance", self.bisection_tolerance),
            ("pinv_cutoff", self.pinv_cutoff),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if self.max_iterations == 0 || self.bisection_max_steps == 0 {
            return Err(Error::InvalidParameter(
                "iteration limits must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub povm: Povm,
    pub success_rate: f64,
    pub inconclusive_rate: f64,
    pub relative_success_rate: f64,
    /// Operator multiplier from the last sweep.
    pub lambda: HermitianOperator,
    /// Scalar multiplier from the last sweep; 0 when `target_pi = 0`.
    pub a: f64,
    pub iterations: usize,
    pub final_change: f64,
    pub converged: bool,
    /// Max element change of every sweep, in order.
    pub change_history: Vec<f64>,
}

/// `(P_S, P_I, P_RS)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuccessMetrics {
    pub success_rate: f64,
    pub inconclusive_rate: f64,
    pub relative_success_rate: f64,
}

fn check_target(target_pi: f64) -> Result<()> {
    if !(0.0..1.0).contains(&target_pi) {
        return Err(Error::InvalidParameter(format!(
            "target inconclusive rate must lie in [0, 1), got {target_pi}"
        )));
    }
    Ok(())
}

/// `Pi_0 = t 1`, `Pi_j = (1 - t)/N 1`.
pub fn init_povm(e: &StateEnsemble, target_pi: f64) -> Result<Povm> {
    check_target(target_pi)?;
    let d = e.dim();
    let n = e.len();
    let mut elements = Vec::with_capacity(n + 1);
    elements.push(HermitianOperator::identity(d).scaled(target_pi));
    let share = HermitianOperator::identity(d).scaled((1.0 - target_pi) / n as f64);
    elements.extend(std::iter::repeat_n(share, n));
    Ok(Povm { elements })
}

fn check_shapes(e: &StateEnsemble, povm: &Povm) -> Result<()> {
    if povm.elements.len() != e.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "POVM has {} elements, ensemble needs {}",
            povm.elements.len(),
            e.len() + 1
        )));
    }
    if povm.dim() != e.dim() {
        return Err(Error::DimensionMismatch(povm.dim(), e.dim()));
    }
    Ok(())
}

/// The pieces of `L(a)^2 = states + a^2 inconclusive` that do not depend on `a`.
struct MultiplierSquare {
    sigma: HermitianOperator,
    /// `sum_j p_j^2 rho_j Pi_j rho_j`
    states: HermitianOperator,
    /// `sigma Pi_0 sigma`
    inconclusive: HermitianOperator,
}

impl MultiplierSquare {
    fn new(e: &StateEnsemble, povm: &Povm) -> Self {
        let sigma = e.average_state();
        let states = e
            .iter()
            .zip(&povm.elements[1..])
            .fold(HermitianOperator::zeros(e.dim()), |acc, ((p, rho), pi)| {
                &acc + &pi.sandwich(rho).scaled(p * p)
            });
        let inconclusive = povm.inconclusive().sandwich(&sigma);
        Self {
            sigma,
            states,
            inconclusive,
        }
    }

    fn lambda(&self, a: f64) -> Result<HermitianOperator> {
        sqrt_psd(&(&self.states + &self.inconclusive.scaled(a * a)))
    }

    /// `(P_I(a), L(a))`.
    fn pi(&self, a: f64, cutoff: f64) -> Result<(f64, HermitianOperator)> {
        let lambda = self.lambda(a)?;
        if a == 0.0 {
            return Ok((0.0, lambda));
        }
        let inv = pinv_psd(&lambda, cutoff)?;
        let next_pi0 = self.inconclusive.sandwich(&inv);
        let value = a * a * trace_product(&self.sigma, &next_pi0)?;
        Ok((value, lambda))
    }
}

/// `L(a) = [sum_j p_j^2 rho_j Pi_j rho_j + a^2 sigma Pi_0 sigma]^(1/2)`.
pub fn lambda_of_a(e: &StateEnsemble, povm: &Povm, a: f64) -> Result<HermitianOperator> {
    check_shapes(e, povm)?;
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("a must be >= 0, got {a}")));
    }
    MultiplierSquare::new(e, povm).lambda(a)
}

/// Inconclusive fraction `a^2 Tr[sigma L^-1 sigma Pi_0 sigma L^-1]` that the
/// next iterate would have for this `a`.
pub fn pi_of_a(e: &StateEnsemble, povm: &Povm, a: f64, cfg: &SolverConfig) -> Result<f64> {
    check_shapes(e, povm)?;
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("a must be >= 0, got {a}")));
    }
    Ok(MultiplierSquare::new(e, povm).pi(a, cfg.pinv_cutoff)?.0)
}

/// Finds `a` with `P_I(a) = target_pi` by bracketing and bisection.
pub fn solve_a(
    e: &StateEnsemble,
    povm: &Povm,
    target_pi: f64,
    cfg: &SolverConfig,
) -> Result<(f64, HermitianOperator)> {
    check_shapes(e, povm)?;
    if !(target_pi > 0.0 && target_pi < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bisection needs a target in (0, 1), got {target_pi}"
        )));
    }
    if povm.inconclusive().frobenius_norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "inconclusive element is zero".into(),
        ));
    }
    solve_a_inner(&MultiplierSquare::new(e, povm), target_pi, cfg)
}

fn solve_a_inner(
    sq: &MultiplierSquare,
    target_pi: f64,
    cfg: &SolverConfig,
) -> Result<(f64, HermitianOperator)> {
    let cutoff = cfg.pinv_cutoff;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let (mut hi_val, mut hi_lambda) = sq.pi(hi, cutoff)?;
    let mut best = (hi, hi_lambda.clone(), (hi_val - target_pi).abs());
    while hi_val < target_pi {
        if (hi_val - target_pi).abs() <= cfg.bisection_tolerance {
            return Ok((hi, hi_lambda));
        }
        if hi >= MAX_BRACKET {
            return Err(Error::InfeasibleTarget {
                target: target_pi,
                supremum: hi_val,
            });
        }
        let prev = hi_val;
        lo = hi;
        hi *= 2.0;
        (hi_val, hi_lambda) = sq.pi(hi, cutoff)?;
        if hi_val < prev - 1e-12 {
            log::warn!("P_I(a) decreased while expanding the bracket: {prev} at a={lo}, {hi_val} at a={hi}");
        }
    }
    if (hi_val - target_pi).abs() < best.2 {
        best = (hi, hi_lambda, (hi_val - target_pi).abs());
    }
    for _ in 0..cfg.bisection_max_steps {
        if best.2 <= cfg.bisection_tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (val, lambda) = sq.pi(mid, cutoff)?;
        let resid = (val - target_pi).abs();
        if resid < best.2 {
            best = (mid, lambda, resid);
        }
        if val < target_pi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.2 > cfg.bisection_tolerance {
        log::debug!(
            "bisection stopped with residual {:e} (a = {})",
            best.2,
            best.0
        );
    }
    Ok((best.0, best.1))
}

/// One sweep of the symmetrized map.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub povm: Povm,
    pub lambda: HermitianOperator,
    pub a: f64,
}

/// Applies the symmetrized update once. With `target_pi = 0` the inconclusive
/// element is pinned to zero and `a` is not used.
pub fn iterate_once(
    e: &StateEnsemble,
    povm: &Povm,
    target_pi: f64,
    cfg: &SolverConfig,
) -> Result<Sweep> {
    check_shapes(e, povm)?;
    check_target(target_pi)?;
    let sq = MultiplierSquare::new(e, povm);
    let (a, lambda) = if target_pi == 0.0 {
        (0.0, sq.lambda(0.0)?)
    } else {
        if povm.inconclusive().frobenius_norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "inconclusive element is zero".into(),
            ));
        }
        solve_a_inner(&sq, target_pi, cfg)?
    };
    let inv = pinv_psd(&lambda, cfg.pinv_cutoff)?;
    let d = e.dim();

    let mut elements = Vec::with_capacity(e.len() + 1);
    if target_pi == 0.0 {
        elements.push(HermitianOperator::zeros(d));
    } else {
        elements.push(sq.inconclusive.sandwich(&inv).scaled(a * a));
    }
    for ((p, rho), pi) in e.iter().zip(&povm.elements[1..]) {
        elements.push(pi.sandwich(rho).sandwich(&inv).scaled(p * p));
    }

    // Off the support of L every element vanishes; hand that block to one outcome.
    let support = support_projector(&lambda, cfg.pinv_cutoff)?;
    let deficit = &HermitianOperator::identity(d) - &support;
    if deficit.trace() > 0.5 {
        let slot = if target_pi == 0.0 { 1 } else { 0 };
        elements[slot] = &elements[slot] + &deficit;
    }
    Ok(Sweep {
        povm: Povm { elements },
        lambda,
        a,
    })
}

/// `P_S = sum_j p_j Tr[Pi_j rho_j]` and `P_I = Tr[sigma Pi_0]`.
pub fn success_and_inconclusive(e: &StateEnsemble, povm: &Povm) -> Result<(f64, f64)> {
    check_shapes(e, povm)?;
    let mut ps = 0.0;
    for ((p, rho), pi) in e.iter().zip(&povm.elements[1..]) {
        ps += p * trace_product(pi, rho)?;
    }
    let pi = trace_product(&e.average_state(), povm.inconclusive())?;
    Ok((ps, pi))
}

pub fn relative_success_rate(ps: f64, pi: f64) -> Result<f64> {
    if pi >= 1.0 - RELATIVE_RATE_GUARD {
        return Err(Error::UndefinedRelativeRate(pi));
    }
    Ok(ps / (1.0 - pi))
}

pub fn success_metrics(e: &StateEnsemble, povm: &Povm) -> Result<SuccessMetrics> {
    let (ps, pi) = success_and_inconclusive(e, povm)?;
    Ok(SuccessMetrics {
        success_rate: ps,
        inconclusive_rate: pi,
        relative_success_rate: relative_success_rate(ps, pi)?,
    })
}

/// Iterates to a fixed point. See [`solve_with`] for per-sweep access.
pub fn solve(e: &StateEnsemble, target_pi: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    solve_with(e, target_pi, cfg, |_| {})
}

/// Like [`solve`], calling `observe` with every sweep the iteration keeps.
pub fn solve_with(
    e: &StateEnsemble,
    target_pi: f64,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&Sweep),
) -> Result<SolveResult> {
    cfg.validate()?;
    check_target(target_pi)?;
    let report = e.validate();
    if !report.is_valid() {
        return Err(Error::InvalidEnsemble(report.to_string()));
    }

    let mut current = init_povm(e, target_pi)?;
    let mut last: Option<Sweep> = None;
    let mut history = Vec::new();

    let converged = |h: &[f64]| h.last().is_some_and(|&c| c <= cfg.povm_tolerance);

    while history.len() < cfg.max_iterations && !converged(&history) {
        let s1 = observed_sweep(
            e,
            &current,
            &current,
            target_pi,
            cfg,
            &mut history,
            &mut observe,
        )?;
        if cfg.acceleration == Acceleration::None
            || converged(&history)
            || history.len() + 2 > cfg.max_iterations
        {
            current = s1.povm.clone();
            last = Some(s1);
            continue;
        }
        let s2 = observed_sweep(
            e,
            &s1.povm,
            &s1.povm,
            target_pi,
            cfg,
            &mut history,
            &mut observe,
        )?;
        if converged(&history) {
            current = s2.povm.clone();
            last = Some(s2);
            continue;
        }
        let extrapolated = squarem_point(&current, &s1.povm, &s2.povm);
        match extrapolated.and_then(|x| iterate_once(e, &x, target_pi, cfg)) {
            Ok(s3) => {
                // a stabilizing map evaluation counts as an iteration
                history.push(s3.povm.max_change(&s2.povm));
                observe(&s3);
                current = s3.povm.clone();
                last = Some(s3);
            }
            Err(err) => {
                log::debug!("extrapolated step rejected ({err}); keeping plain iterate");
                current = s2.povm.clone();
                last = Some(s2);
            }
        }
    }

    let last = last.expect("max_iterations >= 1");
    let (ps, pi) = success_and_inconclusive(e, &last.povm)?;
    let final_change = *history.last().expect("at least one sweep");
    Ok(SolveResult {
        success_rate: ps,
        inconclusive_rate: pi,
        relative_success_rate: relative_success_rate(ps, pi)?,
        povm: last.povm,
        lambda: last.lambda,
        a: last.a,
        iterations: history.len(),
        final_change,
        converged: final_change <= cfg.povm_tolerance,
        change_history: history,
    })
}

fn observed_sweep(
    e: &StateEnsemble,
    from: &Povm,
    reference: &Povm,
    target_pi: f64,
    cfg: &SolverConfig,
    history: &mut Vec<f64>,
    observe: &mut impl FnMut(&Sweep),
) -> Result<Sweep> {
    let sweep = iterate_once(e, from, target_pi, cfg)?;
    history.push(sweep.povm.max_change(reference));
    observe(&sweep);
    Ok(sweep)
}

/// `x0 - 2 s r + s^2 v` with `r = x1 - x0`, `v = x2 - 2 x1 + x0`,
/// `s = min(-|r|/|v|, -1)`, each element clamped to the PSD cone.
fn squarem_point(x0: &Povm, x1: &Povm, x2: &Povm) -> Result<Povm> {
    let r: Vec<HermitianOperator> = x1
        .elements
        .iter()
        .zip(&x0.elements)
        .map(|(a, b)| a - b)
        .collect();
    let v: Vec<HermitianOperator> = x2
        .elements
        .iter()
        .zip(&x1.elements)
        .zip(&x0.elements)
        .map(|((c, b), a)| &(c - &b.scaled(2.0)) + a)
        .collect();
    let norm = |xs: &[HermitianOperator]| {
        xs.iter()
            .map(|x| x.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (nr, nv) = (norm(&r), norm(&v));
    let step = if nv > 0.0 { (-nr / nv).min(-1.0) } else { -1.0 };
    let elements = x0
        .elements
        .iter()
        .zip(r.iter().zip(&v))
        .map(|(x, (r, v))| {
            let y = &(x - &r.scaled(2.0 * step)) + &v.scaled(step * step);
            Ok(eig_hermitian(&y)?.map(|ev| ev.max(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Povm { elements })
}
