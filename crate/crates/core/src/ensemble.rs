//! Problem data: states `rho_j` sent with prior probabilities `p_j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::hermitian::{eig_hermitian, trace_product, HermitianOperator, PSD_TOL};
use crate::{Error, Result};

/// Tolerance on `|Tr rho - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance on `|sum_j p_j - 1|`.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// A positive semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianOperator);

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let dev = op.trace() - 1.0;
        if dev.abs() > TRACE_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "trace deviates by {}",
                dev.abs()
            )));
        }
        let min = eig_hermitian(&op)?.min();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self(op))
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Self::new(HermitianOperator::outer(psi).scaled(1.0 / norm2))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_op(self) -> HermitianOperator {
        self.0
    }
}

/// What went wrong with an ensemble, with the measured residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation {
    TooFewStates {
        count: usize,
    },
    PriorCount {
        priors: usize,
        states: usize,
    },
    NonPositivePrior {
        index: usize,
        value: f64,
    },
    PriorSum {
        sum: f64,
    },
    Dimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    Trace {
        index: usize,
        deviation: f64,
    },
    NotPsd {
        index: usize,
        min_eigenvalue: f64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::TooFewStates { count } => write!(f, "need at least 2 states, got {count}"),
            Violation::PriorCount { priors, states } => {
                write!(f, "{priors} priors for {states} states")
            }
            Violation::NonPositivePrior { index, value } => {
                write!(f, "prior {index} is not positive ({value})")
            }
            Violation::PriorSum { sum } => write!(f, "priors sum to {sum}"),
            Violation::Dimension {
                index,
                expected,
                found,
            } => {
                write!(
                    f,
                    "state {index} has dimension {found}, expected {expected}"
                )
            }
            Violation::Trace { index, deviation } => {
                write!(f, "state {index}: trace deviates by {deviation}")
            }
            Violation::NotPsd {
                index,
                min_eigenvalue,
            } => {
                write!(f, "state {index}: min eigenvalue {min_eigenvalue}")
            }
        }
    }
}

/// Result of [`StateEnsemble::validate`]; empty iff the ensemble is valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// `N` states of a common dimension with their prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct StateEnsemble {
    states: Vec<HermitianOperator>,
    priors: Vec<f64>,
}

impl StateEnsemble {
    /// Builds and validates an ensemble. Priors are never renormalized.
    pub fn new(states: Vec<HermitianOperator>, priors: Vec<f64>) -> Result<Self> {
        let e = Self::from_parts_unchecked(states, priors);
        let report = e.validate();
        if !report.is_valid() {
            return Err(Error::InvalidEnsemble(report.to_string()));
        }
        Ok(e)
    }

    /// Wraps the raw data without checking it; pair with [`Self::validate`].
    pub fn from_parts_unchecked(states: Vec<HermitianOperator>, priors: Vec<f64>) -> Self {
        Self { states, priors }
    }

    pub fn from_density_matrices(states: Vec<DensityMatrix>, priors: Vec<f64>) -> Result<Self> {
        Self::new(
            states.into_iter().map(DensityMatrix::into_op).collect(),
            priors,
        )
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.states.len();
        if n < 2 {
            violations.push(Violation::TooFewStates { count: n });
        }
        if self.priors.len() != n {
            violations.push(Violation::PriorCount {
                priors: self.priors.len(),
                states: n,
            });
        }
        for (index, &value) in self.priors.iter().enumerate() {
            if !(value > 0.0) {
                violations.push(Violation::NonPositivePrior { index, value });
            }
        }
        let sum: f64 = self.priors.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOL {
            violations.push(Violation::PriorSum { sum });
        }
        let expected = self.states.first().map_or(0, HermitianOperator::dim);
        for (index, s) in self.states.iter().enumerate() {
            if s.dim() != expected {
                violations.push(Violation::Dimension {
                    index,
                    expected,
                    found: s.dim(),
                });
                continue;
            }
            let deviation = s.trace() - 1.0;
            if deviation.abs() > TRACE_TOL {
                violations.push(Violation::Trace {
                    index,
                    deviation: deviation.abs(),
                });
            }
            match eig_hermitian(s) {
                Ok(eig) if eig.min() < -PSD_TOL => violations.push(Violation::NotPsd {
                    index,
                    min_eigenvalue: eig.min(),
                }),
                Ok(_) => {}
                Err(_) => violations.push(Violation::NotPsd {
                    index,
                    min_eigenvalue: f64::NAN,
                }),
            }
        }
        ValidationReport { violations }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `(p_j, rho_j)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &HermitianOperator)> {
        self.priors.iter().copied().zip(self.states.iter())
    }

    /// `sigma = sum_j p_j rho_j`.
    pub fn average_state(&self) -> HermitianOperator {
        self.iter()
            .fold(HermitianOperator::zeros(self.dim()), |acc, (p, rho)| {
                &acc + &rho.scaled(p)
            })
    }

    /// Overlap matrix `O_jk = Tr[rho_j rho_k]` and purities `P_j = O_jj`.
    pub fn overlaps_and_purities(&self) -> Result<(DMatrix<f64>, Vec<f64>)> {
        let n = self.len();
        let mut o = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let v = trace_product(&self.states[j], &self.states[k])?;
                o[(j, k)] = v;
                o[(k, j)] = v;
            }
        }
        let purities = (0..n).map(|j| o[(j, j)]).collect();
        Ok((o, purities))
    }
}

/// `cos(angle/2)|0> + sign * sin(angle/2)|1>`.
pub fn symmetric_qubit_vector(angle: f64, sign: f64) -> [Complex64; 2] {
    [
        Complex64::new((angle / 2.0).cos(), 0.0),
        Complex64::new(sign * (angle / 2.0).sin(), 0.0),
    ]
}

/// Two qubit states `eta |psi_±><psi_±| + (1 - eta)/2 * 1` placed symmetrically
/// about the z axis at half-angle `theta/2`, with equal priors.
///
/// `theta = pi/2` is accepted and yields orthogonal states when `eta = 1`.
pub fn symmetric_qubit_pair(eta: f64, theta: f64) -> Result<StateEnsemble> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eta must lie in (0, 1], got {eta}"
        )));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, pi/2], got {theta}"
        )));
    }
    let mixed = HermitianOperator::identity(2).scaled((1.0 - eta) / 2.0);
    let states = [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let pure = HermitianOperator::outer(&symmetric_qubit_vector(theta, sign));
            &pure.scaled(eta) + &mixed
        })
        .collect();
    StateEnsemble::new(states, vec![0.5, 0.5])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn ket(v: &[f64]) -> HermitianOperator {
        let v: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        HermitianOperator::outer(&v)
    }

    fn orthogonal_pair() -> StateEnsemble {
        StateEnsemble::new(vec![ket(&[1.0, 0.0]), ket(&[0.0, 1.0])], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(orthogonal_pair().validate().is_valid());

        let e = StateEnsemble::from_parts_unchecked(
            vec![ket(&[1.0, 0.0]), ket(&[0.0, 1.0])],
            vec![0.5, 0.6],
        );
        let r = e.validate();
        assert_eq!(r.violations.len(), 1);
        match &r.violations[0] {
            Violation::PriorSum { sum } => assert_abs_diff_eq!(*sum, 1.1, epsilon = 1e-15),
            v => panic!("unexpected {v:?}"),
        }
        assert!(r.to_string().contains("priors sum to 1.1"));

        let e = StateEnsemble::from_parts_unchecked(
            vec![HermitianOperator::diagonal(&[0.9, 0.0]), ket(&[0.0, 1.0])],
            vec![0.5, 0.5],
        );
        let r = e.validate();
        assert_eq!(r.violations.len(), 1);
        match &r.violations[0] {
            Violation::Trace {
                index: 0,
                deviation,
            } => assert_abs_diff_eq!(*deviation, 0.1, epsilon = 1e-15),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn validate_structural_violations() {
        let e = StateEnsemble::from_parts_unchecked(vec![ket(&[1.0, 0.0])], vec![1.0]);
        assert!(matches!(
            e.validate().violations[0],
            Violation::TooFewStates { count: 1 }
        ));

        let e = StateEnsemble::from_parts_unchecked(
            vec![
                ket(&[1.0, 0.0]),
                HermitianOperator::diagonal(&[1.0, 0.0, 0.0]),
            ],
            vec![0.5, 0.5],
        );
        assert!(matches!(
            e.validate().violations[0],
            Violation::Dimension { index: 1, .. }
        ));

        let e = StateEnsemble::from_parts_unchecked(
            vec![HermitianOperator::diagonal(&[1.5, -0.5]), ket(&[0.0, 1.0])],
            vec![1.0, 0.0],
        );
        let r = e.validate();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonPositivePrior { index: 1, .. })));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotPsd { index: 0, .. })));
        assert!(StateEnsemble::new(e.states().to_vec(), e.priors().to_vec()).is_err());
    }

    #[test]
    fn average_state_examples() {
        let rho = HermitianOperator::diagonal(&[0.25, 0.75]);
        let e = StateEnsemble::new(vec![rho.clone(), rho.clone()], vec![0.3, 0.7]).unwrap();
        assert!(e.average_state().distance(&rho) < 1e-15);

        assert!(
            orthogonal_pair()
                .average_state()
                .distance(&HermitianOperator::diagonal(&[0.5, 0.5]))
                < 1e-15
        );

        let (eta, theta) = (0.9, FRAC_PI_4);
        let sigma = symmetric_qubit_pair(eta, theta).unwrap().average_state();
        let expected = HermitianOperator::diagonal(&[
            (1.0 + eta * theta.cos()) / 2.0,
            (1.0 - eta * theta.cos()) / 2.0,
        ]);
        assert!(sigma.distance(&expected) < 1e-15);
    }

    #[test]
    fn overlaps_examples() {
        let (o, p) = orthogonal_pair().overlaps_and_purities().unwrap();
        assert_eq!(p, vec![1.0, 1.0]);
        assert_abs_diff_eq!(o[(0, 1)], 0.0);

        let m = HermitianOperator::diagonal(&[0.5, 0.5]);
        let e = StateEnsemble::new(vec![m.clone(), m], vec![0.5, 0.5]).unwrap();
        let (o, p) = e.overlaps_and_purities().unwrap();
        assert_abs_diff_eq!(p[0], 0.5);
        assert_abs_diff_eq!(o[(0, 1)], 0.5);
    }

    #[test]
    fn symmetric_pair_invariants() {
        // Bloch vectors eta(±sin θ, 0, cos θ): P = (1 + eta²)/2, O = (1 + eta² cos 2θ)/2
        let (eta, theta) = (0.9, FRAC_PI_4);
        let e = symmetric_qubit_pair(eta, theta).unwrap();
        let (o, p) = e.overlaps_and_purities().unwrap();
        assert_abs_diff_eq!(p[0], 0.905, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.905, epsilon = 1e-14);
        let brute = (1.0 + eta * eta * (theta.cos().powi(2) - theta.sin().powi(2))) / 2.0;
        assert_abs_diff_eq!(o[(0, 1)], brute, epsilon = 1e-14);
        assert_abs_diff_eq!(o[(0, 1)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn symmetric_pair_examples() {
        let e = symmetric_qubit_pair(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(
            trace_product(&e.states()[0], &e.states()[1]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(e.states()[0].distance(&ket(&[s, s])) < 1e-15);
        assert!(e.states()[1].distance(&ket(&[s, -s])) < 1e-15);

        assert!(symmetric_qubit_pair(0.0, FRAC_PI_4).is_err());
        assert!(symmetric_qubit_pair(1.1, FRAC_PI_4).is_err());
        assert!(symmetric_qubit_pair(0.5, 0.0).is_err());
        assert!(symmetric_qubit_pair(0.5, 1.6).is_err());
    }

    #[test]
    fn density_matrix_checks() {
        assert!(DensityMatrix::new(HermitianOperator::diagonal(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(HermitianOperator::diagonal(&[0.5, 0.4])).is_err());
        assert!(matches!(
            DensityMatrix::new(HermitianOperator::diagonal(&[1.2, -0.2])),
            Err(Error::NotPsd(_))
        ));
        let d = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(d.op().trace(), 1.0, epsilon = 1e-15);
    }
}
