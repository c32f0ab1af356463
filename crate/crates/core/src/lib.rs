//! # povmlab
//!
//! Optimal generalized measurements (POVMs) for discriminating `N` mixed
//! quantum states when a fixed fraction `P_I` of inconclusive outcomes is
//! allowed. At `P_I = 0` the problem reduces to minimum-error (Helstrom)
//! discrimination; as `P_I` grows the relative success rate
//! `P_RS = P_S / (1 - P_I)` rises towards a plateau, reaching the
//! unambiguous-discrimination limit `P_RS = 1` for linearly independent pure
//! states.
//!
//! ## Modules
//!
//! - [`hermitian`]: dense complex Hermitian primitives (spectral decomposition,
//!   PSD square root, pseudoinverse).
//! - [`ensemble`]: the problem data `{rho_j, p_j}` and its validation.
//! - [`solver`]: the symmetrized self-consistent fixed-point iteration with a
//!   bisection for the scalar multiplier.
//! - [`certificate`]: multiplier reconstruction, stationarity residuals and
//!   the sufficient optimality conditions with the associated dual bound.
//! - [`bounds`]: the maximal achievable relative success rate.
//! - [`qubit_analytic`]: the closed-form solution for two symmetric mixed
//!   qubits, used as an oracle.
//! - [`io`]: the JSON file formats and full-precision number output.
//! - [`cli`]: command implementations behind the `povmlab` binary.
//!
//! ## Quick example
//!
//! ```
//! use povmlab::ensemble::symmetric_qubit_pair;
//! use povmlab::solver::{solve, SolverConfig};
//!
//! let ensemble = symmetric_qubit_pair(0.9, std::f64::consts::FRAC_PI_4).unwrap();
//! let result = solve(&ensemble, 0.3, &SolverConfig::default()).unwrap();
//! assert!(result.converged);
//! assert!((result.inconclusive_rate - 0.3).abs() < 1e-10);
//! assert!(result.relative_success_rate > 0.8);
//! ```

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certificate;
pub mod cli;
pub mod ensemble;
pub mod hermitian;
pub mod io;
pub mod qubit_analytic;
pub mod solver;

pub use num_complex::Complex64;

use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace of a product of Hermitian operators has imaginary part {0:e}")]
    ComplexTrace(f64),

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("target inconclusive rate {target} is not reachable (supremum reached {supremum})")]
    InfeasibleTarget { target: f64, supremum: f64 },

    #[error("relative success rate is undefined for inconclusive rate {0}")]
    UndefinedRelativeRate(f64),

    #[error("multiplier equation is singular (P_I = {pi}, Tr[sigma Pi0 Pi0] = {quadratic})")]
    SingularMultiplier { pi: f64, quadratic: f64 },

    #[error("average state is singular (min eigenvalue {0:e})")]
    SingularAverageState(f64),

    #[error("numerical kernel is empty (smallest relative eigenvalue {0:e})")]
    EmptyKernel(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
