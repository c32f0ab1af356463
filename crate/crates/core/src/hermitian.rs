//! Dense complex Hermitian operators and the spectral routines built on them.
//!
//! Every operator that appears in the discrimination problem (states, POVM
//! elements, the operator multiplier) is Hermitian. [`HermitianOperator`]
//! enforces that at construction so the spectral routines below always work
//! with real eigenvalues.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest entrywise asymmetry `|A_ij - conj(A_ji)|` accepted at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenvalues above `-PSD_TOL` (relative to `max(1, largest |eigenvalue|)`)
/// count as round-off and are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

/// Default relative cutoff for [`pinv_psd`].
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-12;

/// Tolerance on the imaginary part of `Tr[AB]`, relative to `1 + |A|_F |B|_F`.
const TRACE_IMAG_TOL: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_SWEEPS: usize = 10_000;

/// A `dim x dim` complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates Hermiticity and stores the symmetrized matrix `(A + A^H) / 2`.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "operator dimension must be >= 1".into(),
            ));
        }
        let asym = asymmetry(&m);
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::hermitize(m))
    }

    /// Builds an operator from row-major complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Projects an arbitrary square matrix onto its Hermitian part without
    /// checking how far it was from Hermitian.
    pub(crate) fn hermitize(m: DMatrix<Complex64>) -> Self {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self { m: h }
    }

    /// Hermitian part of `m` together with the Frobenius norm of the discarded
    /// anti-Hermitian part.
    pub fn hermitian_part(m: DMatrix<Complex64>) -> (Self, f64) {
        let anti = (&m - m.adjoint()) * Complex64::new(0.5, 0.0);
        (Self::hermitize(m), anti.norm())
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        Self {
            m: DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::new(values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// The rank-one operator `|v><v|` (no normalization applied).
    pub fn outer(v: &[Complex64]) -> Self {
        let d = v.len();
        Self::hermitize(DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(s, 0.0),
        }
    }

    /// `X A X^H`, which is Hermitian (and PSD whenever `A` is).
    pub fn congruence(&self, x: &DMatrix<Complex64>) -> Self {
        Self::hermitize(x * &self.m * x.adjoint())
    }

    /// `B A B` for Hermitian `B`.
    pub fn sandwich(&self, outer: &HermitianOperator) -> Self {
        self.congruence(&outer.m)
    }

    /// Frobenius distance `|A - B|_F`.
    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        (&self.m - &other.m).norm()
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            m: &self.m - &rhs.m,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

/// Largest entrywise deviation `|A_ij - conj(A_ji)|`.
pub fn asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Spectral decomposition `A = sum_k r_k |v_k><v_k|`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: DMatrix<Complex64>,
}

impl EigenDecomposition {
    /// `sum_k f(r_k) |v_k><v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let d = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (k, &r) in self.eigenvalues.iter().enumerate() {
            let fr = Complex64::new(f(r), 0.0);
            for i in 0..d {
                scaled[(i, k)] *= fr;
            }
        }
        HermitianOperator::hermitize(scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|r| r)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("dim >= 1")
    }

    /// Largest eigenvalue magnitude, at least 1; the scale PSD tolerances refer to.
    fn psd_scale(&self) -> f64 {
        self.min().abs().max(self.max().abs()).max(1.0)
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn eig_hermitian(a: &HermitianOperator) -> Result<EigenDecomposition> {
    let eig = SymmetricEigen::try_new(a.m.clone(), EIGEN_EPS, EIGEN_MAX_SWEEPS)
        .ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(a.dim(), a.dim(), |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn check_psd(eig: &EigenDecomposition) -> Result<()> {
    if eig.min() < -PSD_TOL * eig.psd_scale() {
        return Err(Error::NotPsd(eig.min()));
    }
    Ok(())
}

/// Principal square root of a positive semidefinite operator.
pub fn sqrt_psd(a: &HermitianOperator) -> Result<HermitianOperator> {
    let eig = eig_hermitian(a)?;
    check_psd(&eig)?;
    Ok(eig.map(|r| r.max(0.0).sqrt()))
}

/// Moore-Penrose pseudoinverse of a PSD operator. Eigenvalues at or below
/// `cutoff * r_max` are treated as zero; the zero operator maps to itself.
pub fn pinv_psd(a: &HermitianOperator, cutoff: f64) -> Result<HermitianOperator> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pinv cutoff must be > 0, got {cutoff}"
        )));
    }
    let eig = eig_hermitian(a)?;
    check_psd(&eig)?;
    let threshold = cutoff * eig.max();
    if eig.max() <= 0.0 {
        return Ok(HermitianOperator::zeros(a.dim()));
    }
    Ok(eig.map(|r| if r > threshold { 1.0 / r } else { 0.0 }))
}

/// Orthogonal projector onto the eigenvectors whose eigenvalue exceeds
/// `cutoff * r_max`.
pub fn support_projector(a: &HermitianOperator, cutoff: f64) -> Result<HermitianOperator> {
    let eig = eig_hermitian(a)?;
    let threshold = cutoff * eig.max();
    if eig.max() <= 0.0 {
        return Ok(HermitianOperator::zeros(a.dim()));
    }
    Ok(eig.map(|r| if r > threshold { 1.0 } else { 0.0 }))
}

pub fn min_eigenvalue(a: &HermitianOperator) -> Result<f64> {
    Ok(eig_hermitian(a)?.min())
}

/// `Tr[AB]` for Hermitian `A`, `B`; the (real) value of the trace inner product.
pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let t = trace_of_product(a.matrix(), b.matrix());
    let scale = 1.0 + a.frobenius_norm() * b.frobenius_norm();
    if t.im.abs() > TRACE_IMAG_TOL * scale {
        return Err(Error::ComplexTrace(t.im));
    }
    Ok(t.re)
}

/// `Tr[AB]` for general square matrices, without forming the product.
pub fn trace_of_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}
