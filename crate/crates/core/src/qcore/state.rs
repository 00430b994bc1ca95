use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::{jacobi_eigh, Eigen};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Maximum entrywise `|A − A†|` accepted for Hermitian operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum `|Tr ρ − 1|` accepted for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for density matrices.
pub const POSITIVITY_TOL: f64 = -1e-10;
/// Maximum `|‖ψ‖² − 1|` accepted for pure states.
pub const NORM_TOL: f64 = 1e-10;

/// Hermitian matrix; Hamiltonians and observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "operator is not Hermitian: max |A - A^dagger| = {dev:.3e} exceeds {HERMITIAN_TOL:e}"
            )));
        }
        Ok(HermitianOperator(matrix))
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        HermitianOperator(matrix)
    }

    pub fn diagonal(energies: &[f64]) -> Self {
        HermitianOperator(ComplexMatrix::from_real_diagonal(energies))
    }

    pub fn zero(dim: usize) -> Self {
        HermitianOperator(ComplexMatrix::zeros(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eig(&self) -> Result<Eigen> {
        jacobi_eigh(&self.0)
    }

    /// `Tr[ρ A]`, real for Hermitian `A`.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.0.trace_product(rho.matrix()).re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator(self.0.scale_real(s))
    }
}

impl TryFrom<ComplexMatrix> for HermitianOperator {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianOperator::new(m)
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.0
    }
}

/// Trace-one positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian: max |rho - rho^dagger| = {dev:.3e} exceeds {HERMITIAN_TOL:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace {:.12} differs from 1 by more than {TRACE_TOL:e}",
                tr.re
            )));
        }
        let min = jacobi_eigh(&matrix)?.values[0];
        if min < POSITIVITY_TOL {
            return Err(Error::Validation(format!(
                "density matrix has eigenvalue {min:.3e} below {POSITIVITY_TOL:e}"
            )));
        }
        Ok(DensityMatrix(matrix))
    }

    /// Wraps a matrix without validation. Intended for integrator output whose
    /// trace and positivity are monitored by the caller.
    pub fn new_unchecked(matrix: ComplexMatrix) -> Self {
        DensityMatrix(matrix)
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(populations))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        DensityMatrix(ComplexMatrix::unit(dim, k, k))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eig(&self) -> Result<Eigen> {
        jacobi_eigh(&self.0)
    }

    pub fn as_operator(&self) -> HermitianOperator {
        HermitianOperator(self.0.clone())
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(self.0.kron(&other.0))
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> DensityMatrix {
        DensityMatrix(&(u * &self.0) * &u.adjoint())
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.0
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(Vec<Complex64>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Validation(
                "pure state must have positive dimension".into(),
            ));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "pure state norm^2 {norm2:.12} differs from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(PureState(amplitudes))
    }

    pub(crate) fn new_unchecked(amplitudes: Vec<Complex64>) -> Self {
        PureState(amplitudes)
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        PureState(v)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        let mut v = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                v.push(a * b);
            }
        }
        PureState(v)
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::outer(&self.0, &self.0))
    }
}
