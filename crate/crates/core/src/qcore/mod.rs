//! Dense complex linear algebra and quantum-state primitives for small
//! Hilbert spaces (dimension ≤ 16 in practice, ≤ 64 supported).

mod channel;
mod eig;
mod matrix;
pub mod random;
mod state;

pub use channel::{generalized_amplitude_damping, QuantumChannel, COMPLETENESS_TOL};
pub use eig::{jacobi_eigh, Eigen, CONVERGENCE_RATIO, MAX_SWEEPS};
pub use matrix::{ComplexMatrix, MatrixJson};
pub use state::{
    DensityMatrix, HermitianOperator, PureState, HERMITIAN_TOL, NORM_TOL, POSITIVITY_TOL, TRACE_TOL,
};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-14;

/// Default floor for [`matrix_log_hermitian`].
pub const LOG_FLOOR: f64 = 1e-300;

/// Ascending eigenvalues and unitary eigenvectors of a Hermitian operator.
pub fn hermitian_eig(a: &HermitianOperator) -> Result<Eigen> {
    a.eig()
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Traces out every subsystem not listed in `keep`. Subsystem order in the
/// result follows `dims`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != m.dim() {
        return Err(Error::Validation(format!(
            "subsystem dims {dims:?} (product {total}) do not match matrix dim {}",
            m.dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::Validation(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Validation(format!(
            "subsystem index {k} out of range for {} subsystems",
            dims.len()
        )));
    }
    let kept = |s: usize| keep.contains(&s);

    // For every full index: (index within kept factors, index within traced factors).
    let split: Vec<(usize, usize)> = (0..total)
        .map(|mut idx| {
            let mut digits = vec![0; dims.len()];
            for s in (0..dims.len()).rev() {
                digits[s] = idx % dims[s];
                idx /= dims[s];
            }
            let (mut k, mut t) = (0, 0);
            for (s, &d) in digits.iter().enumerate() {
                if kept(s) {
                    k = k * dims[s] + d;
                } else {
                    t = t * dims[s] + d;
                }
            }
            (k, t)
        })
        .collect();

    let out_dim: usize = (0..dims.len())
        .filter(|&s| kept(s))
        .map(|s| dims[s])
        .product();
    let mut out = ComplexMatrix::zeros(out_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace_matrix(rho.matrix(), dims, keep).map(DensityMatrix::new_unchecked)
}

pub fn apply_channel(rho: &DensityMatrix, ch: &QuantumChannel) -> Result<DensityMatrix> {
    ch.apply(rho)
}

/// Natural logarithm `V diag(ln max(λ, floor)) V†`.
pub fn matrix_log_hermitian(a: &HermitianOperator, floor: f64) -> Result<HermitianOperator> {
    let e = a.eig()?;
    Ok(HermitianOperator::new_unchecked(
        e.map(|x| x.max(floor).ln()),
    ))
}

/// Logarithm for callers that need full support: any eigenvalue below
/// [`SUPPORT_TOL`] is reported instead of floored.
pub fn matrix_log_full_support(a: &HermitianOperator) -> Result<HermitianOperator> {
    let e = a.eig()?;
    if e.values[0] < SUPPORT_TOL {
        return Err(Error::SupportViolation(format!(
            "logarithm requested of operator with eigenvalue {:.3e} < {SUPPORT_TOL:e}",
            e.values[0]
        )));
    }
    Ok(HermitianOperator::new_unchecked(e.map(f64::ln)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn partial_trace_of_product_state() {
        let a = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-15);
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        let s = 0.5f64.sqrt();
        let z = Complex64::new(0.0, 0.0);
        let bell = PureState::new(vec![Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)])
            .unwrap()
            .projector();
        for keep in [0, 1] {
            let r = partial_trace(&bell, &[2, 2], &[keep]).unwrap();
            assert!(
                r.matrix()
                    .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                    < 1e-15
            );
        }
    }

    #[test]
    fn partial_trace_dim_mismatch() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[0]),
            Err(Error::Validation(_))
        ));
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn log_of_identity_and_exponentials() {
        let l = matrix_log_hermitian(&HermitianOperator::diagonal(&[1.0, 1.0]), LOG_FLOOR).unwrap();
        assert!(l.matrix().max_abs() < 1e-15);
        let e = std::f64::consts::E;
        let l = matrix_log_hermitian(&HermitianOperator::diagonal(&[e, e * e]), LOG_FLOOR).unwrap();
        assert!((l.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((l.matrix()[(1, 1)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn full_support_log_signals_rank_deficiency() {
        let p = HermitianOperator::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            matrix_log_full_support(&p),
            Err(Error::SupportViolation(_))
        ));
        let floored = matrix_log_hermitian(&p, LOG_FLOOR).unwrap();
        assert!((floored.matrix()[(1, 1)].re - LOG_FLOOR.ln()).abs() < 1e-9);
    }
}
