//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation acts on a pair `(p, q)`. The off-diagonal element
//! `a_pq = |a_pq| e^{iφ}` is first made real by the phase
//! `D = diag(.., 1, .., e^{-iφ}, ..)`, then annihilated by the usual real
//! rotation; the combined unitary is `G = D·R` and `A ← G† A G`.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Sweeps over all pairs before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Stop when the off-diagonal Frobenius norm falls below this fraction of
/// the full Frobenius norm.
pub const CONVERGENCE_RATIO: f64 = 1e-13;

/// Spectral decomposition `A = V diag(values) V†` with ascending values.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuilds `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::conjugate_diagonal(&self.vectors, &d)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix. Hermiticity is the caller's contract;
/// only the upper triangle drives the rotations, but the full matrix is
/// updated.
pub fn jacobi_eigh(input: &ComplexMatrix) -> Result<Eigen> {
    let n = input.dim();
    let mut a = input.clone();
    // Force an exactly Hermitian working copy.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let target = CONVERGENCE_RATIO * a.frobenius_norm();

    let mut converged = off_diagonal_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {:.3e})",
                off_diagonal_norm(&a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if b < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / b; // e^{iφ}
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = D·R with G_pp = c, G_pq = s, G_qp = −s e^{−iφ}, G_qq = c e^{−iφ}.
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = a.dim();
    // A ← A G (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    // A ← G† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * b, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * b, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_untouched() {
        let e = jacobi_eigh(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0]);
        assert_eq!(e.vectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = jacobi_eigh(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // columns are (1, ∓1)/√2 up to a phase
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        assert!(((v0[0] * r - v0[1] * r).norm() - 1.0).abs() < 1e-14);
        assert!(((v1[0] * r + v1[1] * r).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two_reconstructs() {
        let a = ComplexMatrix::from_vec(
            2,
            vec![
                Complex64::new(0.3, 0.0),
                Complex64::new(0.2, -0.7),
                Complex64::new(0.2, 0.7),
                Complex64::new(-1.1, 0.0),
            ],
        )
        .unwrap();
        let e = jacobi_eigh(&a).unwrap();
        assert!(e.reconstruct().max_abs_diff(&a) < 1e-14);
        assert!(e.values[0] <= e.values[1]);
    }

    #[test]
    fn zero_matrix() {
        let e = jacobi_eigh(&ComplexMatrix::zeros(3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
    }
}
