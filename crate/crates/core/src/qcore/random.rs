//! Random operators, states and channels for property tests and the audit.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::channel::{generalized_amplitude_damping, QuantumChannel};
use super::matrix::ComplexMatrix;
use super::state::{DensityMatrix, HermitianOperator, PureState};
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Orthonormalizes columns in place (modified Gram-Schmidt, two passes).
fn orthonormalize(cols: &mut [Vec<Complex64>]) {
    for j in 0..cols.len() {
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = dot(&done[i], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[i]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
}

/// Hermitian matrix `(G + G†)·scale/2` with Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianOperator {
    let g = ginibre(rng, dim);
    let h = (&g + &g.adjoint()).scale_real(0.5 * scale);
    HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
        .collect();
    orthonormalize(&mut cols);
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    PureState::new_unchecked(v)
}

/// Full-rank mixed state `G G† / Tr(G G†)` (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let mut m = m.scale_real(1.0 / tr);
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::new_unchecked(m)
}

/// Random channel with `n_kraus` operators: the Kraus blocks are the
/// `dim × dim` slices of an isometry obtained from the QR decomposition of a
/// `(n_kraus·dim) × dim` Gaussian matrix.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_kraus: usize) -> QuantumChannel {
    let rows = n_kraus * dim;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..rows).map(|_| gaussian(rng)).collect())
        .collect();
    orthonormalize(&mut cols);
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(dim, |i, j| cols[j][k * dim + i]))
        .collect();
    QuantumChannel::new(kraus).expect("isometry blocks satisfy completeness")
}

/// Random channel that fixes the Gibbs state of `hamiltonian` at `beta`.
///
/// Composes a unitary diagonal in the energy eigenbasis (random phases) with
/// a random number of generalized amplitude damping steps between pairs of
/// energy levels, each at the pair's Gibbs ratio, and finally mixes in the
/// replacement channel onto the Gibbs state. Every factor fixes the Gibbs
/// state, so the composition does too.
pub fn random_gibbs_preserving_channel<R: Rng + ?Sized>(
    rng: &mut R,
    hamiltonian: &HermitianOperator,
    beta: f64,
) -> Result<QuantumChannel> {
    let eig = hamiltonian.eig()?;
    let n = eig.dim();
    let v = &eig.vectors;
    let vd = v.adjoint();
    let emin = eig.values[0];
    let weights: Vec<f64> = eig
        .values
        .iter()
        .map(|e| (-beta * (e - emin)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let pops: Vec<f64> = weights.iter().map(|w| w / z).collect();

    let to_energy_basis = |ch: QuantumChannel| -> QuantumChannel {
        let kraus = ch.kraus().iter().map(|k| &(v * k) * &vd).collect();
        QuantumChannel::new(kraus).expect("unitary conjugation keeps completeness")
    };

    let phases = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut channel = QuantumChannel::unitary(phases)?;

    if n > 1 {
        let steps = rng.random_range(1..=3);
        for _ in 0..steps {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let (low, high) = if a < b { (a, b) } else { (b, a) };
            let p = rng.random_range(0.0..1.0);
            let eta = pops[low] / (pops[low] + pops[high]);
            channel = channel.then(&generalized_amplitude_damping(n, low, high, p, eta)?);
        }
    }

    // Replacement by the Gibbs state: K_ij = sqrt(p_i)|i><j|.
    let mut replace = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut k = ComplexMatrix::zeros(n);
            k[(i, j)] = Complex64::new(pops[i].sqrt(), 0.0);
            replace.push(k);
        }
    }
    let replace = QuantumChannel::new(replace)?;
    let keep = rng.random_range(0.0..1.0);
    Ok(to_energy_basis(channel.mix(keep, &replace)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for dim in 1..=6 {
            let u = random_unitary(&mut rng, dim);
            let err = (&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(dim));
            assert!(err < 1e-13, "dim {dim}: {err}");
        }
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        for dim in 1..=8 {
            let rho = random_density(&mut rng, dim);
            DensityMatrix::new(rho.into_matrix()).unwrap();
        }
    }
}
