use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::state::DensityMatrix;
use crate::error::{Error, Result};

/// Maximum entrywise `|Σ K†K − I|` accepted for a channel.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// CPTP map in Kraus form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComplexMatrix>", into = "Vec<ComplexMatrix>")]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Validation(
                "channel needs at least one Kraus operator".into(),
            ));
        };
        let dim = first.dim();
        if let Some(k) = kraus.iter().position(|k| k.dim() != dim) {
            return Err(Error::Validation(format!(
                "Kraus operator {k} has dim {} but operator 0 has dim {dim}",
                kraus[k].dim()
            )));
        }
        let ch = QuantumChannel { kraus };
        let dev = ch.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "Kraus completeness violated: max |sum K^dagger K - I| = {dev:.3e} exceeds {COMPLETENESS_TOL:e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel {
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Unitary channel `ρ ↦ UρU†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn completeness_deviation(&self) -> f64 {
        let n = self.dim();
        let mut sum = ComplexMatrix::zeros(n);
        for k in &self.kraus {
            sum += &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// Sequential composition: apply `self`, then `next`.
    pub fn then(&self, next: &QuantumChannel) -> QuantumChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        QuantumChannel { kraus }
    }

    /// Convex mixture `p·self + (1−p)·other`.
    pub fn mix(&self, p: f64, other: &QuantumChannel) -> QuantumChannel {
        let sp = Complex64::new(p.sqrt(), 0.0);
        let sq = Complex64::new((1.0 - p).sqrt(), 0.0);
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.scale(sp))
            .chain(other.kraus.iter().map(|k| k.scale(sq)))
            .collect();
        QuantumChannel { kraus }
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::Validation(format!(
                "channel dim {} does not match state dim {}",
                self.dim(),
                rho.dim()
            )));
        }
        let n = rho.dim();
        let mut out = ComplexMatrix::zeros(n);
        for k in &self.kraus {
            out += &(&(k * rho.matrix()) * &k.adjoint());
        }
        Ok(DensityMatrix::new_unchecked(out))
    }
}

impl TryFrom<Vec<ComplexMatrix>> for QuantumChannel {
    type Error = Error;

    fn try_from(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        QuantumChannel::new(kraus)
    }
}

impl From<QuantumChannel> for Vec<ComplexMatrix> {
    fn from(ch: QuantumChannel) -> Self {
        ch.kraus
    }
}

/// Generalized amplitude damping on levels `(low, high)` of a `dim`-level
/// system, identity on the rest. `p` is the damping probability and `eta` the
/// ground-level weight of the pair's fixed point `diag(eta, 1 − eta)`.
pub fn generalized_amplitude_damping(
    dim: usize,
    low: usize,
    high: usize,
    p: f64,
    eta: f64,
) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&eta) {
        return Err(Error::Validation(format!(
            "amplitude damping needs p, eta in [0, 1], got p={p}, eta={eta}"
        )));
    }
    if low == high || low >= dim || high >= dim {
        return Err(Error::Validation(format!(
            "invalid level pair ({low}, {high}) for dim {dim}"
        )));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut rest = ComplexMatrix::identity(dim);
    rest[(low, low)] = c(0.0);
    rest[(high, high)] = c(0.0);

    let mut k0 = rest.scale_real(eta.sqrt());
    k0[(low, low)] = c(eta.sqrt());
    k0[(high, high)] = c((eta * (1.0 - p)).sqrt());
    let mut k1 = ComplexMatrix::zeros(dim);
    k1[(low, high)] = c((eta * p).sqrt());
    let mut k2 = rest.scale_real((1.0 - eta).sqrt());
    k2[(low, low)] = c(((1.0 - eta) * (1.0 - p)).sqrt());
    k2[(high, high)] = c((1.0 - eta).sqrt());
    let mut k3 = ComplexMatrix::zeros(dim);
    k3[(high, low)] = c(((1.0 - eta) * p).sqrt());
    QuantumChannel::new(vec![k0, k1, k2, k3])
}
