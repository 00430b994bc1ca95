//! Two qubits in a common zero-temperature Lorentzian bath, one excitation.
//! Qubit 1 is the battery.
//!
//! With `α_T = √(α₁² + α₂²)` and `β_i = α_i/α_T` the bath couples only to the
//! superradiant combination `b₊ = β₁c₁ + β₂c₂`, which obeys
//! `b̈₊ + λḃ₊ + Ω²b₊ = 0` (interaction picture). The subradiant `b₋` is frozen.

use num_complex::Complex64;
use serde::Serialize;

use super::{basis_vector, embed, sigma_minus, sigma_plus};
use crate::dynamics::{lindblad_evolve, Evolution, GridSpec, LindbladSpec, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::measures::{HamiltonianSchedule, MeasureSeries, Trajectory};
use crate::qcore::{partial_trace, ComplexMatrix, DensityMatrix, HermitianOperator, PureState};

/// Required agreement between the single-qubit pseudomode run and its closed
/// form before the two-qubit oracle is trusted.
pub const CALIBRATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Params {
    pub omega0: f64,
    pub lambda: f64,
    /// `R = Ω/λ`
    #[serde(rename = "R")]
    pub r: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub c01: Complex64,
    pub c02: Complex64,
    pub t_max: f64,
    pub steps: usize,
}

impl Default for Example1Params {
    fn default() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Example1Params {
            omega0: 1.0,
            lambda: 1.0,
            r: 0.3,
            alpha1: a,
            alpha2: a,
            beta: 0.1,
            c01: Complex64::new(0.0, 0.0),
            c02: Complex64::new(1.0, 0.0),
            t_max: 20.0,
            steps: (20.0 / DEFAULT_DT).round() as usize,
        }
    }
}

impl Example1Params {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Parameter(what));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return bad(format!("R must be non-negative, got {}", self.r));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !self.omega0.is_finite() || !self.alpha1.is_finite() || !self.alpha2.is_finite() {
            return bad("omega0, alpha1 and alpha2 must be finite".into());
        }
        if self.alpha_total() == 0.0 {
            return bad("alpha1 and alpha2 cannot both vanish".into());
        }
        let norm = self.c01.norm_sqr() + self.c02.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return bad(format!("|c01|^2 + |c02|^2 = {norm:.15} differs from 1"));
        }
        GridSpec::new(self.t_max, self.steps).map(|_| ())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.t_max, self.steps)
    }

    pub fn alpha_total(&self) -> f64 {
        self.alpha1.hypot(self.alpha2)
    }

    /// `(β₁, β₂)`
    pub fn weights(&self) -> (f64, f64) {
        let at = self.alpha_total();
        (self.alpha1 / at, self.alpha2 / at)
    }

    /// `Ω = Rλ`
    pub fn coupling(&self) -> f64 {
        self.r * self.lambda
    }
}

/// `sinh(z)/z`, series near the origin.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// `E(t) = e^{−λt/2}[cosh(Dt/2) + (λ/D) sinh(Dt/2)]`, `D = √(λ² − 4Ω²)`.
/// Written with `sinhc` so the critical point `D = 0` needs no branch.
pub fn superradiant_envelope(t: f64, lambda: f64, omega: f64) -> f64 {
    let d = Complex64::new(lambda * lambda - 4.0 * omega * omega, 0.0).sqrt();
    let x = d * (0.5 * t);
    let bracket = x.cosh() + 0.5 * lambda * t * sinhc(x);
    (-0.5 * lambda * t).exp() * bracket.re
}

/// Battery amplitude `c₁(t) = β₁b₊(0)E(t) + β₂b₋(0)` (the common phase
/// `e^{−iω₀t}` is dropped).
pub fn example1_amplitude(t: f64, p: &Example1Params) -> Complex64 {
    let (b1, b2) = p.weights();
    let plus = b1 * p.c01 + b2 * p.c02;
    let minus = b2 * p.c01 - b1 * p.c02;
    b1 * plus * superradiant_envelope(t, p.lambda, p.coupling()) + b2 * minus
}

/// Single qubit coupled to a damped two-level pseudomode. Returns the sup-norm
/// deviation of the excited population from `E(t)²` over `grid`.
pub fn calibrate_pseudomode(omega0: f64, lambda: f64, omega: f64, grid: GridSpec) -> Result<f64> {
    let dims = [2, 2];
    let qubit_plus = embed(&sigma_plus(), 0, &dims);
    let a = embed(&sigma_minus(), 1, &dims);
    let coupling = (&qubit_plus * &a).scale_real(omega);
    let h = &(&(&embed(&ComplexMatrix::unit(2, 1, 1), 0, &dims) + &(&a.adjoint() * &a))
        .scale_real(omega0)
        + &coupling)
        + &coupling.adjoint();
    let spec = LindbladSpec::new(HermitianOperator::new(h)?, vec![(a, 2.0 * lambda)]);
    let psi0 = PureState::new(basis_vector(&[1, 0], &dims))?;
    let ev = lindblad_evolve(&spec, &psi0.projector(), grid)?;
    let excited = embed(&ComplexMatrix::unit(2, 1, 1), 0, &dims);
    Ok(ev
        .times
        .iter()
        .zip(&ev.states)
        .map(|(&t, rho)| {
            let pop = excited.trace_product(rho.matrix()).re;
            (pop - superradiant_envelope(t, lambda, omega).powi(2)).abs()
        })
        .fold(0.0, f64::max))
}

/// Independent check of [`example1_amplitude`]: both qubits plus one damped
/// two-level mode (decay `2λ`) integrated as a Lindblad equation. The
/// single-qubit sub-case is calibrated first; a deviation above
/// [`CALIBRATION_TOL`] aborts with a numeric error. Returns the reduced
/// battery states.
pub fn example1_pseudomode_oracle(p: &Example1Params) -> Result<Evolution> {
    p.validate()?;
    let grid = p.grid()?;
    let omega = p.coupling();
    let calibration = calibrate_pseudomode(p.omega0, p.lambda, omega, grid)?;
    if calibration > CALIBRATION_TOL {
        return Err(Error::Numeric(format!(
            "pseudomode calibration deviates by {calibration:.3e} (limit {CALIBRATION_TOL:e}); refine the grid"
        )));
    }

    let dims = [2, 2, 2];
    let (b1, b2) = p.weights();
    let a = embed(&sigma_minus(), 2, &dims);
    let n = ComplexMatrix::unit(2, 1, 1);
    let free = (0..3).fold(ComplexMatrix::zeros(8), |acc, s| {
        &acc + &embed(&n, s, &dims)
    });
    let raise = &embed(&sigma_plus(), 0, &dims).scale_real(b1)
        + &embed(&sigma_plus(), 1, &dims).scale_real(b2);
    let coupling = (&raise * &a).scale_real(omega);
    let h = &(&free.scale_real(p.omega0) + &coupling) + &coupling.adjoint();
    let spec = LindbladSpec::new(HermitianOperator::new(h)?, vec![(a, 2.0 * p.lambda)]);

    let amps: Vec<Complex64> = basis_vector(&[1, 0, 0], &dims)
        .iter()
        .zip(basis_vector(&[0, 1, 0], &dims))
        .map(|(x, y)| x * p.c01 + y * p.c02)
        .collect();
    let psi0 = PureState::new(amps)?;
    let ev = lindblad_evolve(&spec, &psi0.projector(), grid)?;
    let states = ev
        .states
        .iter()
        .map(|rho| partial_trace(rho, &dims, &[0]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Evolution {
        times: ev.times,
        states,
    })
}

/// Battery trajectory `diag(1 − |c₁|², |c₁|²)` with `H_b = ω₀σ⁺σ⁻` and its
/// measures at `p.beta`.
pub fn run_example1(p: &Example1Params) -> Result<(Trajectory, MeasureSeries)> {
    p.validate()?;
    let times = p.grid()?.times();
    let states = times
        .iter()
        .map(|&t| {
            let pop = example1_amplitude(t, p).norm_sqr().min(1.0);
            DensityMatrix::diagonal(&[1.0 - pop, pop])
        })
        .collect::<Result<Vec<_>>>()?;
    let h = HermitianOperator::diagonal(&[0.0, p.omega0]);
    let tr = Trajectory::new(times, states, HamiltonianSchedule::Constant(h), p.beta)?;
    let series = MeasureSeries::compute(&tr)?;
    Ok((tr, series))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: f64) -> Example1Params {
        Example1Params {
            r,
            ..Default::default()
        }
    }

    #[test]
    fn amplitude_starts_at_c01() {
        let p = Example1Params {
            c01: Complex64::new(0.6, 0.0),
            c02: Complex64::new(0.0, 0.8),
            ..params(2.0)
        };
        assert!((example1_amplitude(0.0, &p) - p.c01).norm() < 1e-15);
    }

    #[test]
    fn symmetric_setup_reduces_to_envelope() {
        let p = params(0.3);
        for k in 0..200 {
            let t = 0.1 * k as f64;
            let e = superradiant_envelope(t, 1.0, 0.3);
            let expected = (e - 1.0).powi(2) / 4.0;
            assert!((example1_amplitude(t, &p).norm_sqr() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn subradiant_survival() {
        // Superradiant part decays at (λ − D)/2 = 0.1, so t = 100 is already
        // in the long-time regime.
        let p = params(0.3);
        assert!((example1_amplitude(100.0, &p).norm_sqr() - 0.25).abs() < 1e-3);
    }

    #[test]
    fn envelope_is_continuous_through_critical_damping() {
        // D = 0 at Ω = λ/2.
        let t: f64 = 3.0;
        let critical = (1.0 + 0.5 * t) * (-0.5 * t).exp();
        assert!((superradiant_envelope(t, 1.0, 0.5) - critical).abs() < 1e-14);
        assert!((superradiant_envelope(t, 1.0, 0.5 + 1e-9) - critical).abs() < 1e-8);
        assert!((superradiant_envelope(t, 1.0, 0.5 - 1e-9) - critical).abs() < 1e-8);
    }

    #[test]
    fn envelope_satisfies_damped_oscillator() {
        for &(lambda, omega) in &[(1.0, 0.3), (1.0, 5.0), (2.0, 1.0)] {
            let h = 1e-3;
            for k in 1..50 {
                let t = 0.2 * k as f64;
                let e = |t| superradiant_envelope(t, lambda, omega);
                let d2 = (e(t + h) - 2.0 * e(t) + e(t - h)) / (h * h);
                let d1 = (e(t + h) - e(t - h)) / (2.0 * h);
                assert!((d2 + lambda * d1 + omega * omega * e(t)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn decoupled_oracle_is_frozen() {
        let p = Example1Params {
            steps: 2000,
            t_max: 2.0,
            ..params(0.0)
        };
        let ev = example1_pseudomode_oracle(&p).unwrap();
        for rho in &ev.states {
            assert!((rho.matrix()[(1, 1)].re - p.c01.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_agrees_short_window() {
        let p = Example1Params {
            t_max: 5.0,
            steps: 5000,
            ..params(1.0)
        };
        let ev = example1_pseudomode_oracle(&p).unwrap();
        let worst = ev
            .times
            .iter()
            .zip(&ev.states)
            .map(|(&t, rho)| (rho.matrix()[(1, 1)].re - example1_amplitude(t, &p).norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn gibbs_point_gives_full_divergence() {
        // Put the battery exactly on the Gibbs state at one grid point and
        // check S_ir there equals S(ρ₀‖π).
        let beta = 0.1;
        let h = HermitianOperator::diagonal(&[0.0, 1.0]);
        let (pi, _) = crate::thermo::gibbs_state(&h, beta).unwrap();
        let rho0 = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let states = vec![
            rho0.clone(),
            DensityMatrix::diagonal(&[0.7, 0.3]).unwrap(),
            pi.clone(),
        ];
        let tr = Trajectory::new(
            vec![0.0, 0.5, 1.0],
            states,
            HamiltonianSchedule::Constant(h),
            beta,
        )
        .unwrap();
        let s_ir = crate::measures::irreversible_entropy_series(&tr).unwrap();
        let d0 = crate::thermo::relative_entropy(&rho0, &pi).unwrap();
        assert!((s_ir[2] - d0).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(Example1Params {
            lambda: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Example1Params {
            r: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Example1Params {
            c02: Complex64::new(0.9, 0.0),
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
