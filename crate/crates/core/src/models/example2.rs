//! Two-qubit battery charged by one photon.
//!
//! Case 1 keeps the mediating mode explicitly (truncated to Fock {0, 1}, exact
//! in the one-excitation sector) and evolves the pure joint state. Case 2
//! eliminates the mode: an effective exchange `g₁₂ = g²/Δ`, `Δ = ω₀ − ω_p`,
//! plus independent spontaneous emission at rate `γ`.

use serde::{Deserialize, Serialize};

use super::{basis_vector, embed, free_qubits, sigma_minus, sigma_plus};
use crate::dynamics::{
    lindblad_evolve, schrodinger_evolve, Evolution, GridSpec, LindbladSpec, DEFAULT_DT,
};
use crate::error::{Error, Result};
use crate::measures::{HamiltonianSchedule, MeasureSeries, Trajectory};
use crate::qcore::{partial_trace, ComplexMatrix, DensityMatrix, HermitianOperator, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Example2Case {
    /// Qubits and mode evolved unitarily.
    Photon,
    /// Effective two-qubit master equation.
    Effective,
}

impl From<Example2Case> for u8 {
    fn from(c: Example2Case) -> u8 {
        match c {
            Example2Case::Photon => 1,
            Example2Case::Effective => 2,
        }
    }
}

impl TryFrom<u8> for Example2Case {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Example2Case::Photon),
            2 => Ok(Example2Case::Effective),
            _ => Err(Error::Parameter(format!("case must be 1 or 2, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example2Params {
    pub case: Example2Case,
    pub g: f64,
    pub omega0: f64,
    pub omegap: f64,
    pub gamma: f64,
    pub beta: f64,
    pub t_max: f64,
    pub steps: usize,
    /// Initial basis state as a bit string: qubit 1, qubit 2 and (case 1
    /// only) the photon number. Defaults to `001` and `10`.
    pub initial: String,
}

impl Example2Params {
    /// Defaults for a case. Case 2 runs long enough for `γ = 0.1` to empty the
    /// battery.
    pub fn defaults(case: Example2Case) -> Self {
        let (t_max, initial) = match case {
            Example2Case::Photon => (20.0, "001"),
            Example2Case::Effective => (100.0, "10"),
        };
        Example2Params {
            case,
            g: 1.0,
            omega0: 1.0,
            omegap: 2.0,
            gamma: 0.1,
            beta: 0.1,
            t_max,
            steps: (t_max / DEFAULT_DT).round() as usize,
            initial: initial.to_string(),
        }
    }

    /// `Δ = ω₀ − ω_p`
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omegap
    }

    /// `g₁₂ = g²/Δ`
    pub fn exchange(&self) -> Result<f64> {
        let delta = self.detuning();
        if delta == 0.0 {
            return Err(Error::Parameter(
                "omega0 == omegap: the effective exchange g^2/(omega0 - omegap) diverges".into(),
            ));
        }
        Ok(self.g * self.g / delta)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.t_max, self.steps)
    }

    fn initial_digits(&self) -> Result<Vec<usize>> {
        let expected = match self.case {
            Example2Case::Photon => 3,
            Example2Case::Effective => 2,
        };
        let digits: Vec<usize> = self
            .initial
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(()),
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                Error::Parameter(format!(
                    "initial must be a bit string, got {:?}",
                    self.initial
                ))
            })?;
        if digits.len() != expected {
            return Err(Error::Parameter(format!(
                "initial for case {} needs {expected} digits, got {:?}",
                u8::from(self.case),
                self.initial
            )));
        }
        if self.case == Example2Case::Photon && digits.iter().sum::<usize>() > 1 {
            return Err(Error::Parameter(format!(
                "case 1 truncates the mode to one photon and needs at most one excitation, got {:?}",
                self.initial
            )));
        }
        Ok(digits)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::Parameter(format!(
                "g must be positive, got {}",
                self.g
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Parameter(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !self.omega0.is_finite() || !self.omegap.is_finite() {
            return Err(Error::Parameter("omega0 and omegap must be finite".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!(
                "gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        if self.case == Example2Case::Effective {
            self.exchange()?;
        }
        self.initial_digits()?;
        self.grid().map(|_| ())
    }
}

/// Dynamics inputs for either case.
#[derive(Debug, Clone)]
pub enum Example2Inputs {
    /// Factors ordered (qubit 1, qubit 2, mode).
    Photon {
        hamiltonian: HermitianOperator,
        psi0: PureState,
    },
    Effective {
        spec: LindbladSpec,
        rho0: DensityMatrix,
    },
}

pub fn example2_build(p: &Example2Params) -> Result<Example2Inputs> {
    p.validate()?;
    let digits = p.initial_digits()?;
    match p.case {
        Example2Case::Photon => {
            let dims = [2, 2, 2];
            let a = embed(&sigma_minus(), 2, &dims);
            let raise = &embed(&sigma_plus(), 0, &dims) + &embed(&sigma_plus(), 1, &dims);
            let coupling = (&raise * &a).scale_real(p.g);
            let free = &free_qubits(p.omega0, 2).kron(&ComplexMatrix::identity(2))
                + &(&a.adjoint() * &a).scale_real(p.omegap);
            let h = &(&free + &coupling) + &coupling.adjoint();
            Ok(Example2Inputs::Photon {
                hamiltonian: HermitianOperator::new(h)?,
                psi0: PureState::new(basis_vector(&digits, &dims))?,
            })
        }
        Example2Case::Effective => {
            let dims = [2, 2];
            let g12 = p.exchange()?;
            let hop = &embed(&sigma_plus(), 0, &dims) * &embed(&sigma_minus(), 1, &dims);
            let h = &free_qubits(p.omega0, 2) + &(&hop + &hop.adjoint()).scale_real(g12);
            let jumps = vec![
                (embed(&sigma_minus(), 0, &dims), p.gamma),
                (embed(&sigma_minus(), 1, &dims), p.gamma),
            ];
            Ok(Example2Inputs::Effective {
                spec: LindbladSpec::new(HermitianOperator::new(h)?, jumps),
                rho0: PureState::new(basis_vector(&digits, &dims))?.projector(),
            })
        }
    }
}

/// Battery reference Hamiltonian `ω₀(n₁ + n₂)`.
pub fn battery_hamiltonian(omega0: f64) -> HermitianOperator {
    HermitianOperator::new(free_qubits(omega0, 2)).expect("diagonal real matrix")
}

pub fn run_example2(p: &Example2Params) -> Result<(Trajectory, MeasureSeries)> {
    let grid = p.grid()?;
    let evolution = match example2_build(p)? {
        Example2Inputs::Photon { hamiltonian, psi0 } => {
            let ev = schrodinger_evolve(&hamiltonian, &psi0, grid)?;
            let states = ev
                .states
                .iter()
                .map(|psi| partial_trace(&psi.projector(), &[2, 2, 2], &[0, 1]))
                .collect::<Result<Vec<_>>>()?;
            Evolution {
                times: ev.times,
                states,
            }
        }
        Example2Inputs::Effective { spec, rho0 } => lindblad_evolve(&spec, &rho0, grid)?,
    };
    let tr = evolution.into_trajectory(
        HamiltonianSchedule::Constant(battery_hamiltonian(p.omega0)),
        p.beta,
    )?;
    let series = MeasureSeries::compute(&tr)?;
    Ok((tr, series))
}
