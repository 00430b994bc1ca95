//! The two quantum-battery case studies: a two-qubit battery in a common
//! Lorentzian bath, and a two-qubit battery charged through one photon.

mod config;
mod example1;
mod example2;

pub use config::ModelConfig;
pub use example1::{
    calibrate_pseudomode, example1_amplitude, example1_pseudomode_oracle, run_example1,
    superradiant_envelope, Example1Params, CALIBRATION_TOL,
};
pub use example2::Example2Case;
pub use example2::{
    battery_hamiltonian, example2_build, run_example2, Example2Inputs, Example2Params,
};

use num_complex::Complex64;

use crate::qcore::ComplexMatrix;

/// `σ⁺ = |1⟩⟨0|` with `|1⟩` the excited level.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::unit(2, 1, 0)
}

/// `σ⁻ = |0⟩⟨1|`
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::unit(2, 0, 1)
}

/// `op` acting on factor `site` of a product space with factor dims `dims`.
pub fn embed(op: &ComplexMatrix, site: usize, dims: &[usize]) -> ComplexMatrix {
    dims.iter()
        .enumerate()
        .fold(ComplexMatrix::identity(1), |acc, (s, &d)| {
            if s == site {
                acc.kron(op)
            } else {
                acc.kron(&ComplexMatrix::identity(d))
            }
        })
}

/// Product basis vector for the given digits.
pub(crate) fn basis_vector(digits: &[usize], dims: &[usize]) -> Vec<Complex64> {
    let total: usize = dims.iter().product();
    let index = digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d);
    let mut v = vec![Complex64::new(0.0, 0.0); total];
    v[index] = Complex64::new(1.0, 0.0);
    v
}

/// `ω Σ_i n_i` on `sites` qubits.
pub(crate) fn free_qubits(omega: f64, sites: usize) -> ComplexMatrix {
    let dims = vec![2; sites];
    let n = ComplexMatrix::unit(2, 1, 1);
    (0..sites).fold(ComplexMatrix::zeros(1 << sites), |acc, s| {
        &acc + &embed(&n, s, &dims).scale_real(omega)
    })
}
