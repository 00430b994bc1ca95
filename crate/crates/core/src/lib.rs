//! Thermodynamic bookkeeping for open quantum systems under general CPTP
//! dynamics: ergotropy, free-energy work, the reversible/irreversible entropy
//! split, charging power, entropy-production rate and relative entropy of
//! coherence, together with Lindblad/Schrödinger integrators and two
//! quantum-battery models.
//!
//! Units: ħ = k_B = 1; entropies in nats.

pub mod audit;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod models;
pub mod qcore;
pub mod thermo;

pub use dynamics::{Evolution, GridSpec, LindbladSpec, PureEvolution};
pub use error::{Error, Result};
pub use measures::{HamiltonianSchedule, MeasureSeries, Trajectory};
pub use qcore::{ComplexMatrix, DensityMatrix, HermitianOperator, PureState, QuantumChannel};
pub use thermo::{GibbsSpec, ThermoLedger};
