//! Static thermodynamic quantities: entropies, Gibbs and passive states,
//! ergotropy, free-energy work, the reversible/irreversible entropy split and
//! the two energy-balance ledgers.
//!
//! Units: ħ = k_B = 1, entropies in nats.
//!
//! The logarithm of a Gibbs state is never taken numerically; it is
//! `ln π^β = −βH − ln Z·1`, evaluated in the eigenbasis of `H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    ComplexMatrix, DensityMatrix, Eigen, HermitianOperator, POSITIVITY_TOL, SUPPORT_TOL,
};

/// A reference eigenvalue below this carries no support.
pub const REFERENCE_SUPPORT_TOL: f64 = SUPPORT_TOL;
/// State weight on an unsupported direction above this makes the relative
/// entropy infinite.
pub const STATE_WEIGHT_TOL: f64 = 1e-12;

fn check_dims(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Validation(format!(
            "{what}: dimension mismatch ({a} vs {b})"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Validation(format!(
            "inverse temperature must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

/// `−Σ λ ln λ` of a probability vector, with `0 ln 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

fn checked_spectrum(rho: &DensityMatrix) -> Result<Eigen> {
    let e = rho.eig()?;
    if e.values[0] < POSITIVITY_TOL {
        return Err(Error::Validation(format!(
            "state has eigenvalue {:.3e} below {POSITIVITY_TOL:e}",
            e.values[0]
        )));
    }
    Ok(e)
}

/// Von Neumann entropy `S(ρ) = −Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy(&checked_spectrum(rho)?.values))
}

/// Quantum relative entropy `S(ρ‖σ) = Tr ρ(ln ρ − ln σ)`.
///
/// Returns [`Error::SupportViolation`] when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim(), "relative entropy")?;
    let er = checked_spectrum(rho)?;
    let es = checked_spectrum(sigma)?;
    let n = rho.dim();

    let mut cross = 0.0;
    for j in 0..n {
        let s = es.values[j];
        let sj = es.vectors.column(j);
        // ⟨s_j|ρ|s_j⟩
        let weight: f64 = (0..n)
            .map(|i| {
                let ri = er.values[i].max(0.0);
                let overlap: num_complex::Complex64 =
                    (0..n).map(|k| er.vectors[(k, i)].conj() * sj[k]).sum();
                ri * overlap.norm_sqr()
            })
            .sum();
        if s < REFERENCE_SUPPORT_TOL {
            if weight > STATE_WEIGHT_TOL {
                return Err(Error::SupportViolation(format!(
                    "state puts weight {weight:.3e} on a reference eigenvector with eigenvalue {s:.3e}"
                )));
            }
            continue;
        }
        cross += weight * s.ln();
    }
    Ok(-shannon_entropy(&er.values) - cross)
}

/// Inverse temperature and partition function of a Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsSpec {
    pub beta: f64,
    /// `Z = Σ e^{−βε_n}`
    #[serde(rename = "Z")]
    pub z: f64,
    /// `ln Z`, finite even where `Z` overflows.
    pub log_z: f64,
}

/// Gibbs state `e^{−βH}/Z` together with the spectral data of `H`.
#[derive(Debug, Clone)]
pub struct Thermal {
    pub spec: GibbsSpec,
    /// Ascending energies of `H`.
    pub energies: Vec<f64>,
    /// Gibbs populations matching `energies`.
    pub populations: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl Thermal {
    pub fn new(h: &HermitianOperator, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let eig = h.eig()?;
        Ok(Self::from_eigen(eig, beta))
    }

    pub(crate) fn from_eigen(eig: Eigen, beta: f64) -> Self {
        let emin = eig.values[0];
        let weights: Vec<f64> = eig
            .values
            .iter()
            .map(|e| (-beta * (e - emin)).exp())
            .collect();
        let shifted_z: f64 = weights.iter().sum();
        let log_z = -beta * emin + shifted_z.ln();
        let populations = weights.iter().map(|w| w / shifted_z).collect();
        Thermal {
            spec: GibbsSpec {
                beta,
                z: log_z.exp(),
                log_z,
            },
            energies: eig.values,
            populations,
            eigenvectors: eig.vectors,
        }
    }

    pub fn beta(&self) -> f64 {
        self.spec.beta
    }

    pub fn state(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(ComplexMatrix::conjugate_diagonal(
            &self.eigenvectors,
            &self.populations,
        ))
    }

    /// `ln π^β = −βH − ln Z·1`
    pub fn log_state(&self) -> ComplexMatrix {
        let beta = self.beta();
        let d: Vec<f64> = self
            .energies
            .iter()
            .map(|e| -beta * e - self.spec.log_z)
            .collect();
        ComplexMatrix::conjugate_diagonal(&self.eigenvectors, &d)
    }

    /// `Tr[π^β H]`
    pub fn energy(&self) -> f64 {
        self.populations
            .iter()
            .zip(&self.energies)
            .map(|(p, e)| p * e)
            .sum()
    }

    /// `S(π^β)`
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.populations)
    }

    /// `F(π^β) = Tr[π^β H] − β⁻¹S(π^β)`, evaluated from the populations.
    pub fn free_energy(&self) -> f64 {
        self.energy() - self.entropy() / self.beta()
    }

    /// `S(ρ‖π^β) = −S(ρ) − Tr[ρ ln π^β] = −S(ρ) + βTr[ρH] + ln Z`.
    pub fn relative_entropy_from(&self, rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
        check_dims(rho.dim(), h.dim(), "relative entropy to Gibbs state")?;
        Ok(-von_neumann_entropy(rho)? + self.beta() * h.expectation(rho) + self.spec.log_z)
    }
}

/// Gibbs state `π^β = e^{−βH}/Z` and its `(β, Z)`.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<(DensityMatrix, GibbsSpec)> {
    let t = Thermal::new(h, beta)?;
    Ok((t.state(), t.spec))
}

/// Eigenvalues of `ρ` in decreasing order paired with the eigenvectors of `H`
/// in increasing energy order.
pub fn passive_state(rho: &DensityMatrix, h: &HermitianOperator) -> Result<DensityMatrix> {
    check_dims(rho.dim(), h.dim(), "passive state")?;
    let r = decreasing_spectrum(rho)?;
    let eh = h.eig()?;
    Ok(DensityMatrix::new_unchecked(
        ComplexMatrix::conjugate_diagonal(&eh.vectors, &r),
    ))
}

fn decreasing_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let mut r = checked_spectrum(rho)?.values;
    r.reverse();
    Ok(r)
}

/// `Tr[πH]` for the passive state of `ρ` with respect to `H`, i.e.
/// `Σ r↓_n ε↑_n`.
pub fn passive_energy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho.dim(), h.dim(), "passive energy")?;
    let r = decreasing_spectrum(rho)?;
    let eps = h.eig()?.values;
    Ok(r.iter().zip(&eps).map(|(r, e)| r * e).sum())
}

/// Ergotropy `Tr[ρH] − Tr[πH]`.
pub fn ergotropy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho.dim(), h.dim(), "ergotropy")?;
    Ok(h.expectation(rho) - passive_energy(rho, h)?)
}

/// Nonequilibrium free energy `Tr[Hρ] − β⁻¹S(ρ)`.
pub fn free_energy(rho: &DensityMatrix, h: &HermitianOperator, beta: f64) -> Result<f64> {
    check_dims(rho.dim(), h.dim(), "free energy")?;
    check_beta(beta)?;
    Ok(h.expectation(rho) - von_neumann_entropy(rho)? / beta)
}

/// Free-energy work `W_f = F(ρ) − F(π^β)`.
pub fn extractable_work(rho: &DensityMatrix, h: &HermitianOperator, beta: f64) -> Result<f64> {
    let f = free_energy(rho, h, beta)?;
    Ok(f - Thermal::new(h, beta)?.free_energy())
}

/// Irreversible entropy change `S(ρ₀‖π^β₀) − S(ρ_τ‖π^β_τ)`.
pub fn delta_s_ir(
    rho0: &DensityMatrix,
    h0: &HermitianOperator,
    rho_tau: &DensityMatrix,
    h_tau: &HermitianOperator,
    beta: f64,
) -> Result<f64> {
    let t0 = Thermal::new(h0, beta)?;
    let tt = Thermal::new(h_tau, beta)?;
    Ok(t0.relative_entropy_from(rho0, h0)? - tt.relative_entropy_from(rho_tau, h_tau)?)
}

fn gibbs_deviation_log_weight(rho: &DensityMatrix, t: &Thermal) -> Result<f64> {
    check_dims(rho.dim(), t.energies.len(), "reversible entropy")?;
    let ln_pi = t.log_state();
    let pi = t.state();
    Ok((rho.matrix() - pi.matrix()).trace_product(&ln_pi).re)
}

/// Reversible entropy change
/// `Tr[(ρ_τ−π^β_τ) ln π^β_τ] − Tr[(ρ₀−π^β₀) ln π^β₀]`.
pub fn delta_s_r(
    rho0: &DensityMatrix,
    h0: &HermitianOperator,
    rho_tau: &DensityMatrix,
    h_tau: &HermitianOperator,
    beta: f64,
) -> Result<f64> {
    let t0 = Thermal::new(h0, beta)?;
    let tt = Thermal::new(h_tau, beta)?;
    Ok(gibbs_deviation_log_weight(rho_tau, &tt)? - gibbs_deviation_log_weight(rho0, &t0)?)
}

/// Heat `⟨Q⟩ = −β⁻¹ΔS_R`.
pub fn heat(
    rho0: &DensityMatrix,
    h0: &HermitianOperator,
    rho_tau: &DensityMatrix,
    h_tau: &HermitianOperator,
    beta: f64,
) -> Result<f64> {
    Ok(-delta_s_r(rho0, h0, rho_tau, h_tau, beta)? / beta)
}

/// Adiabatic work between instantaneous Gibbs states,
/// `Tr[π^β_τ H_τ] − Tr[π^β₀ H₀]`.
pub fn adiabatic_work_gibbs(
    h0: &HermitianOperator,
    h_tau: &HermitianOperator,
    beta: f64,
) -> Result<f64> {
    Ok(Thermal::new(h_tau, beta)?.energy() - Thermal::new(h0, beta)?.energy())
}

/// Adiabatic work between passive states, `Tr[π_τ H_τ] − Tr[π_m H₀]`, where
/// `π_m` carries the spectrum of `ρ_τ` in the eigenbasis of `H₀`.
pub fn adiabatic_work_passive(
    rho_tau: &DensityMatrix,
    h0: &HermitianOperator,
    h_tau: &HermitianOperator,
) -> Result<f64> {
    Ok(passive_energy(rho_tau, h_tau)? - passive_energy(rho_tau, h0)?)
}

/// Operational heat `Tr[π_m H₀] − Tr[π₀ H₀]`.
pub fn operational_heat(
    rho0: &DensityMatrix,
    rho_tau: &DensityMatrix,
    h0: &HermitianOperator,
) -> Result<f64> {
    Ok(passive_energy(rho_tau, h0)? - passive_energy(rho0, h0)?)
}

/// Per-process energy and entropy record with the closure residuals of the
/// ergotropic first law and the free-energy fundamental equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoLedger {
    #[serde(rename = "deltaE")]
    pub delta_e: f64,
    #[serde(rename = "deltaWe")]
    pub delta_we: f64,
    #[serde(rename = "deltaWf")]
    pub delta_wf: f64,
    /// Gibbs-state adiabatic work (enters the free-energy balance and the heat).
    #[serde(rename = "adiabaticWork")]
    pub adiabatic_work: f64,
    /// Passive-state adiabatic work (enters the ergotropic first law).
    #[serde(rename = "adiabaticWorkPassive")]
    pub adiabatic_work_passive: f64,
    #[serde(rename = "operationalHeat")]
    pub operational_heat: f64,
    pub heat: f64,
    #[serde(rename = "deltaS_rho")]
    pub delta_s_rho: f64,
    #[serde(rename = "deltaS_gibbs")]
    pub delta_s_gibbs: f64,
    #[serde(rename = "deltaS_ir")]
    pub delta_s_ir: f64,
    #[serde(rename = "deltaS_r")]
    pub delta_s_r: f64,
    /// `ΔE − (ΔW_e + ⟨W⟩_ad^passive + ⟨Q⟩_op)`
    #[serde(rename = "residual_eq2")]
    pub residual_first_law: f64,
    /// `ΔE − (ΔW_f + ⟨W⟩_ad^gibbs + β⁻¹(ΔS(ρ) − ΔS(π^β)))`
    #[serde(rename = "residual_eq7")]
    pub residual_fundamental: f64,
}

/// Full ledger for the process `(H₀, ρ₀) → (H_τ, ρ_τ)` at inverse temperature `β`.
pub fn first_law_ledger(
    rho0: &DensityMatrix,
    h0: &HermitianOperator,
    rho_tau: &DensityMatrix,
    h_tau: &HermitianOperator,
    beta: f64,
) -> Result<ThermoLedger> {
    check_beta(beta)?;
    check_dims(rho0.dim(), h0.dim(), "initial state and Hamiltonian")?;
    check_dims(rho_tau.dim(), h_tau.dim(), "final state and Hamiltonian")?;
    check_dims(rho0.dim(), rho_tau.dim(), "initial and final state")?;

    let t0 = Thermal::new(h0, beta)?;
    let tt = Thermal::new(h_tau, beta)?;

    let e0 = h0.expectation(rho0);
    let et = h_tau.expectation(rho_tau);
    let delta_e = et - e0;

    let delta_we = ergotropy(rho_tau, h_tau)? - ergotropy(rho0, h0)?;
    let w_ad_passive = adiabatic_work_passive(rho_tau, h0, h_tau)?;
    let q_op = operational_heat(rho0, rho_tau, h0)?;

    let s0 = von_neumann_entropy(rho0)?;
    let st = von_neumann_entropy(rho_tau)?;
    let wf0 = e0 - s0 / beta - t0.free_energy();
    let wft = et - st / beta - tt.free_energy();
    let delta_wf = wft - wf0;

    let w_ad_gibbs = tt.energy() - t0.energy();
    let delta_s_rho = st - s0;
    let delta_s_gibbs = tt.entropy() - t0.entropy();

    let s_ir = t0.relative_entropy_from(rho0, h0)? - tt.relative_entropy_from(rho_tau, h_tau)?;
    let s_r = gibbs_deviation_log_weight(rho_tau, &tt)? - gibbs_deviation_log_weight(rho0, &t0)?;

    Ok(ThermoLedger {
        delta_e,
        delta_we,
        delta_wf,
        adiabatic_work: w_ad_gibbs,
        adiabatic_work_passive: w_ad_passive,
        operational_heat: q_op,
        heat: -s_r / beta,
        delta_s_rho,
        delta_s_gibbs,
        delta_s_ir: s_ir,
        delta_s_r: s_r,
        residual_first_law: delta_e - (delta_we + w_ad_passive + q_op),
        residual_fundamental: delta_e
            - (delta_wf + w_ad_gibbs + (delta_s_rho - delta_s_gibbs) / beta),
    })
}
