//! Randomized consistency checks shared by the `audit` command and the test
//! suites: closure identities of the ledgers, the second-law inequality for
//! Gibbs-preserving channels and agreement of the two routes to `W_f`.

use rand::Rng;

use crate::error::Result;
use crate::measures::coherence;
use crate::qcore::random::{random_density, random_gibbs_preserving_channel, random_hermitian};
use crate::qcore::{
    generalized_amplitude_damping, ComplexMatrix, DensityMatrix, HermitianOperator, QuantumChannel,
};
use crate::thermo::{
    delta_s_ir, extractable_work, first_law_ledger, gibbs_state, relative_entropy, Thermal,
};

/// `|residual_eq2|`, `|residual_eq7|`, heat balance, power split.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Entropy split, work-entropy relation, dual-path `W_f`.
pub const ENTROPY_TOL: f64 = 1e-10;
/// Smallest `ΔS_Ir` accepted under a Gibbs-preserving channel.
pub const SECOND_LAW_TOL: f64 = -1e-10;

/// Signed residuals of every identity that must close for a process
/// `(ρ₀, H₀) → (ρ_τ, H_τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureReport {
    /// `ΔE − (ΔW_e + ⟨W⟩_ad + ⟨Q⟩_op)`
    pub first_law: f64,
    /// `ΔE − (ΔW_f + ⟨W⟩_ad + β⁻¹(ΔS(ρ) − ΔS(π)))`
    pub fundamental: f64,
    /// `ΔS(ρ) − ΔS(π) − (ΔS_Ir − ΔS_R)`
    pub entropy_split: f64,
    /// `⟨Q⟩ − (ΔE − ⟨W⟩_ad)`
    pub heat_balance: f64,
    /// `ΔW_f + β⁻¹ΔS_Ir`
    pub work_entropy: f64,
    /// `ΔW_f − (β⁻¹ΔC_r + ΔE − β⁻¹(ΔS(Δρ) − Δln Z))`, the coherent/incoherent
    /// split of the power taken over the whole step.
    pub power_split: f64,
}

impl ClosureReport {
    /// Names and magnitudes of residuals above their tolerances.
    pub fn failures(&self) -> Vec<(&'static str, f64)> {
        [
            ("first_law", self.first_law, CLOSURE_TOL),
            ("fundamental", self.fundamental, CLOSURE_TOL),
            ("entropy_split", self.entropy_split, ENTROPY_TOL),
            ("heat_balance", self.heat_balance, CLOSURE_TOL),
            ("work_entropy", self.work_entropy, ENTROPY_TOL),
            ("power_split", self.power_split, CLOSURE_TOL),
        ]
        .into_iter()
        .filter(|(_, r, tol)| !(r.abs() <= *tol))
        .map(|(name, r, _)| (name, r))
        .collect()
    }
}

pub fn closure_report(
    rho0: &DensityMatrix,
    h0: &HermitianOperator,
    rho_tau: &DensityMatrix,
    h_tau: &HermitianOperator,
    beta: f64,
) -> Result<ClosureReport> {
    let l = first_law_ledger(rho0, h0, rho_tau, h_tau, beta)?;
    let c0 = coherence(rho0, h0)?;
    let ct = coherence(rho_tau, h_tau)?;
    let s_dephased = |c: f64, rho: &DensityMatrix| -> Result<f64> {
        Ok(c + crate::thermo::von_neumann_entropy(rho)?)
    };
    let d_s_dephased = s_dephased(ct, rho_tau)? - s_dephased(c0, rho0)?;
    let d_log_z = Thermal::new(h_tau, beta)?.spec.log_z - Thermal::new(h0, beta)?.spec.log_z;
    let incoherent = l.delta_e - (d_s_dephased - d_log_z) / beta;
    Ok(ClosureReport {
        first_law: l.residual_first_law,
        fundamental: l.residual_fundamental,
        entropy_split: l.delta_s_rho - l.delta_s_gibbs - (l.delta_s_ir - l.delta_s_r),
        heat_balance: l.heat - (l.delta_e - l.adiabatic_work),
        work_entropy: l.delta_wf + l.delta_s_ir / beta,
        power_split: l.delta_wf - ((ct - c0) / beta + incoherent),
    })
}

/// `W_f` from free energies minus `β⁻¹S(ρ‖π^β)` with the relative entropy
/// computed against the explicitly built Gibbs matrix.
///
/// Forming `π^β` as a matrix fixes its small eigenvalues only to about
/// `ε‖π^β‖`, so this gap grows like `ε/p_min` once `β·(ε_max − ε_min)` is
/// large; [`random_audit_case`] stays in the well-conditioned range.
pub fn dual_path_gap(rho: &DensityMatrix, h: &HermitianOperator, beta: f64) -> Result<f64> {
    let (pi, _) = gibbs_state(h, beta)?;
    Ok(extractable_work(rho, h, beta)? - relative_entropy(rho, &pi)? / beta)
}

/// One randomized audit instance.
#[derive(Debug, Clone)]
pub struct AuditCase {
    pub hamiltonian: HermitianOperator,
    pub beta: f64,
    pub channel: QuantumChannel,
    pub rho0: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOutcome {
    pub delta_s_ir: f64,
    /// Worst dual-path gap over the two endpoints.
    pub dual_path_gap: f64,
    pub closure: ClosureReport,
}

impl AuditOutcome {
    /// Descriptions of every failed check.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.delta_s_ir < SECOND_LAW_TOL {
            out.push(format!(
                "deltaS_ir = {:.3e} < {SECOND_LAW_TOL:e}",
                self.delta_s_ir
            ));
        }
        if !(self.dual_path_gap.abs() <= ENTROPY_TOL) {
            out.push(format!("W_f dual-path gap {:.3e}", self.dual_path_gap));
        }
        for (name, r) in self.closure.failures() {
            out.push(format!("{name} residual {r:.3e}"));
        }
        out
    }
}

/// Random Hamiltonian (dim 2–4, Gaussian entries of width 1/2), inverse
/// temperature in [0.1, 2], full-rank state and a channel that fixes the Gibbs
/// state.
pub fn random_audit_case<R: Rng + ?Sized>(rng: &mut R) -> Result<AuditCase> {
    let dim = rng.random_range(2..=4);
    let hamiltonian = random_hermitian(rng, dim, 0.5);
    let beta = rng.random_range(0.1..2.0);
    let channel = random_gibbs_preserving_channel(rng, &hamiltonian, beta)?;
    let rho0 = random_density(rng, dim);
    Ok(AuditCase {
        hamiltonian,
        beta,
        channel,
        rho0,
    })
}

/// A case built to break the second-law inequality: the system starts in its
/// Gibbs state and is hit by zero-temperature damping from the top level to
/// the ground level, which does not fix the Gibbs state.
pub fn violating_case<R: Rng + ?Sized>(rng: &mut R) -> Result<AuditCase> {
    let dim = rng.random_range(2..=4);
    let hamiltonian = random_hermitian(rng, dim, 1.0);
    let beta = rng.random_range(0.2..3.0);
    let eig = hamiltonian.eig()?;
    let p = rng.random_range(0.1..0.9);
    let damping = generalized_amplitude_damping(dim, 0, dim - 1, p, 1.0)?;
    let v = &eig.vectors;
    let vd = v.adjoint();
    let kraus: Vec<ComplexMatrix> = damping.kraus().iter().map(|k| &(v * k) * &vd).collect();
    let channel = QuantumChannel::new(kraus)?;
    let (rho0, _) = gibbs_state(&hamiltonian, beta)?;
    Ok(AuditCase {
        hamiltonian,
        beta,
        channel,
        rho0,
    })
}

pub fn run_audit_case(case: &AuditCase) -> Result<AuditOutcome> {
    let h = &case.hamiltonian;
    let rho_tau = case.channel.apply(&case.rho0)?;
    let gap0 = dual_path_gap(&case.rho0, h, case.beta)?;
    let gap_tau = dual_path_gap(&rho_tau, h, case.beta)?;
    Ok(AuditOutcome {
        delta_s_ir: delta_s_ir(&case.rho0, h, &rho_tau, h, case.beta)?,
        dual_path_gap: if gap0.abs() > gap_tau.abs() {
            gap0
        } else {
            gap_tau
        },
        closure: closure_report(&case.rho0, h, &rho_tau, h, case.beta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_cases_pass() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let case = random_audit_case(&mut rng).unwrap();
            let out = run_audit_case(&case).unwrap();
            assert!(out.failures().is_empty(), "{:?}", out.failures());
        }
    }

    #[test]
    fn violating_case_violates() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(12);
        let case = violating_case(&mut rng).unwrap();
        let out = run_audit_case(&case).unwrap();
        assert!(out.delta_s_ir < -1e-6, "{}", out.delta_s_ir);
    }
}
