//! Fixed-step trajectory generators: exact unitary evolution for constant
//! Hamiltonians and classical RK4 for Lindblad master equations
//!
//! `dρ/dt = −i[H, ρ] + Σ_ij γ_ij (L_i ρ L_j† − ½{L_j† L_i, ρ})`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{HamiltonianSchedule, Trajectory};
use crate::qcore::{jacobi_eigh, ComplexMatrix, DensityMatrix, HermitianOperator, PureState};

/// Allowed `|Tr ρ − 1|` along a Lindblad run.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Smallest eigenvalue tolerated along a Lindblad run.
pub const MIN_EIGENVALUE_TOL: f64 = -1e-7;
/// Default step for model runs, in units of 1/ω₀.
pub const DEFAULT_DT: f64 = 1e-3;

/// Uniform grid `t_k = k·t_max/steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) || steps == 0 {
            return Err(Error::Parameter(format!(
                "grid needs t_max > 0 and steps > 0, got t_max={t_max}, steps={steps}"
            )));
        }
        Ok(GridSpec { t_max, steps })
    }

    /// Grid with step at most `dt`.
    pub fn with_max_step(t_max: f64, dt: f64) -> Result<Self> {
        Self::new(t_max, (t_max / dt).ceil().max(1.0) as usize)
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps).map(|k| k as f64 * dt).collect()
    }
}

/// Pure-state trajectory.
#[derive(Debug, Clone)]
pub struct PureEvolution {
    pub times: Vec<f64>,
    pub states: Vec<PureState>,
}

impl PureEvolution {
    pub fn projectors(&self) -> Evolution {
        Evolution {
            times: self.times.clone(),
            states: self.states.iter().map(PureState::projector).collect(),
        }
    }
}

/// Mixed-state trajectory.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Evolution {
    pub fn into_trajectory(
        self,
        hamiltonians: HamiltonianSchedule,
        beta: f64,
    ) -> Result<Trajectory> {
        Trajectory::new(self.times, self.states, hamiltonians, beta)
    }
}

/// `ψ(t_k) = e^{−iH t_k} ψ₀`, using one eigendecomposition of `H` and the
/// exact phase factors at every grid time.
pub fn schrodinger_evolve(
    h: &HermitianOperator,
    psi0: &PureState,
    grid: GridSpec,
) -> Result<PureEvolution> {
    if h.dim() != psi0.dim() {
        return Err(Error::Validation(format!(
            "Hamiltonian dim {} does not match state dim {}",
            h.dim(),
            psi0.dim()
        )));
    }
    let eig = h.eig()?;
    let v = &eig.vectors;
    let n = h.dim();
    // c = V† ψ₀
    let c: Vec<Complex64> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| v[(i, k)].conj() * psi0.amplitudes()[i])
                .sum()
        })
        .collect();
    let times = grid.times();
    let states = times
        .iter()
        .map(|&t| {
            let phased: Vec<Complex64> = c
                .iter()
                .zip(&eig.values)
                .map(|(ck, e)| ck * Complex64::from_polar(1.0, -e * t))
                .collect();
            let amps = v.apply(&phased);
            PureState::new(amps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PureEvolution { times, states })
}

/// Master-equation specification. `jumps[i] = (L_i, γ_ii)`; optional
/// `cross_terms` add `γ_ij = γ_ji` for `i ≠ j`.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    pub hamiltonian: HermitianOperator,
    pub jumps: Vec<(ComplexMatrix, f64)>,
    pub cross_terms: Vec<(usize, usize, f64)>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: HermitianOperator, jumps: Vec<(ComplexMatrix, f64)>) -> Self {
        LindbladSpec {
            hamiltonian,
            jumps,
            cross_terms: Vec::new(),
        }
    }

    pub fn with_cross_terms(mut self, cross_terms: Vec<(usize, usize, f64)>) -> Self {
        self.cross_terms = cross_terms;
        self
    }

    /// Two-level system `H = ω|1⟩⟨1|` coupled to a bath at inverse temperature
    /// `beta`: decay at `γ(n̄+1)`, excitation at `γn̄`. Its fixed point is the
    /// Gibbs state of `H`.
    pub fn thermal_two_level(omega: f64, gamma: f64, beta: f64) -> Self {
        let nbar = 1.0 / ((beta * omega).exp() - 1.0);
        LindbladSpec::new(
            HermitianOperator::diagonal(&[0.0, omega]),
            vec![
                (ComplexMatrix::unit(2, 0, 1), gamma * (nbar + 1.0)),
                (ComplexMatrix::unit(2, 1, 0), gamma * nbar),
            ],
        )
    }

    fn rate_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let m = self.jumps.len();
        let mut g = vec![vec![0.0; m]; m];
        for (i, (_, rate)) in self.jumps.iter().enumerate() {
            if !(*rate >= 0.0 && rate.is_finite()) {
                return Err(Error::Parameter(format!(
                    "jump {i} has invalid rate {rate}"
                )));
            }
            g[i][i] = *rate;
        }
        for &(i, j, rate) in &self.cross_terms {
            if i >= m || j >= m || i == j {
                return Err(Error::Parameter(format!(
                    "invalid cross term indices ({i}, {j})"
                )));
            }
            g[i][j] = rate;
            g[j][i] = rate;
        }
        if !self.cross_terms.is_empty() {
            let mat = ComplexMatrix::from_fn(m, |i, j| Complex64::new(g[i][j], 0.0));
            let min = jacobi_eigh(&mat)?.values[0];
            if min < -1e-12 {
                return Err(Error::Parameter(format!(
                    "rate matrix is not positive semidefinite (eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let n = self.hamiltonian.dim();
        if let Some(i) = self.jumps.iter().position(|(l, _)| l.dim() != n) {
            return Err(Error::Validation(format!(
                "jump operator {i} has dim {} but the Hamiltonian has dim {n}",
                self.jumps[i].0.dim()
            )));
        }
        self.rate_matrix().map(|_| ())
    }
}

/// Precomputed right-hand side of the master equation.
struct Generator {
    /// `H_eff = H − (i/2) Σ γ_ij L_j† L_i`
    h_eff: ComplexMatrix,
    h_eff_adj: ComplexMatrix,
    /// `(γ_ij, L_i, L_j†)` for each nonzero rate.
    jumps: Vec<(f64, ComplexMatrix, ComplexMatrix)>,
}

impl Generator {
    fn new(spec: &LindbladSpec) -> Result<Self> {
        let g = spec.rate_matrix()?;
        let mut h_eff = spec.hamiltonian.matrix().clone();
        let mut jumps = Vec::new();
        for (i, (li, _)) in spec.jumps.iter().enumerate() {
            for (j, (lj, _)) in spec.jumps.iter().enumerate() {
                let rate = g[i][j];
                if rate == 0.0 {
                    continue;
                }
                let lj_adj = lj.adjoint();
                h_eff.axpy(Complex64::new(0.0, -0.5 * rate), &(&lj_adj * li));
                jumps.push((rate, li.clone(), lj_adj));
            }
        }
        let h_eff_adj = h_eff.adjoint();
        Ok(Generator {
            h_eff,
            h_eff_adj,
            jumps,
        })
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let minus_i = Complex64::new(0.0, -1.0);
        let mut out = (&(&self.h_eff * rho) - &(rho * &self.h_eff_adj)).scale(minus_i);
        for (rate, li, lj_adj) in &self.jumps {
            out.axpy(Complex64::new(*rate, 0.0), &(&(li * rho) * lj_adj));
        }
        out
    }
}

fn rk4_step(f: &Generator, y: &ComplexMatrix, dt: f64) -> ComplexMatrix {
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let k1 = f.apply(y);
    let mut y2 = y.clone();
    y2.axpy(half, &k1);
    let k2 = f.apply(&y2);
    let mut y3 = y.clone();
    y3.axpy(half, &k2);
    let k3 = f.apply(&y3);
    let mut y4 = y.clone();
    y4.axpy(full, &k3);
    let k4 = f.apply(&y4);

    let mut next = y.clone();
    let w = dt / 6.0;
    next.axpy(Complex64::new(w, 0.0), &k1);
    next.axpy(Complex64::new(2.0 * w, 0.0), &k2);
    next.axpy(Complex64::new(2.0 * w, 0.0), &k3);
    next.axpy(Complex64::new(w, 0.0), &k4);
    next
}

/// Options for [`lindblad_evolve_with`].
#[derive(Debug, Clone, Copy)]
pub struct LindbladOptions {
    /// Run the positivity check every this many steps (and at the end).
    pub check_every: usize,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        LindbladOptions { check_every: 10 }
    }
}

pub fn lindblad_evolve(
    spec: &LindbladSpec,
    rho0: &DensityMatrix,
    grid: GridSpec,
) -> Result<Evolution> {
    lindblad_evolve_with(spec, rho0, grid, LindbladOptions::default())
}

/// Classical fixed-step RK4. Fails with [`Error::StepSize`] instead of
/// renormalizing when trace or positivity drift out of tolerance.
pub fn lindblad_evolve_with(
    spec: &LindbladSpec,
    rho0: &DensityMatrix,
    grid: GridSpec,
    options: LindbladOptions,
) -> Result<Evolution> {
    spec.validate()?;
    if rho0.dim() != spec.hamiltonian.dim() {
        return Err(Error::Validation(format!(
            "state dim {} does not match Hamiltonian dim {}",
            rho0.dim(),
            spec.hamiltonian.dim()
        )));
    }
    let generator = Generator::new(spec)?;
    let dt = grid.dt();
    let times = grid.times();
    let check_every = options.check_every.max(1);

    let mut states = Vec::with_capacity(times.len());
    let mut current = rho0.matrix().clone();
    states.push(rho0.clone());
    for step in 1..=grid.steps {
        current = rk4_step(&generator, &current, dt);
        let drift = (current.trace() - Complex64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::StepSize(format!(
                "trace drifted by {drift:.3e} at t = {:.6}; use a finer grid than dt = {dt:e}",
                times[step]
            )));
        }
        if step % check_every == 0 || step == grid.steps {
            let min = jacobi_eigh(&current)?.values[0];
            if min < MIN_EIGENVALUE_TOL {
                return Err(Error::StepSize(format!(
                    "eigenvalue {min:.3e} at t = {:.6}; use a finer grid than dt = {dt:e}",
                    times[step]
                )));
            }
        }
        states.push(DensityMatrix::new_unchecked(current.clone()));
    }
    Ok(Evolution { times, states })
}
