//! Trajectory-level quantifiers: irreversible entropy, its rate
//! (non-Markovianity), charging power, relative entropy of coherence and the
//! coherent/incoherent power split.
//!
//! All time derivatives use second-order finite differences on the
//! trajectory's uniform grid: central differences inside, one-sided
//! three-point stencils at the ends.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityMatrix, HermitianOperator, HERMITIAN_TOL, TRACE_TOL};
use crate::thermo::{shannon_entropy, von_neumann_entropy, Thermal};

/// Relative spacing error tolerated when checking that a grid is uniform.
const GRID_TOL: f64 = 1e-9;

/// Hamiltonian along a trajectory.
#[derive(Debug, Clone)]
pub enum HamiltonianSchedule {
    Constant(HermitianOperator),
    PerStep(Vec<HermitianOperator>),
}

impl HamiltonianSchedule {
    pub fn at(&self, k: usize) -> &HermitianOperator {
        match self {
            HamiltonianSchedule::Constant(h) => h,
            HamiltonianSchedule::PerStep(hs) => &hs[k],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, HamiltonianSchedule::Constant(_))
    }
}

/// States and Hamiltonians on a uniform time grid at a fixed inverse
/// temperature.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    hamiltonians: HamiltonianSchedule,
    beta: f64,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<DensityMatrix>,
        hamiltonians: HamiltonianSchedule,
        beta: f64,
    ) -> Result<Self> {
        if times.len() < 3 {
            return Err(Error::Validation(format!(
                "trajectory needs at least 3 grid points, got {}",
                times.len()
            )));
        }
        if states.len() != times.len() {
            return Err(Error::Validation(format!(
                "trajectory has {} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if let HamiltonianSchedule::PerStep(hs) = &hamiltonians {
            if hs.len() != times.len() {
                return Err(Error::Validation(format!(
                    "trajectory has {} times but {} Hamiltonians",
                    times.len(),
                    hs.len()
                )));
            }
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Validation(format!(
                "inverse temperature must be positive, got {beta}"
            )));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::Validation(
                "time grid must be strictly increasing".into(),
            ));
        }
        for (k, w) in times.windows(2).enumerate() {
            let step = w[1] - w[0];
            if (step - dt).abs() > GRID_TOL * dt + 8.0 * f64::EPSILON * times[k + 1].abs() {
                return Err(Error::Validation(format!(
                    "time grid is not uniform at index {k}: step {step} vs {dt}"
                )));
            }
        }
        let dim = states[0].dim();
        for (k, rho) in states.iter().enumerate() {
            if rho.dim() != dim || hamiltonians.at(k).dim() != dim {
                return Err(Error::Validation(format!(
                    "dimension mismatch at trajectory index {k}"
                )));
            }
            let tr = rho.matrix().trace();
            if (tr.re - 1.0).abs() > TRACE_TOL || rho.matrix().hermitian_deviation() > HERMITIAN_TOL
            {
                return Err(Error::Validation(format!(
                    "state at trajectory index {k} is not a valid density matrix (trace {:.12})",
                    tr.re
                )));
            }
        }
        Ok(Trajectory {
            times,
            states,
            hamiltonians,
            beta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn hamiltonians(&self) -> &HamiltonianSchedule {
        &self.hamiltonians
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dt(&self) -> f64 {
        (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Same states and Hamiltonians at a different inverse temperature.
    pub fn with_beta(&self, beta: f64) -> Result<Trajectory> {
        Trajectory::new(
            self.times.clone(),
            self.states.clone(),
            self.hamiltonians.clone(),
            beta,
        )
    }
}

/// Second-order first derivative on a uniform grid (needs ≥ 3 samples).
pub fn derivative(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3, "finite differences need at least 3 samples");
    let h2 = 2.0 * dt;
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) / h2);
    for k in 1..n - 1 {
        d.push((values[k + 1] - values[k - 1]) / h2);
    }
    d.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / h2);
    d
}

/// Orthonormal energy eigenbasis of `H` used for dephasing. Inside a
/// degenerate eigenspace the basis is fixed by Gram-Schmidt on the projected
/// computational basis vectors (largest residual first, lowest index on
/// ties), so a diagonal `H` always yields the computational basis.
pub fn dephasing_basis(h: &HermitianOperator) -> Result<ComplexMatrix> {
    let eig = h.eig()?;
    let n = eig.dim();
    let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale;

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= tol {
            end += 1;
        }
        if end - start == 1 {
            columns.push(eig.vectors.column(start));
        } else {
            columns.extend(resolve_cluster(&eig.vectors, start, end));
        }
        start = end;
    }
    Ok(ComplexMatrix::from_fn(n, |i, j| columns[j][i]))
}

fn resolve_cluster(vectors: &ComplexMatrix, start: usize, end: usize) -> Vec<Vec<Complex64>> {
    let n = vectors.dim();
    let dot = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    };
    let cluster: Vec<Vec<Complex64>> = (start..end).map(|j| vectors.column(j)).collect();
    // P e_k for every computational basis vector.
    let projected: Vec<Vec<Complex64>> = (0..n)
        .map(|k| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for w in &cluster {
                let c = w[k].conj();
                for (x, wi) in v.iter_mut().zip(w) {
                    *x += c * wi;
                }
            }
            v
        })
        .collect();

    let mut chosen: Vec<Vec<Complex64>> = Vec::with_capacity(cluster.len());
    while chosen.len() < cluster.len() {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for p in &projected {
            let mut r = p.clone();
            for _ in 0..2 {
                for q in &chosen {
                    let c = dot(q, &r);
                    for (x, qi) in r.iter_mut().zip(q) {
                        *x -= c * qi;
                    }
                }
            }
            let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b + 1e-12) {
                best = Some((norm, r));
            }
        }
        let (norm, mut r) = best.expect("cluster has at least one direction");
        for x in r.iter_mut() {
            *x /= norm;
        }
        chosen.push(r);
    }
    chosen
}

/// Populations `⟨u_k|ρ|u_k⟩` in the columns of `basis`.
fn populations_in(basis: &ComplexMatrix, rho: &DensityMatrix) -> Vec<f64> {
    let n = basis.dim();
    let m = rho.matrix();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let ui = basis[(i, k)].conj();
                for j in 0..n {
                    acc += ui * m[(i, j)] * basis[(j, k)];
                }
            }
            acc.re
        })
        .collect()
}

/// Energy-basis dephasing `Δρ`: keeps the energy-basis diagonal of `ρ`.
pub fn dephase(rho: &DensityMatrix, h: &HermitianOperator) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::Validation(format!(
            "dephasing: dimension mismatch ({} vs {})",
            rho.dim(),
            h.dim()
        )));
    }
    let basis = dephasing_basis(h)?;
    let p = populations_in(&basis, rho);
    Ok(DensityMatrix::new_unchecked(
        ComplexMatrix::conjugate_diagonal(&basis, &p),
    ))
}

/// Relative entropy of coherence `C_r = S(Δρ) − S(ρ)`.
pub fn coherence(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    let d = dephase(rho, h)?;
    Ok(von_neumann_entropy(&d)? - von_neumann_entropy(rho)?)
}

/// Per-point quantities along a trajectory.
#[derive(Debug, Clone)]
struct Pointwise {
    energy: Vec<f64>,
    entropy: Vec<f64>,
    dephased_entropy: Vec<f64>,
    coherence: Vec<f64>,
    /// `S(ρ_k‖π^β_k)`
    gibbs_divergence: Vec<f64>,
    log_z: Vec<f64>,
    /// `W_f` by the free-energy route.
    work: Vec<f64>,
}

fn pointwise(tr: &Trajectory) -> Result<Pointwise> {
    let n = tr.len();
    let beta = tr.beta;
    let mut out = Pointwise {
        energy: Vec::with_capacity(n),
        entropy: Vec::with_capacity(n),
        dephased_entropy: Vec::with_capacity(n),
        coherence: Vec::with_capacity(n),
        gibbs_divergence: Vec::with_capacity(n),
        log_z: Vec::with_capacity(n),
        work: Vec::with_capacity(n),
    };
    let mut cached: Option<(Thermal, ComplexMatrix)> = None;
    for (k, rho) in tr.states.iter().enumerate() {
        let h = tr.hamiltonians.at(k);
        if cached.is_none() || !tr.hamiltonians.is_constant() {
            cached = Some((Thermal::new(h, beta)?, dephasing_basis(h)?));
        }
        let (thermal, basis) = cached.as_ref().expect("filled above");
        let e = h.expectation(rho);
        let s = von_neumann_entropy(rho)?;
        let sd = shannon_entropy(&populations_in(basis, rho));
        out.energy.push(e);
        out.entropy.push(s);
        out.dephased_entropy.push(sd);
        out.coherence.push(sd - s);
        out.gibbs_divergence
            .push(-s + beta * e + thermal.spec.log_z);
        out.log_z.push(thermal.spec.log_z);
        out.work.push(e - s / beta - thermal.free_energy());
    }
    Ok(out)
}

/// `S_ir(t_k) = S(ρ₀‖π^β₀) − S(ρ_k‖π^β_k)`.
pub fn irreversible_entropy_series(tr: &Trajectory) -> Result<Vec<f64>> {
    let p = pointwise(tr)?;
    Ok(s_ir_from(&p.gibbs_divergence))
}

fn s_ir_from(divergence: &[f64]) -> Vec<f64> {
    let d0 = divergence[0];
    divergence.iter().map(|d| d0 - d).collect()
}

/// `I(t) = −dS_ir/dt`.
pub fn non_markovianity_series(tr: &Trajectory) -> Result<Vec<f64>> {
    let s_ir = irreversible_entropy_series(tr)?;
    Ok(derivative(&s_ir, tr.dt()).into_iter().map(|d| -d).collect())
}

/// `P(t) = β⁻¹ I(t)`.
pub fn charging_power_series(tr: &Trajectory) -> Result<Vec<f64>> {
    let beta = tr.beta;
    Ok(non_markovianity_series(tr)?
        .into_iter()
        .map(|i| i / beta)
        .collect())
}

/// `P^c(t) = β⁻¹ dC_r/dt`.
pub fn coherent_power_series(tr: &Trajectory) -> Result<Vec<f64>> {
    let p = pointwise(tr)?;
    let beta = tr.beta;
    Ok(derivative(&p.coherence, tr.dt())
        .into_iter()
        .map(|d| d / beta)
        .collect())
}

/// `P^i(t) = dE/dt − β⁻¹(dS(Δρ)/dt − d ln Z/dt)`.
pub fn incoherent_power_series(tr: &Trajectory) -> Result<Vec<f64>> {
    let p = pointwise(tr)?;
    Ok(incoherent_from(&p, tr))
}

fn incoherent_from(p: &Pointwise, tr: &Trajectory) -> Vec<f64> {
    let dt = tr.dt();
    let beta = tr.beta;
    let de = derivative(&p.energy, dt);
    let dsd = derivative(&p.dephased_entropy, dt);
    if tr.hamiltonians.is_constant() {
        de.iter().zip(&dsd).map(|(e, s)| e - s / beta).collect()
    } else {
        let dlz = derivative(&p.log_z, dt);
        de.iter()
            .zip(&dsd)
            .zip(&dlz)
            .map(|((e, s), z)| e - (s - z) / beta)
            .collect()
    }
}

/// Every measure of a trajectory on its own grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub times: Vec<f64>,
    /// `E = Tr[ρH]`
    pub energy: Vec<f64>,
    /// `S(ρ)`
    pub entropy: Vec<f64>,
    /// `C_r`
    pub coherence: Vec<f64>,
    pub s_ir: Vec<f64>,
    /// `I = −dS_ir/dt`
    pub non_markovianity: Vec<f64>,
    /// `P = β⁻¹ I`
    pub power: Vec<f64>,
    /// `P^c`
    pub coherent_power: Vec<f64>,
    /// `P^i`
    pub incoherent_power: Vec<f64>,
    /// `W_f`
    pub work: Vec<f64>,
}

pub const CSV_HEADER: &str = "t,E,S,C_r,S_ir,I,P,P_c,P_i,W_f";

impl MeasureSeries {
    pub fn compute(tr: &Trajectory) -> Result<Self> {
        let p = pointwise(tr)?;
        let dt = tr.dt();
        let beta = tr.beta;
        let s_ir = s_ir_from(&p.gibbs_divergence);
        let non_markovianity: Vec<f64> = derivative(&s_ir, dt).into_iter().map(|d| -d).collect();
        let power = non_markovianity.iter().map(|i| i / beta).collect();
        let coherent_power = derivative(&p.coherence, dt)
            .into_iter()
            .map(|d| d / beta)
            .collect();
        let incoherent_power = incoherent_from(&p, tr);
        Ok(MeasureSeries {
            times: tr.times.clone(),
            energy: p.energy,
            entropy: p.entropy,
            coherence: p.coherence,
            s_ir,
            non_markovianity,
            power,
            coherent_power,
            incoherent_power,
            work: p.work,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn columns(&self) -> [&Vec<f64>; 10] {
        [
            &self.times,
            &self.energy,
            &self.entropy,
            &self.coherence,
            &self.s_ir,
            &self.non_markovianity,
            &self.power,
            &self.coherent_power,
            &self.incoherent_power,
            &self.work,
        ]
    }

    /// Column by its CSV header name.
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        CSV_HEADER
            .split(',')
            .position(|c| c == name)
            .map(|i| self.columns()[i].as_slice())
    }

    /// CSV with the fixed header, 12 significant digits per value. Each line
    /// of `comment` is emitted first, prefixed with `# `.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            for line in c.lines() {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        let cols = self.columns();
        for k in 0..self.len() {
            for (i, col) in cols.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:.11e}", col[k]);
            }
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`MeasureSeries::to_csv`]; `#` lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Validation("empty CSV".into()))?;
        if header.trim() != CSV_HEADER {
            return Err(Error::Validation(format!(
                "unexpected CSV header {header:?}"
            )));
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 10];
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(Error::Validation(format!(
                    "CSV row {row} has {} fields, expected 10",
                    fields.len()
                )));
            }
            for (c, f) in fields.iter().enumerate() {
                let v: f64 = f
                    .trim()
                    .parse()
                    .map_err(|_| Error::Validation(format!("CSV row {row}: cannot parse {f:?}")))?;
                cols[c].push(v);
            }
        }
        let mut it = cols.into_iter();
        let mut next = || it.next().expect("ten columns");
        Ok(MeasureSeries {
            times: next(),
            energy: next(),
            entropy: next(),
            coherence: next(),
            s_ir: next(),
            non_markovianity: next(),
            power: next(),
            coherent_power: next(),
            incoherent_power: next(),
            work: next(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h01() -> HermitianOperator {
        HermitianOperator::diagonal(&[0.0, 1.0])
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap()
    }

    fn constant_trajectory(rho: DensityMatrix, n: usize) -> Trajectory {
        let times = (0..n).map(|k| k as f64 * 0.1).collect();
        Trajectory::new(
            times,
            vec![rho; n],
            HamiltonianSchedule::Constant(h01()),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn dephase_examples() {
        let d = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(dephase(&d, &h01()).unwrap().matrix(), d.matrix());
        let out = dephase(&plus(), &h01()).unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-15
        );
    }

    #[test]
    fn degenerate_diagonal_hamiltonian_dephases_in_computational_basis() {
        // |+> on the degenerate {|10>, |01>} block keeps no coherence.
        let h = HermitianOperator::diagonal(&[0.0, 1.0, 1.0, 2.0]);
        let s = 0.5;
        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, s, s, 0.0],
            &[0.0, s, s, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]))
        .unwrap();
        let d = dephase(&rho, &h).unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.5, 0.0]);
        assert!(d.matrix().max_abs_diff(&expect) < 1e-15);
        assert!((coherence(&rho, &h).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn coherence_examples() {
        assert!(
            coherence(&DensityMatrix::diagonal(&[0.2, 0.8]).unwrap(), &h01())
                .unwrap()
                .abs()
                < 1e-15
        );
        let c = coherence(&plus(), &h01()).unwrap();
        assert!((c - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn constant_trajectory_gives_zero_series() {
        let tr = constant_trajectory(plus(), 7);
        let m = MeasureSeries::compute(&tr).unwrap();
        for col in [
            &m.s_ir,
            &m.non_markovianity,
            &m.power,
            &m.coherent_power,
            &m.incoherent_power,
        ] {
            assert!(col.iter().all(|v| v.abs() < 1e-12), "{col:?}");
        }
    }

    #[test]
    fn derivative_of_linear_is_exact() {
        let v: Vec<f64> = (0..10).map(|k| 2.0 + 0.3 * k as f64).collect();
        for d in derivative(&v, 0.3) {
            assert!((d - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn trajectory_validation() {
        let times = vec![0.0, 0.1];
        let r = Trajectory::new(
            times,
            vec![plus(); 2],
            HamiltonianSchedule::Constant(h01()),
            1.0,
        );
        assert!(r.is_err());
        let times = vec![0.0, 0.1, 0.3];
        let r = Trajectory::new(
            times,
            vec![plus(); 3],
            HamiltonianSchedule::Constant(h01()),
            1.0,
        );
        assert!(r.unwrap_err().to_string().contains("uniform"));
        let times = vec![0.0, 0.1, 0.2];
        let r = Trajectory::new(
            times,
            vec![plus(); 3],
            HamiltonianSchedule::Constant(h01()),
            0.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn csv_header_and_comment() {
        let m = MeasureSeries::compute(&constant_trajectory(plus(), 3)).unwrap();
        let csv = m.to_csv(Some("a=1\nb=2"));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# a=1"));
        assert_eq!(lines.next(), Some("# b=2"));
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(csv.lines().count(), 6);
        let back = MeasureSeries::from_csv(&csv).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(m.column("P").unwrap().len(), 3);
        assert!(m.column("nope").is_none());
    }
}
