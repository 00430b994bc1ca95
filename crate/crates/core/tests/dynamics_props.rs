use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qledger_core::dynamics::{lindblad_evolve, schrodinger_evolve, GridSpec, LindbladSpec};
use qledger_core::models::{embed, sigma_minus, sigma_plus};
use qledger_core::qcore::random::{random_density, random_hermitian, random_pure_state};
use qledger_core::qcore::{ComplexMatrix, DensityMatrix, HermitianOperator};
use qledger_core::thermo::gibbs_state;
use qledger_core::Error;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn decay_error(gamma: f64, t: f64, dt: f64) -> f64 {
    let spec = LindbladSpec::new(
        HermitianOperator::diagonal(&[0.0, 1.0]),
        vec![(sigma_minus(), gamma)],
    );
    let steps = (t / dt).round() as usize;
    let ev = lindblad_evolve(
        &spec,
        &DensityMatrix::basis(2, 1),
        GridSpec::new(t, steps).unwrap(),
    )
    .unwrap();
    ev.times
        .iter()
        .zip(&ev.states)
        .map(|(s, rho)| (rho.matrix()[(1, 1)].re - (-gamma * s).exp()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn rk4_is_fourth_order() {
    let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&dt| decay_error(4.0, 1.0, dt))
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 16.0).abs() <= 4.0, "errors {errors:?}");
    }
}

#[test]
fn amplitude_damping_reaches_closed_form() {
    assert!(decay_error(1.0, 1.0, 1e-3) < 1e-6);
}

#[test]
fn two_qubit_exchange_keeps_swap_symmetry() {
    let dims = [2, 2];
    let swap = ComplexMatrix::from_fn(4, |i, j| {
        let (a, b) = (i / 2, i % 2);
        Complex64::new(if j == b * 2 + a { 1.0 } else { 0.0 }, 0.0)
    });
    let hop = &embed(&sigma_plus(), 0, &dims) * &embed(&sigma_minus(), 1, &dims);
    let n = ComplexMatrix::unit(2, 1, 1);
    let free = &embed(&n, 0, &dims) + &embed(&n, 1, &dims);
    let h = &free + &(&hop + &hop.adjoint()).scale_real(-0.8);
    let jumps = vec![
        (embed(&sigma_minus(), 0, &dims), 0.2),
        (embed(&sigma_minus(), 1, &dims), 0.2),
    ];
    let spec = LindbladSpec::new(HermitianOperator::new(h).unwrap(), jumps);
    let mut r = rng(41);
    for _ in 0..5 {
        let raw = random_density(&mut r, 4);
        let sym =
            DensityMatrix::new((raw.matrix() + raw.conjugate_by(&swap).matrix()).scale_real(0.5))
                .unwrap();
        let ev = lindblad_evolve(&spec, &sym, GridSpec::new(5.0, 2000).unwrap()).unwrap();
        for rho in &ev.states {
            assert!((rho.matrix()[(1, 1)].re - rho.matrix()[(2, 2)].re).abs() < 1e-12);
            assert!(rho.conjugate_by(&swap).matrix().max_abs_diff(rho.matrix()) < 1e-12);
        }
    }
}

#[test]
fn correlated_decay_is_accepted_and_trace_preserving() {
    let dims = [2, 2];
    let l1 = embed(&sigma_minus(), 0, &dims);
    let l2 = embed(&sigma_minus(), 1, &dims);
    let n = ComplexMatrix::unit(2, 1, 1);
    let h = HermitianOperator::new(&embed(&n, 0, &dims) + &embed(&n, 1, &dims)).unwrap();
    // Fully correlated: rate matrix [[γ, γ], [γ, γ]] is PSD and singular.
    let spec = LindbladSpec::new(h, vec![(l1, 0.5), (l2, 0.5)]).with_cross_terms(vec![(0, 1, 0.5)]);
    // The antisymmetric single-excitation state is dark under collective decay.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    let dark = DensityMatrix::new(ComplexMatrix::outer(&psi, &psi)).unwrap();
    let ev = lindblad_evolve(&spec, &dark, GridSpec::new(4.0, 2000).unwrap()).unwrap();
    for rho in &ev.states {
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(rho.matrix().max_abs_diff(dark.matrix()) < 1e-10);
    }
}

#[test]
fn non_psd_cross_terms_rejected() {
    let l = sigma_minus();
    let spec = LindbladSpec::new(HermitianOperator::zero(2), vec![(l.clone(), 0.1), (l, 0.1)])
        .with_cross_terms(vec![(0, 1, 0.5)]);
    let err = lindblad_evolve(
        &spec,
        &DensityMatrix::basis(2, 0),
        GridSpec::new(1.0, 10).unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Parameter(_)));
}

#[test]
fn step_size_error_names_the_remedy() {
    let spec = LindbladSpec::new(
        HermitianOperator::diagonal(&[0.0, 1.0]),
        vec![(sigma_minus(), 100.0)],
    );
    let err = lindblad_evolve(
        &spec,
        &DensityMatrix::basis(2, 1),
        GridSpec::new(1.0, 20).unwrap(),
    )
    .unwrap_err();
    assert_eq!(err.code(), "step_size");
    assert!(err.to_string().contains("finer grid"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lindblad_keeps_hermiticity_and_trace(seed in any::<u64>(), dim in 2usize..5) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, dim, 1.0);
        let jumps = (0..2).map(|_| (random_hermitian(&mut r, dim, 0.5).into_matrix(), r.random_range(0.0..0.5))).collect();
        let spec = LindbladSpec::new(h, jumps);
        let ev = lindblad_evolve(&spec, &random_density(&mut r, dim), GridSpec::new(1.0, 500).unwrap()).unwrap();
        for rho in &ev.states {
            prop_assert!(rho.matrix().hermitian_deviation() <= 1e-10);
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn unitary_evolution_conserves_energy_and_purity(seed in any::<u64>(), dim in 1usize..7) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, dim, 1.0);
        let psi = random_pure_state(&mut r, dim);
        let ev = schrodinger_evolve(&h, &psi, GridSpec::new(10.0, 1000).unwrap()).unwrap();
        let e0 = h.expectation(&psi.projector());
        for s in &ev.states {
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
            let rho = s.projector();
            prop_assert!((h.expectation(&rho) - e0).abs() <= 1e-10);
            prop_assert!((rho.purity() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn detailed_balance_fixes_gibbs_state(omega in 0.2f64..3.0, gamma in 0.05f64..2.0, beta in 0.1f64..3.0) {
        let spec = LindbladSpec::thermal_two_level(omega, gamma, beta);
        let (pi, _) = gibbs_state(&spec.hamiltonian, beta).unwrap();
        let ev = lindblad_evolve(&spec, &pi, GridSpec::new(2.0, 400).unwrap()).unwrap();
        for rho in &ev.states {
            prop_assert!(rho.matrix().max_abs_diff(pi.matrix()) <= 1e-8);
        }
    }
}
