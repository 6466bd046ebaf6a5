use proptest::prelude::*;
use qbm_core::*;

fn srt_bath(zeta: f64, tau: f64, kt: f64) -> Bath {
    Bath::new(BathSpec::single_relaxation(zeta, tau, 1.0, kt)).unwrap()
}

fn bath_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3f64..3.0, 0.05f64..1.0, 0.0f64..2.0)
}

fn state_params() -> impl Strategy<Value = (f64, f64)> {
    (0.2f64..3.0, 0.1f64..5.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariance_respects_uncertainty((zeta, tau, kt) in bath_params(), (sigma, d) in state_params(), t in 0.0f64..30.0) {
        let kin = srt_bath(zeta, tau, kt).kinetics(t).unwrap();
        let state = SuperpositionSpec::new(sigma, d, 1.0, 1.0).unwrap();
        let cov = covariance_coefficients(&kin, &state);
        prop_assert!(cov.a11 > 0.0 && cov.a22 > 0.0);
        prop_assert!(cov.determinant() > 0.25);
        prop_assert!(cov.uncertainty_excess(1.0) > 0.0);
    }

    #[test]
    fn characteristic_function_is_bounded(
        (zeta, tau, kt) in bath_params(),
        (sigma, d) in state_params(),
        t in 0.0f64..20.0,
        q1 in -3.0f64..3.0, p1 in -3.0f64..3.0, q2 in -3.0f64..3.0, p2 in -3.0f64..3.0,
    ) {
        let kin = srt_bath(zeta, tau, kt).kinetics(t).unwrap();
        let state = SuperpositionSpec::new(sigma, d, 1.0, 1.0).unwrap();
        let cov = covariance_coefficients(&kin, &state);
        let origin = char_fn_free(&cov, &kin, &state, 0.0, 0.0, 0.0, 0.0);
        prop_assert!((origin - 1.0).abs() < 1e-14);
        let w = char_fn_free(&cov, &kin, &state, q1, p1, q2, p2);
        prop_assert!(w.abs() <= 1.0 + 1e-12, "{}", w);
        let swapped = char_fn_free(&cov, &kin, &state, q2, p2, q1, p1);
        prop_assert!((w - swapped).abs() <= 1e-15 * w.abs().max(1e-300));
    }

    #[test]
    fn wigner_is_exchange_symmetric(
        (zeta, tau, kt) in bath_params(),
        (sigma, d) in state_params(),
        t in 0.0f64..20.0,
        q1 in -4.0f64..4.0, p1 in -2.0f64..2.0, q2 in -4.0f64..4.0, p2 in -2.0f64..2.0,
    ) {
        let kin = srt_bath(zeta, tau, kt).kinetics(t).unwrap();
        let state = SuperpositionSpec::new(sigma, d, 1.0, 1.0).unwrap();
        let cov = covariance_coefficients(&kin, &state);
        let sp = Superposition::new(&cov, &kin, &state).unwrap();
        let pt = PhasePoint4::new(q1, p1, q2, p2);
        let (a, b) = (sp.wigner(&pt), sp.wigner(&pt.swapped()));
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        let (pa, pb) = (sp.probability(q1, q2), sp.probability(q2, q1));
        prop_assert!(pa >= 0.0);
        prop_assert!((pa - pb).abs() <= 1e-14 * pa.max(1e-300));
    }

    #[test]
    fn visibility_lies_in_unit_interval((zeta, tau, kt) in bath_params(), (sigma, d) in state_params(), t in 0.0f64..50.0) {
        let kin = srt_bath(zeta, tau, kt).kinetics(t).unwrap();
        let state = SuperpositionSpec::new(sigma, d, 1.0, 1.0).unwrap();
        let a = coherence_visibility(&kin, &state);
        prop_assert!(a > 0.0 && a <= 1.0);
        if t == 0.0 {
            prop_assert_eq!(a, 1.0);
        }
    }

    #[test]
    fn tilde_identities((zeta, tau, kt) in bath_params(), (sigma, d) in state_params(), t in 0.0f64..30.0) {
        let kin = srt_bath(zeta, tau, kt).kinetics(t).unwrap();
        let state = SuperpositionSpec::new(sigma, d, 1.0, 1.0).unwrap();
        let cov = covariance_coefficients(&kin, &state);
        let tilde = tilde_coefficients(&cov, 1.0).unwrap();
        prop_assert!(tilde.t11 > 0.0 && tilde.t22 > 0.0);
        // The ratio of the diagonal is preserved.
        prop_assert!((tilde.t11 / tilde.t22 - cov.a11 / cov.a22).abs() <= 1e-12 * cov.a11 / cov.a22);
        // sqrt(T11 T22) = sqrt(A11 A22) - sqrt(A12^2 + hbar^2/4).
        let gap = (cov.a11 * cov.a22).sqrt() - (cov.a12 * cov.a12 + 0.25).sqrt();
        let got = (tilde.t11 * tilde.t22).sqrt();
        prop_assert!((got - gap).abs() <= 1e-9 * (cov.a11 * cov.a22).sqrt());
    }

    #[test]
    fn kl_coefficients_are_linear(
        zeta in 0.3f64..3.0,
        omega0 in 0.3f64..3.0,
        t in 0.0f64..10.0,
        a in prop::array::uniform4(-2.0f64..2.0),
        b in prop::array::uniform4(-2.0f64..2.0),
        lambda in -3.0f64..3.0,
    ) {
        let bath = Bath::new(BathSpec::ohmic_oscillator(zeta, omega0, 1.0, 0.5).with_cutoff(50.0)).unwrap();
        let kin = bath.kinetics(t).unwrap();
        let kl = |v: [f64; 4]| kl_coefficients(&kin, 1.0, v[0], v[1], v[2], v[3]).unwrap();
        let combo: [f64; 4] = std::array::from_fn(|i| a[i] + lambda * b[i]);
        let (x, y, z) = (kl(a), kl(b), kl(combo));
        for (u, v, w) in [(x.k1, y.k1, z.k1), (x.k2, y.k2, z.k2), (x.l1, y.l1, z.l1), (x.l2, y.l2, z.l2)] {
            let want = u + lambda * v;
            prop_assert!((w - want).abs() <= 1e-12 * (u.abs() + lambda.abs() * v.abs()).max(1.0));
        }
    }

    #[test]
    fn initial_state_is_entangled(log_ratio in -6.0f64..6.0, lambda in 0.01f64..100.0) {
        let sigma = lambda * 10f64.powf(log_ratio / 2.0);
        let c = initial_criterion(sigma, lambda);
        prop_assert!(c.is_finite() && c < 0.0);
    }
}
