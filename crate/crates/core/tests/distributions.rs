use qbm_core::wigner::{attenuation_exponent, interference_phase, AxisSpec, Superposition};
use qbm_core::*;

fn fig1_bath() -> Bath {
    Bath::new(BathSpec::single_relaxation(1.0, 1.0 / 6.0, 1.0, 0.0)).unwrap()
}

/// Characteristic function of the prepared state at t = 0, by direct 2D
/// quadrature of `∫ dq exp(-i q.P/hbar) <q - Q/2| rho |q + Q/2>`.
///
/// The state is the two-packet measurement applied to a free thermal state,
/// whose position matrix elements are `exp(-m^2 v2 (x' - x)^2 / 2 hbar^2)`.
fn prepared_char_fn(state: &SuperpositionSpec, v2: f64, q1: f64, p1: f64, q2: f64, p2: f64) -> f64 {
    let (s2, h, hbar, m) = (state.sigma * state.sigma, 0.5 * state.d, state.hbar, state.mass);
    let f = |x1: f64, x2: f64| {
        (-((x1 - h).powi(2) + (x2 + h).powi(2)) / (4.0 * s2)).exp()
            + (-((x1 + h).powi(2) + (x2 - h).powi(2)) / (4.0 * s2)).exp()
    };
    let thermal = (-m * m * v2 * (q1 * q1 + q2 * q2) / (2.0 * hbar * hbar)).exp();
    let width = h + 12.0 * state.sigma;
    let n = 1201;
    let step = 2.0 * width / (n - 1) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let x1 = -width + i as f64 * step;
        for j in 0..n {
            let x2 = -width + j as f64 * step;
            let rho = f(x1 - 0.5 * q1, x2 - 0.5 * q2) * f(x1 + 0.5 * q1, x2 + 0.5 * q2);
            num += rho * ((x1 * p1 + x2 * p2) / hbar).cos();
            den += f(x1, x2).powi(2);
        }
    }
    thermal * num / den
}

#[test]
fn initial_characteristic_function_matches_prepared_state() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(0.9, 1.7, 1.0, 1.0).unwrap();
    let kin = bath.kinetics(0.0).unwrap();
    let cov = covariance_coefficients(&kin, &state);
    for (q1, p1, q2, p2) in [
        (0.0, 0.0, 0.0, 0.0),
        (0.4, 0.0, 0.0, 0.0),
        (0.0, 1.1, 0.0, 0.0),
        (0.3, -0.8, -0.5, 0.6),
        (1.2, 2.0, 0.1, -1.5),
    ] {
        let oracle = prepared_char_fn(&state, kin.v2, q1, p1, q2, p2);
        let got = char_fn_free(&cov, &kin, &state, q1, p1, q2, p2);
        assert!((got - oracle).abs() < 1e-10, "({q1},{p1},{q2},{p2}): {got} vs {oracle}");
    }
}

#[test]
fn general_form_reduces_to_free_form() {
    // A very soft oscillator: <x^2> ~ kT / m w0^2 dwarfs sigma^2 and s.
    let bath = Bath::new(BathSpec::ohmic_oscillator(1.0, 1e-3, 1.0, 1.0).with_cutoff(50.0)).unwrap();
    let state = SuperpositionSpec::new(1.0, 2.0, 1.0, 1.0).unwrap();
    for t in [0.5, 2.0] {
        let kin = bath.kinetics(t).unwrap();
        assert!(kin.x2().unwrap() > 1e5);
        let cov = covariance_coefficients(&kin, &state);
        for (q1, p1, q2, p2) in [(0.2, 0.3, -0.1, 0.5), (0.5, -0.4, 0.3, 0.1), (0.0, 0.6, 0.0, -0.6)] {
            let general = char_fn_general(&kin, &state, q1, p1, q2, p2).unwrap();
            let free = char_fn_free(&cov, &kin, &state, q1, p1, q2, p2);
            assert!(
                ((general - free) / free).abs() < 1e-4,
                "t={t} ({q1},{p1},{q2},{p2}): {general} vs {free}"
            );
        }
    }
}

#[test]
fn probability_is_momentum_marginal_of_wigner() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(1.2, 2.5, 1.0, 1.0).unwrap();
    for t in [0.0, 1.0, 5.0] {
        let kin = bath.kinetics(t).unwrap();
        let cov = covariance_coefficients(&kin, &state);
        let sp = Superposition::new(&cov, &kin, &state).unwrap();
        let momentum = AxisSpec::new(8.0 * cov.a22.sqrt(), 128).unwrap();
        let lq = 0.5 * state.d + 3.0 * cov.a11.sqrt();
        for i in 0..9 {
            for j in 0..9 {
                let q1 = -lq + 2.0 * lq * i as f64 / 8.0;
                let q2 = -lq + 2.0 * lq * j as f64 / 8.0;
                let marginal = sp.marginal_probability(q1, q2, &momentum);
                let direct = sp.probability(q1, q2);
                assert!((marginal - direct).abs() < 1e-4 * direct.max(1e-3), "t={t} ({q1},{q2})");
            }
        }
    }
}

#[test]
fn direct_peaks_sit_at_the_packet_centres() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(0.5, 6.0, 1.0, 1.0).unwrap();
    let kin = bath.kinetics(0.0).unwrap();
    let cov = covariance_coefficients(&kin, &state);
    let sp = Superposition::new(&cov, &kin, &state).unwrap();
    let h = 0.5 * state.d;
    for (c1, c2) in [(h, -h), (-h, h)] {
        let centre = sp.probability(c1, c2);
        for (dx, dy) in [(0.05, 0.0), (-0.05, 0.0), (0.0, 0.05), (0.0, -0.05)] {
            assert!(sp.probability(c1 + dx, c2 + dy) < centre);
        }
    }
    assert!(sp.probability(h, h) < 1e-20);
}

#[test]
fn fringe_wavenumber_in_probability() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(1.0, 3.0, 1.0, 1.0).unwrap();
    let kin = bath.kinetics(2.0).unwrap();
    let cov = covariance_coefficients(&kin, &state);
    let sp = Superposition::new(&cov, &kin, &state).unwrap();
    // Along q1 = -q2 = u the interference term is 2 a exp(-d^2/4A11) P0(u)^2 cos(2 k u).
    let k = state.hbar * kin.g * state.d / (4.0 * cov.a11 * state.sigma * state.sigma);
    let a = coherence_visibility(&kin, &state);
    let norm = 1.0 / (2.0 * (1.0 + (-state.overlap_exponent()).exp()));
    let p0 = |q: f64| (-q * q / (2.0 * cov.a11)).exp() / (2.0 * std::f64::consts::PI * cov.a11).sqrt();
    let h = 0.5 * state.d;
    for u in [0.0, 0.3, 0.9] {
        let direct = p0(u - h) * p0(-u + h) + p0(u + h) * p0(-u - h);
        let fringe = sp.probability(u, -u) / norm - direct;
        let want = 2.0 * a * (-state.d * state.d / (4.0 * cov.a11)).exp() * p0(u) * p0(u) * (2.0 * k * u).cos();
        assert!((fringe - want).abs() < 1e-14, "u={u}");
    }
}

#[test]
fn late_ohmic_limits() {
    let bath = Bath::new(BathSpec::ohmic_free(1.0, 1.0, 1.0).with_cutoff(100.0)).unwrap();
    let state = SuperpositionSpec::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let kin = bath.kinetics(1e5).unwrap();
    let cov = covariance_coefficients(&kin, &state);
    assert!((cov.a11 / kin.s - 1.0).abs() < 1e-4);
    let a = attenuation_exponent(&cov, &kin, &state);
    let limit = state.overlap_exponent();
    assert!(a < limit && limit - a < 1e-4 * limit, "{a} vs {limit}");
    let vis = coherence_visibility(&kin, &state);
    assert!(vis > (-limit).exp() && vis - (-limit).exp() < 1e-5);
}

#[test]
fn covariance_is_continuous_in_time() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(1.0, 2.0, 1.0, 1.0).unwrap();
    for t in [0.0, 0.5, 3.0, 20.0] {
        let a = covariance_coefficients(&bath.kinetics(t).unwrap(), &state);
        let mut last = f64::INFINITY;
        for delta in [1e-2, 1e-3, 1e-4] {
            let b = covariance_coefficients(&bath.kinetics(t + delta).unwrap(), &state);
            let jump = (a.a11 - b.a11).abs() + (a.a12 - b.a12).abs() + (a.a22 - b.a22).abs();
            assert!(jump < last, "t={t} delta={delta}");
            last = jump;
        }
        assert!(last < 1e-3);
    }
}

#[test]
fn initial_a12_vanishes() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let cov = covariance_coefficients(&bath.kinetics(0.0).unwrap(), &state);
    assert_eq!(cov.a12, 0.0);
}

#[test]
fn wigner_grid_is_exchange_symmetric_and_thread_independent() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let kin = bath.kinetics(1.0).unwrap();
    let cov = covariance_coefficients(&kin, &state);
    let sp = Superposition::new(&cov, &kin, &state).unwrap();
    let grid = GridSpec::default_wigner(&cov, &state, 12).unwrap();
    let many = sp.wigner_grid(&grid).unwrap();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| sp.wigner_grid(&grid).unwrap());
    assert_eq!(many, one);
    let swapped = many.clone().permuted_axes(vec![2, 3, 0, 1]);
    for (a, b) in many.iter().zip(swapped.iter()) {
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
    }
    let i1 = sp.wigner_integral(&grid).unwrap();
    let i2 = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| sp.wigner_integral(&grid).unwrap());
    assert_eq!(i1.to_bits(), i2.to_bits());
}

#[test]
fn interference_phase_matches_wigner_fringe() {
    let bath = fig1_bath();
    let state = SuperpositionSpec::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let kin = bath.kinetics(1.5).unwrap();
    let cov = covariance_coefficients(&kin, &state);
    let sp = Superposition::new(&cov, &kin, &state).unwrap();
    // Along q1 = -q2, p1 = -p2 both direct terms are equal, and the fringe carries cos(phi(2q, 2p)).
    let (q, p) = (0.2, 0.35);
    let pt = PhasePoint4::new(q, p, -q, -p);
    let w0 = |q: f64, p: f64| qbm_core::wigner::single_packet_wigner(&cov, q, p);
    let h = 0.5 * state.d;
    let norm = 1.0 / (2.0 * (1.0 + (-state.overlap_exponent()).exp()));
    let direct = w0(q - h, p) * w0(-q + h, -p) + w0(q + h, p) * w0(-q - h, -p);
    let fringe = sp.wigner(&pt) / norm - direct;
    let want = 2.0
        * (-attenuation_exponent(&cov, &kin, &state)).exp()
        * w0(q, p)
        * w0(-q, -p)
        * interference_phase(&cov, &kin, &state, 2.0 * q, 2.0 * p).cos();
    assert!((fringe - want).abs() < 1e-14 * direct.max(want.abs()).max(1e-10));
}
