#![allow(dead_code)]

use std::f64::consts::PI;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use qbm_core::entanglement::{p_function_bracket, strong_coherent_wavefunction};
use qbm_core::numerics::{dft_nd, Direction, FourierAxis};
use qbm_core::wigner::Superposition;
use qbm_core::{
    char_fn_free, CovarianceTriple, KineticCoefficients, PhasePoint4, StrongCoherentParams, SuperpositionSpec,
    TildeCoefficients,
};

/// Max |DFT(char fn) - W| over the grid, relative to the peak of W.
///
/// Extents are balanced so that both the Wigner function and its characteristic
/// function fall off by the same number of standard deviations at the grid edge.
pub fn transform_pair_error(
    cov: &CovarianceTriple,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    n: usize,
) -> f64 {
    let hbar = state.hbar;
    let det = cov.determinant();
    let budget = n as f64 * PI / 2.0;
    let cp = (budget / (cov.a11 * cov.a22 / det).sqrt()).sqrt();
    let lp = cp * cov.a22.sqrt();
    let a = (cov.a11 * cov.a22 / det).sqrt();
    let b = 0.5 * state.d * (cov.a22 / det).sqrt();
    let cq = (-b + (b * b + 4.0 * a * budget).sqrt()) / (2.0 * a);
    let lq = 0.5 * state.d + cq * cov.a11.sqrt();
    let (q_axis, p_axis) = (
        FourierAxis::spanning(lq, n).unwrap(),
        FourierAxis::spanning(lp, n).unwrap(),
    );
    let (big_p, big_q) = (q_axis.conjugate(hbar), p_axis.conjugate(hbar));
    let mut values = ArrayD::from_shape_fn(IxDyn(&[n, n, n, n]), |i| {
        let v = char_fn_free(
            cov,
            kin,
            state,
            big_q.coord(i[0]),
            big_p.coord(i[1]),
            big_q.coord(i[2]),
            big_p.coord(i[3]),
        );
        Complex64::new(v, 0.0)
    });
    // Q transforms to p and P to q.
    let out = dft_nd(&mut values, &[big_q, big_p, big_q, big_p], hbar, Direction::Inverse).unwrap();
    let sp = Superposition::new(cov, kin, state).unwrap();
    let (mut err, mut peak) = (0.0f64, 0.0f64);
    for (idx, z) in values.indexed_iter() {
        let pt = PhasePoint4::new(
            out[1].coord(idx[1]),
            out[0].coord(idx[0]),
            out[3].coord(idx[3]),
            out[2].coord(idx[2]),
        );
        let w = sp.wigner(&pt);
        err = err.max((z - w).norm());
        peak = peak.max(w.abs());
    }
    err / peak
}

/// Minimum of the P-function bracket over relative labels, by a coarse grid
/// followed by repeated zooming around the best node.
pub fn minimize_bracket(tilde: &TildeCoefficients, kin: &KineticCoefficients, state: &SuperpositionSpec) -> f64 {
    let f = |dx: f64, dp: f64| p_function_bracket(tilde, kin, state, dx, dp);
    let (s2, d, hbar, m) = (state.sigma * state.sigma, state.d, state.hbar, state.mass);
    // One period of the cosine in each label.
    let period_p = 2.0 * PI * 4.0 * s2 * tilde.t22 / (hbar * m * kin.gdot.abs() * d).max(1e-300);
    let period_x = if kin.g != 0.0 {
        2.0 * PI * 4.0 * s2 * tilde.t11 / (hbar * kin.g.abs() * d)
    } else {
        f64::INFINITY
    };
    let half_x = (4.0 * tilde.t11 / d).min(period_x);
    let half_p = 0.5 * period_p.min(1e6);
    let n = 201;
    let (mut cx, mut cp, mut hx, mut hp) = (0.0, 0.0, half_x, half_p);
    let mut best = f(0.0, 0.0);
    for _ in 0..8 {
        let mut arg = (cx, cp);
        for i in 0..n {
            let x = cx - hx + 2.0 * hx * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let p = cp - hp + 2.0 * hp * j as f64 / (n - 1) as f64;
                let v = f(x, p);
                if v < best {
                    best = v;
                    arg = (x, p);
                }
            }
        }
        cx = arg.0;
        cp = arg.1;
        hx *= 0.1;
        hp *= 0.1;
    }
    best
}

/// `(var x, var p, symmetrized covariance)` of a wavefunction, by dense
/// trapezoid sums with a five-point derivative stencil. Position moments are taken
/// about `xbar`.
pub fn wavefunction_moments(params: &StrongCoherentParams, hbar: f64, xbar: f64, pbar: f64) -> (f64, f64, f64) {
    let psi = |x: f64| strong_coherent_wavefunction(params, hbar, xbar, pbar, x);
    let h = 1e-3 * params.sigma0_sq.sqrt();
    let dpsi = |x: f64| (psi(x - 2.0 * h) - 8.0 * psi(x - h) + 8.0 * psi(x + h) - psi(x + 2.0 * h)) / (12.0 * h);
    // Trapezoid sums of smooth Gaussian integrands converge spectrally.
    let width = 16.0 * params.sigma0_sq.sqrt();
    let n = 8001;
    let step = 2.0 * width / (n - 1) as f64;
    let q = |f: &dyn Fn(f64) -> f64| {
        let inner: f64 = (1..n - 1).map(|i| f(xbar - width + i as f64 * step)).sum();
        step * (inner + 0.5 * (f(xbar - width) + f(xbar + width)))
    };
    let norm = q(&|x| psi(x).norm_sqr());
    let mx = q(&|x| (x - xbar) * psi(x).norm_sqr()) / norm;
    let mx2 = q(&|x| (x - xbar) * (x - xbar) * psi(x).norm_sqr()) / norm;
    let mp = hbar * q(&|x| (psi(x).conj() * dpsi(x)).im) / norm;
    let mp2 = hbar * hbar * q(&|x| dpsi(x).norm_sqr()) / norm;
    let mxp = hbar * q(&|x| (psi(x).conj() * (x - xbar) * dpsi(x)).im) / norm;
    (mx2 - mx * mx, mp2 - mp * mp, mxp - mx * mp)
}
