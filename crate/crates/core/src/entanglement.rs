//! Product-state expansion of the propagated superposition and the criterion
//! for its separability.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{Bath, KineticCoefficients};
use crate::error::{Error, Result};
use crate::numerics::find_root_bracketed;
use crate::state::{covariance_coefficients, CovarianceTriple, SuperpositionSpec};

/// Relative time tolerance of a refined crossing.
pub const CROSSING_REL_TOL: f64 = 1e-6;
/// Bisection runs this much tighter so the residual at the root is also small.
const BISECTION_REL_TOL: f64 = 1e-12;
/// Decades covered by the log-spaced part of the sampling grid.
const SAMPLE_DECADES: f64 = 4.0;

/// Width `sigma0^2` and chirp `delta0` of the product-state wavefunctions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongCoherentParams {
    pub sigma0_sq: f64,
    pub delta0: f64,
}

/// Diagonal of the optimized quadratic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeCoefficients {
    pub t11: f64,
    pub t22: f64,
}

/// `[[A11 - sigma0^2, A12 - hbar delta0/2], [A12 - hbar delta0/2, A22 - hbar^2 (1 + delta0^2)/4 sigma0^2]]`.
pub fn quadratic_form(cov: &CovarianceTriple, params: &StrongCoherentParams, hbar: f64) -> [[f64; 2]; 2] {
    let off = cov.a12 - 0.5 * hbar * params.delta0;
    [
        [cov.a11 - params.sigma0_sq, off],
        [
            off,
            cov.a22 - hbar * hbar * (1.0 + params.delta0 * params.delta0) / (4.0 * params.sigma0_sq),
        ],
    ]
}

/// The `delta0` that diagonalizes [`quadratic_form`] and the `sigma0^2` at the
/// stationary point of its diagonal product, which is a maximum in `sigma0^2`.
pub fn optimal_parameters(cov: &CovarianceTriple, hbar: f64) -> StrongCoherentParams {
    StrongCoherentParams {
        sigma0_sq: ((hbar * hbar + 4.0 * cov.a12 * cov.a12) * cov.a11 / (4.0 * cov.a22)).sqrt(),
        delta0: 2.0 * cov.a12 / hbar,
    }
}

/// Diagonal of [`quadratic_form`] at [`optimal_parameters`].
pub fn tilde_coefficients(cov: &CovarianceTriple, hbar: f64) -> Result<TildeCoefficients> {
    let excess = cov.uncertainty_excess(hbar);
    if !(excess > 0.0 && cov.a11 > 0.0 && cov.a22 > 0.0) {
        return Err(Error::DegenerateCovariance { excess });
    }
    // sqrt(A11 A22) - sqrt(A12^2 + hbar^2/4), without the cancellation.
    let gap = excess / ((cov.a11 * cov.a22).sqrt() + (cov.a12 * cov.a12 + 0.25 * hbar * hbar).sqrt());
    let ratio = (cov.a11 / cov.a22).sqrt();
    Ok(TildeCoefficients {
        t11: ratio * gap,
        t22: gap / ratio,
    })
}

/// `C(t)`: the state is separable when this is non-negative.
pub fn separability_criterion(tilde: &TildeCoefficients, kin: &KineticCoefficients, state: &SuperpositionSpec) -> f64 {
    let h = state.packet_momentum_scale();
    let m = state.mass;
    1.0 - h * kin.g * kin.g / tilde.t11
        - h * m * m * kin.gdot * kin.gdot / tilde.t22
        - state.sigma * state.sigma / tilde.t11
}

/// Closed-form `C(0)` for packet width `sigma` and thermal wavelength `lambda_bar`.
pub fn initial_criterion(sigma: f64, lambda_bar: f64) -> f64 {
    let r = 4.0 * sigma * sigma / (lambda_bar * lambda_bar);
    let root_u = (1.0 + r).sqrt();
    // root_u - 1 = r / (root_u + 1)
    -(1.0 + 1.0 / root_u) * (root_u + 1.0) / r
}

/// The sign-carrying factor of the P-function at relative labels
/// `dx = xbar1 - xbar2`, `dp = pbar1 - pbar2`.
pub fn p_function_bracket(
    tilde: &TildeCoefficients,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    dx: f64,
    dp: f64,
) -> f64 {
    let kappa = state.overlap_exponent();
    let c = separability_criterion(tilde, kin, state);
    let (d, s2, hbar) = (state.d, state.sigma * state.sigma, state.hbar);
    let phase = hbar * kin.g * d * dx / (4.0 * s2 * tilde.t11)
        + hbar * state.mass * kin.gdot * d * dp / (4.0 * s2 * tilde.t22);
    (kappa * c).exp() * (dx * d / (2.0 * tilde.t11)).cosh() + phase.cos()
}

/// The P-function, normalized against the measure `dxbar dpbar / 2 hbar` per particle.
pub fn p_function(
    tilde: &TildeCoefficients,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    xbar1: f64,
    pbar1: f64,
    xbar2: f64,
    pbar2: f64,
) -> f64 {
    let kappa = state.overlap_exponent();
    let h = state.packet_momentum_scale();
    let m = state.mass;
    let (t11, t22) = (tilde.t11, tilde.t22);
    let spread = 1.0 - h * kin.g * kin.g / t11 - h * m * m * kin.gdot * kin.gdot / t22;
    let exponent = -(xbar1 * xbar1 + xbar2 * xbar2) / (2.0 * t11)
        - (pbar1 * pbar1 + pbar2 * pbar2) / (2.0 * t22)
        - spread * kappa;
    let prefactor = state.hbar * state.hbar / (PI * PI * t11 * t22 * (1.0 + (-kappa).exp()));
    prefactor * exponent.exp() * p_function_bracket(tilde, kin, state, xbar1 - xbar2, pbar1 - pbar2)
}

/// The product-state wavefunction labelled by `(xbar, pbar)`.
pub fn strong_coherent_wavefunction(params: &StrongCoherentParams, hbar: f64, xbar: f64, pbar: f64, x: f64) -> Complex64 {
    let norm = (2.0 * PI * params.sigma0_sq).powf(-0.25);
    let u = x - xbar;
    let exponent = Complex64::new(-1.0, params.delta0) * (u * u / (4.0 * params.sigma0_sq))
        + Complex64::i() * (pbar * x / hbar - 0.5 * xbar * pbar / hbar);
    norm * exponent.exp()
}

/// `C(t)` from the kinetic coefficients of a free model.
pub fn criterion_from_kinetics(kin: &KineticCoefficients, state: &SuperpositionSpec) -> Result<f64> {
    let cov = covariance_coefficients(kin, state);
    let tilde = tilde_coefficients(&cov, state.hbar)?;
    Ok(separability_criterion(&tilde, kin, state))
}

/// `C(t)` for a free-particle bath.
pub fn criterion_at(bath: &Bath, state: &SuperpositionSpec, t: f64) -> Result<f64> {
    check_state(bath, state)?;
    criterion_from_kinetics(&bath.kinetics(t)?, state)
}

fn check_state(bath: &Bath, state: &SuperpositionSpec) -> Result<()> {
    if !bath.spec().model.is_free() {
        return Err(Error::UnsupportedModel(
            "the separability criterion is defined for free particles only".into(),
        ));
    }
    state.validate()?;
    if state.mass != bath.spec().mass || state.hbar != bath.spec().hbar {
        return Err(Error::InvalidInput("state and bath disagree on mass or hbar".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Last sample with `C < 0`.
    pub t_lo: f64,
    /// First sample with `C >= 0`.
    pub t_hi: f64,
    /// Refined root.
    pub t_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    /// `(t, C(t))`, starting at `t = 0`.
    pub samples: Vec<(f64, f64)>,
    pub crossing: Option<Crossing>,
    pub long_time_value: f64,
}

impl SeparabilityReport {
    /// Number of sign changes between consecutive samples, counting `C >= 0` as separable.
    pub fn sign_changes(&self) -> usize {
        self.samples
            .windows(2)
            .filter(|w| (w[0].1 >= 0.0) != (w[1].1 >= 0.0))
            .count()
    }
}

/// `t = 0` followed by `n - 1` log-spaced times ending at `t_max`.
pub fn sample_times(t_max: f64, n: usize) -> Vec<f64> {
    let lo = t_max.ln() - SAMPLE_DECADES * std::f64::consts::LN_10;
    let hi = t_max.ln();
    let m = n - 1;
    std::iter::once(0.0)
        .chain((0..m).map(|i| {
            if i + 1 == m {
                t_max
            } else {
                (lo + (hi - lo) * i as f64 / (m - 1) as f64).exp()
            }
        }))
        .collect()
}

/// Samples `criterion` at `times` and refines its first sign change.
///
/// `times` must start at zero and increase. The criterion may be evaluated
/// concurrently; the report does not depend on evaluation order.
pub fn locate_crossing<F>(criterion: F, times: &[f64]) -> Result<SeparabilityReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if times.len() < 2 || times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("sample times must start at 0 and increase".into()));
    }
    let values: Vec<f64> = times.par_iter().map(|&t| criterion(t)).collect::<Result<_>>()?;
    if values[0] >= 0.0 {
        return Err(Error::InconsistentInitialState(values[0]));
    }
    let samples: Vec<(f64, f64)> = times.iter().copied().zip(values.iter().copied()).collect();
    let long_time_value = *values.last().expect("at least two samples");
    let crossing = match values.iter().position(|&c| c >= 0.0) {
        None => None,
        Some(i) => {
            let (t_lo, t_hi) = (times[i - 1], times[i]);
            let failure = RefCell::new(None);
            let root = find_root_bracketed(
                |t| match criterion(t) {
                    Ok(c) => c,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                t_lo,
                t_hi,
                BISECTION_REL_TOL * t_hi,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Some(Crossing {
                t_lo,
                t_hi,
                t_star: root?,
            })
        }
    };
    Ok(SeparabilityReport {
        samples,
        crossing,
        long_time_value,
    })
}

/// Samples `C(t)` from `0` to `t_max` and locates the first crossing to
/// relative accuracy [`CROSSING_REL_TOL`] or better.
pub fn separability_time(
    bath: &Bath,
    state: &SuperpositionSpec,
    t_max: f64,
    n_samples: usize,
) -> Result<SeparabilityReport> {
    check_state(bath, state)?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidInput(format!("t_max must be positive, got {t_max}")));
    }
    if n_samples < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 samples, got {n_samples}")));
    }
    let times = sample_times(t_max, n_samples);
    locate_crossing(|t| criterion_from_kinetics(&bath.kinetics(t)?, state), &times)
}

/// Settings for [`calibrate_sigma`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Sweep range in units of the thermal wavelength.
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sweep_points: usize,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            sigma_min: 0.1,
            sigma_max: 10.0,
            sweep_points: 25,
            t_max: 100.0,
            samples: 96,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// `(sigma, t*)` across the sweep; `None` where `C` stays negative.
    pub sweep: Vec<(f64, Option<f64>)>,
    /// Every `sigma` in the range whose crossing time equals the target.
    pub roots: Vec<f64>,
    /// The largest root.
    pub sigma: f64,
    pub t_star: f64,
}

/// Finds the packet widths whose crossing time equals `target`.
///
/// `t*` is not monotone in `sigma`, so every bracket in the sweep is refined.
/// The widest packet is selected.
pub fn calibrate_sigma(
    bath: &Bath,
    d: f64,
    target: f64,
    opts: &CalibrationOptions,
) -> Result<Calibration> {
    let spec = bath.spec();
    let lambda_bar = bath.debroglie_wavelength()?;
    let crossing = |sigma: f64| -> Result<Option<f64>> {
        let state = SuperpositionSpec::new(sigma, d, spec.mass, spec.hbar)?;
        Ok(separability_time(bath, &state, opts.t_max, opts.samples)?
            .crossing
            .map(|c| c.t_star))
    };
    let (lo, hi) = (
        (opts.sigma_min * lambda_bar).ln(),
        (opts.sigma_max * lambda_bar).ln(),
    );
    let n = opts.sweep_points.max(2);
    let sigmas: Vec<f64> = (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let sweep: Vec<(f64, Option<f64>)> = sigmas
        .par_iter()
        .map(|&s| crossing(s).map(|t| (s, t)))
        .collect::<Result<_>>()?;
    // A missing crossing lies beyond t_max, so it counts as later than the target.
    let excess = |t: Option<f64>| t.map_or(f64::INFINITY, |t| t - target);
    let mut roots = Vec::new();
    for w in sweep.windows(2) {
        let (a, b) = (excess(w[0].1), excess(w[1].1));
        if (a < 0.0) == (b < 0.0) {
            continue;
        }
        let failure = RefCell::new(None);
        let root = find_root_bracketed(
            |ln_sigma| match crossing(ln_sigma.exp()) {
                Ok(t) => excess(t).min(f64::MAX),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            w[0].0.ln(),
            w[1].0.ln(),
            1e-9,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        roots.push(root?.exp());
    }
    let sigma = *roots.last().ok_or_else(|| {
        Error::InvalidInput(format!("no packet width in the sweep gives a crossing at t = {target}"))
    })?;
    let t_star = crossing(sigma)?.ok_or_else(|| Error::InvalidInput("calibrated width lost its crossing".into()))?;
    Ok(Calibration {
        sweep,
        roots,
        sigma,
        t_star,
    })
}
