//! Characteristic function, Wigner function, coordinate probability and
//! interference visibility of the propagated superposition.
//!
//! Fourier convention, per particle: `W~(Q, P) = ∫ dq dp W(q, p) exp(-i (q P + p Q) / hbar)`.

use ndarray::{ArrayD, IxDyn};
use rayon::prelude::*;

use crate::bath::KineticCoefficients;
use crate::error::{Error, Result};
use crate::numerics::{integrate_grid, UniformAxis};
use crate::state::{kl_coefficients, CovarianceTriple, SuperpositionSpec};

/// Standard deviations covered by default grid extents.
pub const DEFAULT_EXTENT_SIGMAS: f64 = 6.0;
pub const DEFAULT_GRID_POINTS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint4 {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
}

impl PhasePoint4 {
    pub fn new(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        Self { q1, p1, q2, p2 }
    }

    pub fn is_finite(&self) -> bool {
        self.q1.is_finite() && self.p1.is_finite() && self.q2.is_finite() && self.p2.is_finite()
    }

    /// The same point with the particle labels exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.q2, self.p2, self.q1, self.p1)
    }
}

/// One grid axis: symmetric about zero, `points` samples spanning `±half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub half_width: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput(format!("grid half-width must be positive, got {half_width}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "grid point count must be even and at least 8, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn uniform(&self) -> UniformAxis {
        UniformAxis {
            lo: -self.half_width,
            hi: self.half_width,
            points: self.points,
        }
    }
}

/// Axes in the order they are evaluated: `(q1, p1, q2, p2)` for Wigner grids and
/// `(q1, q2)` for probability grids.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
}

impl GridSpec {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 4 {
            return Err(Error::DimensionMismatch(format!("grids have 1 to 4 axes, got {}", axes.len())));
        }
        Ok(Self { axes })
    }

    /// `±(d/2 + 6 sqrt(A11))` in position and `±6 sqrt(A22)` in momentum.
    pub fn default_wigner(cov: &CovarianceTriple, state: &SuperpositionSpec, points: usize) -> Result<Self> {
        let q = AxisSpec::new(position_extent(cov, state), points)?;
        let p = AxisSpec::new(DEFAULT_EXTENT_SIGMAS * cov.a22.sqrt(), points)?;
        Self::new(vec![q, p, q, p])
    }

    pub fn default_probability(cov: &CovarianceTriple, state: &SuperpositionSpec, points: usize) -> Result<Self> {
        let q = AxisSpec::new(position_extent(cov, state), points)?;
        Self::new(vec![q, q])
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn uniform_axes(&self) -> Vec<UniformAxis> {
        self.axes.iter().map(AxisSpec::uniform).collect()
    }
}

fn position_extent(cov: &CovarianceTriple, state: &SuperpositionSpec) -> f64 {
    0.5 * state.d + DEFAULT_EXTENT_SIGMAS * cov.a11.sqrt()
}

/// `exp(-d^2/4 sigma^2)`, the overlap of the two branches at `t = 0`.
fn overlap(state: &SuperpositionSpec) -> f64 {
    (-state.overlap_exponent()).exp()
}

/// The characteristic function for a bath with finite `<x^2>`, term for term as
/// in the general two-packet formula, with no free-particle simplification.
pub fn char_fn_general(
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    q1: f64,
    p1: f64,
    q2: f64,
    p2: f64,
) -> Result<f64> {
    let x2 = kin.x2().ok_or_else(|| {
        Error::UnsupportedModel("infinite <x^2>: use char_fn_free with covariance_coefficients".into())
    })?;
    let kl = kl_coefficients(kin, state.mass, q1, p1, q2, p2)?;
    let (m, hbar, sigma2, d) = (state.mass, state.hbar, state.sigma * state.sigma, state.d);
    let h = state.packet_momentum_scale();
    let damp = x2 / (x2 + sigma2);
    let exponent: f64 = [(q1, p1, kl.k1, kl.l1), (q2, p2, kl.k2, kl.l2)]
        .iter()
        .map(|&(q, p, k, l)| x2 * (p * p - damp * k * k) + m * m * kin.v2 * q * q + h * l * l)
        .sum();
    let envelope = (-exponent / (2.0 * hbar * hbar)).exp();
    let e = (-x2 * d * d / (4.0 * sigma2 * (x2 + sigma2))).exp();
    let interference = (damp * (kl.k1 - kl.k2) * d / (2.0 * hbar)).cos()
        + e * ((kl.l1 - kl.l2) * d / (4.0 * sigma2)).cosh();
    Ok(envelope * interference / (1.0 + e))
}

/// The free-particle characteristic function.
pub fn char_fn_free(
    cov: &CovarianceTriple,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    q1: f64,
    p1: f64,
    q2: f64,
    p2: f64,
) -> f64 {
    let hbar = state.hbar;
    let quad = cov.a11 * (p1 * p1 + p2 * p2)
        + 2.0 * cov.a12 * (q1 * p1 + q2 * p2)
        + cov.a22 * (q1 * q1 + q2 * q2);
    let envelope = (-quad / (2.0 * hbar * hbar)).exp();
    let e = overlap(state);
    let (dp, dq) = (p1 - p2, q1 - q2);
    let shift = (kin.g * dp + state.mass * kin.gdot * dq) * state.d / (4.0 * state.sigma * state.sigma);
    let interference = (dp * state.d / (2.0 * hbar)).cos() + e * shift.cosh();
    envelope * interference / (1.0 + e)
}

/// Normalized Gaussian with covariance `[[a11, a12], [a12, a22]]`.
pub fn single_packet_wigner(cov: &CovarianceTriple, q: f64, p: f64) -> f64 {
    let det = cov.determinant();
    let form = cov.a22 * q * q - 2.0 * cov.a12 * q * p + cov.a11 * p * p;
    (-form / (2.0 * det)).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
}

/// Marginal of [`single_packet_wigner`] in position.
pub fn single_packet_probability(cov: &CovarianceTriple, q: f64) -> f64 {
    (-q * q / (2.0 * cov.a11)).exp() / (2.0 * std::f64::consts::PI * cov.a11).sqrt()
}

/// Phase of the interference term at relative coordinates `q = q1 - q2`, `p = p1 - p2`.
pub fn interference_phase(
    cov: &CovarianceTriple,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    q: f64,
    p: f64,
) -> f64 {
    let (wq, wp) = phase_coefficients(cov, kin, state);
    wq * q + wp * p
}

fn phase_coefficients(cov: &CovarianceTriple, kin: &KineticCoefficients, state: &SuperpositionSpec) -> (f64, f64) {
    let mgd = state.mass * kin.gdot;
    let scale = state.hbar * state.d / (4.0 * state.sigma * state.sigma * cov.determinant());
    (
        (kin.g * cov.a22 - mgd * cov.a12) * scale,
        (mgd * cov.a11 - kin.g * cov.a12) * scale,
    )
}

/// Attenuation exponent `A(t)` of the interference term.
pub fn attenuation_exponent(cov: &CovarianceTriple, kin: &KineticCoefficients, state: &SuperpositionSpec) -> f64 {
    let h = state.packet_momentum_scale();
    let m = state.mass;
    let b11 = cov.a11 - h * kin.g * kin.g;
    let b22 = cov.a22 - h * m * m * kin.gdot * kin.gdot;
    let b12 = cov.a12 - h * m * kin.g * kin.gdot;
    (b11 * b22 - b12 * b12) / cov.determinant() * state.overlap_exponent()
}

/// Visibility `a(t)` of the interference fringes in the coordinate probability.
pub fn coherence_visibility(kin: &KineticCoefficients, state: &SuperpositionSpec) -> f64 {
    let sigma2 = state.sigma * state.sigma;
    let a11 = sigma2 + kin.s + state.packet_momentum_scale() * kin.g * kin.g;
    (-kin.s / a11 * state.overlap_exponent()).exp()
}

/// Precomputed evaluator for the Wigner function and coordinate probability at
/// one time.
#[derive(Debug, Clone, Copy)]
pub struct Superposition {
    cov: CovarianceTriple,
    half_d: f64,
    norm: f64,
    wigner_fringe: f64,
    phase_q: f64,
    phase_p: f64,
    probability_fringe: f64,
    probability_wavenumber: f64,
}

impl Superposition {
    /// Fails when the covariance is not positive definite.
    pub fn new(cov: &CovarianceTriple, kin: &KineticCoefficients, state: &SuperpositionSpec) -> Result<Self> {
        state.validate()?;
        let det = cov.determinant();
        if !(cov.a11 > 0.0 && cov.a22 > 0.0 && det > 0.0) {
            return Err(Error::DegenerateCovariance {
                excess: cov.uncertainty_excess(state.hbar),
            });
        }
        let (phase_q, phase_p) = phase_coefficients(cov, kin, state);
        let sigma2 = state.sigma * state.sigma;
        let d = state.d;
        Ok(Self {
            cov: *cov,
            half_d: 0.5 * d,
            norm: 1.0 / (2.0 * (1.0 + overlap(state))),
            wigner_fringe: 2.0 * (-attenuation_exponent(cov, kin, state)).exp(),
            phase_q,
            phase_p,
            probability_fringe: 2.0 * coherence_visibility(kin, state) * (-d * d / (4.0 * cov.a11)).exp(),
            probability_wavenumber: state.hbar * kin.g * d / (4.0 * cov.a11 * sigma2),
        })
    }

    pub fn covariance(&self) -> &CovarianceTriple {
        &self.cov
    }

    pub fn wigner(&self, pt: &PhasePoint4) -> f64 {
        let w0 = |q: f64, p: f64| single_packet_wigner(&self.cov, q, p);
        let h = self.half_d;
        let direct = w0(pt.q1 - h, pt.p1) * w0(pt.q2 + h, pt.p2) + w0(pt.q1 + h, pt.p1) * w0(pt.q2 - h, pt.p2);
        let phase = self.phase_q * (pt.q1 - pt.q2) + self.phase_p * (pt.p1 - pt.p2);
        let fringe = self.wigner_fringe * w0(pt.q1, pt.p1) * w0(pt.q2, pt.p2) * phase.cos();
        self.norm * (direct + fringe)
    }

    pub fn probability(&self, q1: f64, q2: f64) -> f64 {
        let p0 = |q: f64| single_packet_probability(&self.cov, q);
        let h = self.half_d;
        let direct = p0(q1 - h) * p0(q2 + h) + p0(q1 + h) * p0(q2 - h);
        let fringe = self.probability_fringe * p0(q1) * p0(q2) * (self.probability_wavenumber * (q1 - q2)).cos();
        self.norm * (direct + fringe)
    }

    /// Wigner function sampled on a 4-axis grid ordered `(q1, p1, q2, p2)`.
    pub fn wigner_grid(&self, grid: &GridSpec) -> Result<ArrayD<f64>> {
        expect_axes(grid, 4)?;
        Ok(sample_grid(grid, |x| self.wigner(&PhasePoint4::new(x[0], x[1], x[2], x[3]))))
    }

    /// Coordinate probability sampled on a 2-axis grid ordered `(q1, q2)`.
    pub fn probability_grid(&self, grid: &GridSpec) -> Result<ArrayD<f64>> {
        expect_axes(grid, 2)?;
        Ok(sample_grid(grid, |x| self.probability(x[0], x[1])))
    }

    /// Trapezoidal integral of the Wigner function over the grid.
    pub fn wigner_integral(&self, grid: &GridSpec) -> Result<f64> {
        expect_axes(grid, 4)?;
        Ok(integrate_grid(&grid.uniform_axes(), |x| {
            self.wigner(&PhasePoint4::new(x[0], x[1], x[2], x[3]))
        }))
    }

    /// Trapezoidal integral of the coordinate probability over the grid.
    pub fn probability_integral(&self, grid: &GridSpec) -> Result<f64> {
        expect_axes(grid, 2)?;
        Ok(integrate_grid(&grid.uniform_axes(), |x| self.probability(x[0], x[1])))
    }

    /// Momentum integral of the Wigner function at fixed `(q1, q2)`.
    pub fn marginal_probability(&self, q1: f64, q2: f64, momentum: &AxisSpec) -> f64 {
        let p = momentum.uniform();
        integrate_grid(&[p, p], |x| self.wigner(&PhasePoint4::new(q1, x[0], q2, x[1])))
    }
}

fn expect_axes(grid: &GridSpec, n: usize) -> Result<()> {
    if grid.axes.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}-axis grid, got {} axes",
            grid.axes.len()
        )));
    }
    Ok(())
}

fn sample_grid<F: Fn(&[f64]) -> f64 + Sync>(grid: &GridSpec, f: F) -> ArrayD<f64> {
    let shape = grid.shape();
    let axes: Vec<Vec<f64>> = grid.axes.iter().map(|a| a.uniform().coords()).collect();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; shape.len()],
            |x, flat| {
                let mut rem = flat;
                for k in (0..shape.len()).rev() {
                    x[k] = axes[k][rem % shape[k]];
                    rem /= shape[k];
                }
                f(x)
            },
        )
        .collect();
    ArrayD::from_shape_vec(IxDyn(&shape), values).expect("shape matches sample count")
}

/// The Wigner function at one phase-space point.
pub fn wigner_function(
    cov: &CovarianceTriple,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    point: &PhasePoint4,
) -> Result<f64> {
    Ok(Superposition::new(cov, kin, state)?.wigner(point))
}

/// The coordinate probability density at `(q1, q2)`.
pub fn position_probability(
    cov: &CovarianceTriple,
    kin: &KineticCoefficients,
    state: &SuperpositionSpec,
    q1: f64,
    q2: f64,
) -> Result<f64> {
    Ok(Superposition::new(cov, kin, state)?.probability(q1, q2))
}
