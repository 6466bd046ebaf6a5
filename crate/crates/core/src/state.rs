//! Initial two-packet superposition and its time-dependent Gaussian coefficients.

use serde::{Deserialize, Serialize};

use crate::bath::KineticCoefficients;
use crate::error::{ensure_finite, Error, Result};

/// Symmetric superposition of the packet pairs at `(d/2, -d/2)` and `(-d/2, d/2)`,
/// each packet of width `sigma`, centered on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    /// Packet width (length).
    pub sigma: f64,
    /// Packet separation (length).
    pub d: f64,
    /// Particle mass, the same as the bath's.
    pub mass: f64,
    /// Action scale, the same as the bath's.
    pub hbar: f64,
}

impl SuperpositionSpec {
    pub fn new(sigma: f64, d: f64, mass: f64, hbar: f64) -> Result<Self> {
        let s = Self {
            sigma,
            d,
            mass,
            hbar,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("sigma", self.sigma)?;
        ensure_finite("d", self.d)?;
        ensure_finite("mass", self.mass)?;
        ensure_finite("hbar", self.hbar)?;
        if self.sigma <= 0.0 {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.d < 0.0 {
            return Err(Error::InvalidInput(format!("d must be non-negative, got {}", self.d)));
        }
        if self.mass <= 0.0 || self.hbar <= 0.0 {
            return Err(Error::InvalidInput("mass and hbar must be positive".into()));
        }
        Ok(())
    }

    /// `d^2 / 4 sigma^2`, the exponent of the packet-overlap factor.
    pub fn overlap_exponent(&self) -> f64 {
        self.d * self.d / (4.0 * self.sigma * self.sigma)
    }

    /// `hbar^2 / 4 sigma^2`, the momentum variance of a single initial packet.
    pub(crate) fn packet_momentum_scale(&self) -> f64 {
        self.hbar * self.hbar / (4.0 * self.sigma * self.sigma)
    }
}

/// Free-particle Gaussian coefficients: `a11` (length^2), `a12` (action),
/// `a22` (momentum^2), the covariance of a single propagated packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceTriple {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub t: f64,
}

impl CovarianceTriple {
    pub fn determinant(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// `det - hbar^2/4`; positive for every physical state.
    pub fn uncertainty_excess(&self, hbar: f64) -> f64 {
        self.determinant() - 0.25 * hbar * hbar
    }
}

/// `K_n` and `L_n` for both particles at one set of conjugate arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KLCoefficients {
    pub k1: f64,
    pub k2: f64,
    pub l1: f64,
    pub l2: f64,
}

/// `A11 = sigma^2 + s + hbar^2 G^2 / 4 sigma^2`,
/// `A12 = m sdot / 2 + hbar^2 m Gdot G / 4 sigma^2`,
/// `A22 = m^2 <xdot^2> + hbar^2 m^2 Gdot^2 / 4 sigma^2`.
///
/// This is the free-particle form; for a bound particle it is only the limit of
/// a large `<x^2>`.
pub fn covariance_coefficients(kin: &KineticCoefficients, state: &SuperpositionSpec) -> CovarianceTriple {
    let m = state.mass;
    let h = state.packet_momentum_scale();
    CovarianceTriple {
        a11: state.sigma * state.sigma + kin.s + h * kin.g * kin.g,
        a12: 0.5 * m * kin.sdot + h * m * kin.gdot * kin.g,
        a22: m * m * kin.v2 + h * m * m * kin.gdot * kin.gdot,
        t: kin.t,
    }
}

/// Covariance of the Gaussian envelope of the characteristic function when
/// `<x^2>` is finite. Reduces to [`covariance_coefficients`] as `<x^2> -> inf`
/// with `c = <x^2> - s/2`.
pub fn envelope_covariance(kin: &KineticCoefficients, state: &SuperpositionSpec) -> Result<CovarianceTriple> {
    let corr = kin
        .correlation
        .ok_or_else(|| Error::UnsupportedModel("envelope covariance needs a finite <x^2>".into()))?;
    let m = state.mass;
    let h = state.packet_momentum_scale();
    let w = corr.x2 + state.sigma * state.sigma;
    Ok(CovarianceTriple {
        a11: ((corr.x2 - corr.c) * (corr.x2 + corr.c) + corr.x2 * state.sigma * state.sigma) / w + h * kin.g * kin.g,
        a12: -m * corr.c * corr.cdot / w + h * m * kin.gdot * kin.g,
        a22: m * m * (kin.v2 - corr.cdot * corr.cdot / w) + h * m * m * kin.gdot * kin.gdot,
        t: kin.t,
    })
}

/// `K_n = (c P_n + m cdot Q_n) / <x^2>`, `L_n = G P_n + m Gdot Q_n`.
pub fn kl_coefficients(
    kin: &KineticCoefficients,
    mass: f64,
    q1: f64,
    p1: f64,
    q2: f64,
    p2: f64,
) -> Result<KLCoefficients> {
    let corr = kin.correlation.ok_or_else(|| {
        Error::UnsupportedModel(
            "K_n needs a finite <x^2>; use the free-particle characteristic function".into(),
        )
    })?;
    let k = |q: f64, p: f64| (corr.c * p + mass * corr.cdot * q) / corr.x2;
    let l = |q: f64, p: f64| kin.g * p + mass * kin.gdot * q;
    Ok(KLCoefficients {
        k1: k(q1, p1),
        k2: k(q2, p2),
        l1: l(q1, p1),
        l2: l(q2, p2),
    })
}
