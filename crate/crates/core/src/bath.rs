//! Linear passive heat baths: response and fluctuation functions.
//!
//! Units are whatever consistent system the caller picks; the defaults are
//! natural units `hbar = m = 1` with times measured in `1/gamma = m/zeta`.
//! Temperature enters only as the energy `kT`.
//!
//! With `J(w) = (hbar/pi) coth(hbar w / 2kT) Im alpha(w) R(w)`, where `R` is
//! the optional Drude regulator `cutoff^2 / (cutoff^2 + w^2)`:
//!
//! ```text
//! s(t)  = 2 int_0^inf J(w) (1 - cos w t) dw      mean-square displacement
//! v2    =   int_0^inf J(w) w^2 dw                 <xdot^2>
//! x2    =   int_0^inf J(w) dw                     <x^2>, oscillator only
//! c(t)  = x2 - s(t)/2
//! ```
//!
//! The Green function is the retarded response `G(t) = (2/pi) int Im alpha(w) sin(w t) dw`,
//! evaluated in closed form from the poles of `alpha` in the Laplace variable.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::numerics::{integrate, integrate_semi_infinite, KernelHints, QuadratureResult};

/// Relative tolerance for the spectral integrals.
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Largest number of whole periods of `cos(w t)` integrated directly before the
/// remaining oscillatory tail is summed panel by panel.
const HEAD_PERIODS: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathModel {
    /// Free particle, frequency-independent friction.
    OhmicFree,
    /// Free particle, friction kernel `zeta/tau * exp(-t/tau)`.
    SingleRelaxationFree,
    /// Harmonically bound particle, Ohmic friction.
    OhmicOscillator,
}

impl BathModel {
    pub fn is_free(self) -> bool {
        !matches!(self, BathModel::OhmicOscillator)
    }

    fn has_ohmic_tail(self) -> bool {
        !matches!(self, BathModel::SingleRelaxationFree)
    }
}

/// Bath model and its physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub model: BathModel,
    /// Friction constant (mass/time).
    pub zeta: f64,
    /// Memory time (time); zero for the strict Ohmic models.
    pub tau: f64,
    /// Temperature as an energy.
    pub kt: f64,
    /// Particle mass.
    pub mass: f64,
    /// Oscillator angular frequency (1/time); zero for free models.
    pub omega0: f64,
    /// UV angular frequency of the Drude regulator applied to the fluctuation spectrum.
    pub cutoff: Option<f64>,
    /// Action scale.
    pub hbar: f64,
}

impl BathSpec {
    pub fn ohmic_free(zeta: f64, mass: f64, kt: f64) -> Self {
        Self {
            model: BathModel::OhmicFree,
            zeta,
            tau: 0.0,
            kt,
            mass,
            omega0: 0.0,
            cutoff: None,
            hbar: 1.0,
        }
    }

    pub fn single_relaxation(zeta: f64, tau: f64, mass: f64, kt: f64) -> Self {
        Self {
            model: BathModel::SingleRelaxationFree,
            tau,
            ..Self::ohmic_free(zeta, mass, kt)
        }
    }

    pub fn ohmic_oscillator(zeta: f64, omega0: f64, mass: f64, kt: f64) -> Self {
        Self {
            model: BathModel::OhmicOscillator,
            omega0,
            ..Self::ohmic_free(zeta, mass, kt)
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    /// Ohmic relaxation rate `zeta / m`.
    pub fn gamma(&self) -> f64 {
        self.zeta / self.mass
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("zeta", self.zeta),
            ("tau", self.tau),
            ("kT", self.kt),
            ("mass", self.mass),
            ("omega0", self.omega0),
            ("hbar", self.hbar),
        ] {
            ensure_finite(name, v)?;
        }
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.zeta <= 0.0 {
            return bad(format!("zeta must be positive, got {}", self.zeta));
        }
        if self.mass <= 0.0 {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if self.hbar <= 0.0 {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }
        if self.kt < 0.0 {
            return bad(format!("kT must be non-negative, got {}", self.kt));
        }
        if self.tau < 0.0 {
            return bad(format!("tau must be non-negative, got {}", self.tau));
        }
        if self.omega0 < 0.0 {
            return bad(format!("omega0 must be non-negative, got {}", self.omega0));
        }
        match self.model {
            BathModel::SingleRelaxationFree if self.tau <= 0.0 => {
                return bad("the single relaxation time model needs tau > 0".into())
            }
            BathModel::OhmicOscillator if self.omega0 <= 0.0 => {
                return bad("the oscillator model needs omega0 > 0".into())
            }
            _ => {}
        }
        if let Some(c) = self.cutoff {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("cutoff must be positive and finite, got {c}"));
            }
        }
        Ok(())
    }
}

/// Green function and its time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenFunction {
    /// `G(t)` (time/mass).
    pub g: f64,
    /// `dG/dt` (1/mass).
    pub gdot: f64,
}

/// Mean-square displacement `s(t)` and `ds/dt`, with quadrature error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub s: f64,
    pub sdot: f64,
    pub s_error: f64,
    pub sdot_error: f64,
}

/// Equilibrium position statistics, available when `<x^2>` is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    /// `<x^2>` (length^2).
    pub x2: f64,
    /// `c(t) = <x(t)x(0) + x(0)x(t)>/2` (length^2).
    pub c: f64,
    pub cdot: f64,
}

/// The time-dependent scalars feeding every distribution and criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticCoefficients {
    pub t: f64,
    pub g: f64,
    pub gdot: f64,
    pub s: f64,
    pub sdot: f64,
    /// Equilibrium `<xdot^2>` (length^2/time^2).
    pub v2: f64,
    /// `None` for free models, where `<x^2>` is infinite.
    pub correlation: Option<Correlation>,
}

impl KineticCoefficients {
    /// Coefficients at `t = 0`: `G = 0`, `Gdot = 1/m`, `s = sdot = 0`.
    pub fn initial(mass: f64, v2: f64, x2: Option<f64>) -> Self {
        Self {
            t: 0.0,
            g: 0.0,
            gdot: 1.0 / mass,
            s: 0.0,
            sdot: 0.0,
            v2,
            correlation: x2.map(|x2| Correlation {
                x2,
                c: x2,
                cdot: 0.0,
            }),
        }
    }

    pub fn x2(&self) -> Option<f64> {
        self.correlation.map(|c| c.x2)
    }
}

/// A validated bath with cached equilibrium variances.
#[derive(Debug, Clone)]
pub struct Bath {
    spec: BathSpec,
    v2: OnceLock<Result<f64>>,
    x2: OnceLock<Result<f64>>,
}

impl Bath {
    pub fn new(spec: BathSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            v2: OnceLock::new(),
            x2: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    /// Response function `alpha(w + i0)`.
    pub fn susceptibility(&self, omega: f64) -> Result<Complex64> {
        ensure_finite("omega", omega)?;
        let s = &self.spec;
        if s.model.is_free() && omega == 0.0 {
            return Err(Error::InvalidInput(
                "free-particle susceptibility has a pole at omega = 0".into(),
            ));
        }
        let i = Complex64::i();
        let w = Complex64::new(omega, 0.0);
        let denom = match s.model {
            BathModel::OhmicFree => -s.mass * w * w - i * s.zeta * w,
            BathModel::SingleRelaxationFree => {
                -s.mass * w * w - i * w * s.zeta / (1.0 - i * w * s.tau)
            }
            BathModel::OhmicOscillator => {
                s.mass * (s.omega0 * s.omega0 - w * w) - i * s.zeta * w
            }
        };
        Ok(denom.inv())
    }

    /// `Im alpha(w)` for `w > 0`, in a cancellation-free form.
    pub fn im_susceptibility(&self, omega: f64) -> f64 {
        let s = &self.spec;
        match s.model {
            BathModel::OhmicFree | BathModel::SingleRelaxationFree => {
                im_alpha_relaxation(s.mass, s.zeta, s.tau, omega)
            }
            BathModel::OhmicOscillator => {
                let d = s.omega0 * s.omega0 - omega * omega;
                s.zeta * omega / (s.mass * s.mass * d * d + s.zeta * s.zeta * omega * omega)
            }
        }
    }

    /// Retarded Green function with `G(0) = 0`, `Gdot(0) = 1/m`.
    pub fn green_function(&self, t: f64) -> Result<GreenFunction> {
        check_time(t)?;
        let s = &self.spec;
        let m = s.mass;
        let gamma = s.gamma();
        Ok(match s.model {
            BathModel::OhmicFree => GreenFunction {
                g: -(-gamma * t).exp_m1() / s.zeta,
                gdot: (-gamma * t).exp() / m,
            },
            BathModel::SingleRelaxationFree => {
                // Poles of G(z) = (1 + z tau) / (z (m tau z^2 + m z + zeta)):
                // z = 0 and z = -b +- sqrt(b^2 - gamma/tau), b = 1/(2 tau).
                let tau = s.tau;
                let b = 0.5 / tau;
                let d = gamma / tau;
                let (ch, sh) = damped_pair(b, b * b - d, t);
                let i_c = (b - (b * ch + (b * b - d) * sh)) / d;
                let i_s = (1.0 - (ch + b * sh)) / d;
                GreenFunction {
                    g: (i_c + i_s / (2.0 * tau)) / m,
                    gdot: (ch + sh / (2.0 * tau)) / m,
                }
            }
            BathModel::OhmicOscillator => {
                let b = 0.5 * gamma;
                let (ch, sh) = damped_pair(b, b * b - s.omega0 * s.omega0, t);
                GreenFunction {
                    g: sh / m,
                    gdot: (ch - b * sh) / m,
                }
            }
        })
    }

    /// Fluctuation spectral weight `J(w)`; see the module docs.
    pub fn spectral_weight(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        let s = &self.spec;
        let reg = match s.cutoff {
            Some(c) => c * c / (c * c + omega * omega),
            None => 1.0,
        };
        s.hbar / PI * thermal_factor(s.hbar, s.kt, omega) * self.im_susceptibility(omega) * reg
    }

    /// Frequencies where the spectral weight changes character.
    pub fn characteristic_frequencies(&self) -> Vec<f64> {
        let s = &self.spec;
        let mut f = vec![s.gamma()];
        if s.tau > 0.0 {
            f.push(1.0 / s.tau);
        }
        if s.omega0 > 0.0 {
            f.push(s.omega0);
        }
        if let Some(c) = s.cutoff {
            f.push(c);
        }
        if s.kt > 0.0 {
            f.push(s.kt / s.hbar);
        }
        f.retain(|x| x.is_finite() && *x > 0.0);
        f.sort_by(f64::total_cmp);
        f.dedup();
        f
    }

    pub fn mean_square_displacement(&self, t: f64) -> Result<Displacement> {
        self.mean_square_displacement_with_tol(t, SPECTRAL_TOL)
    }

    /// `s(t)` and `ds/dt` by quadrature at relative tolerance `tol`.
    ///
    /// `[0, w_c]`, holding a whole number of periods of `cos(w t)`, is
    /// integrated directly. Beyond it the `1 - cos` kernel is split into a
    /// smooth integral and a Fourier tail summed over half-period panels.
    pub fn mean_square_displacement_with_tol(&self, t: f64, tol: f64) -> Result<Displacement> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(Displacement {
                s: 0.0,
                sdot: 0.0,
                s_error: 0.0,
                sdot_error: 0.0,
            });
        }
        let scales = self.characteristic_frequencies();
        let top = scales.last().copied().unwrap_or(1.0);
        let period = 2.0 * PI / t;
        let periods = (t * top / (2.0 * PI)).ceil().clamp(1.0, HEAD_PERIODS);
        let w_c = periods * period;

        let mut head_breaks: Vec<f64> = (1..periods as usize).map(|k| k as f64 * period).collect();
        head_breaks.extend(scales.iter().copied().filter(|&w| w < w_c));

        let j = |w: f64| self.spectral_weight(w);
        let s_head = integrate(
            |w| {
                let h = (0.5 * w * t).sin();
                4.0 * j(w) * h * h
            },
            0.0,
            w_c,
            &head_breaks,
            tol,
        )?;
        let sdot_head = integrate(|w| 2.0 * j(w) * w * (w * t).sin(), 0.0, w_c, &head_breaks, tol)?;

        // Tails in x = w - w_c, where cos(w t) = cos(x t) and sin(w t) = sin(x t).
        let tail_breaks: Vec<f64> = scales.iter().filter(|&&w| w > w_c).map(|w| w - w_c).collect();
        let smooth = integrate_semi_infinite(
            |x| 2.0 * j(w_c + x),
            &KernelHints::smooth(if tail_breaks.is_empty() {
                vec![w_c]
            } else {
                tail_breaks.clone()
            }),
            tol,
        )?;
        let cos_tail = integrate_semi_infinite(
            |x| 2.0 * j(w_c + x) * (x * t).cos(),
            &KernelHints::oscillatory(period, 0.25 * period, tail_breaks.clone()),
            tol,
        )?;
        let sin_tail = integrate_semi_infinite(
            |x| 2.0 * j(w_c + x) * (w_c + x) * (x * t).sin(),
            &KernelHints::oscillatory(period, 0.0, tail_breaks),
            tol,
        )?;
        Ok(Displacement {
            s: s_head.value + smooth.value - cos_tail.value,
            sdot: sdot_head.value + sin_tail.value,
            s_error: s_head.error_estimate + smooth.error_estimate + cos_tail.error_estimate,
            sdot_error: sdot_head.error_estimate + sin_tail.error_estimate,
        })
    }

    fn requires_cutoff_for_v2(&self) -> bool {
        self.spec.model.has_ohmic_tail() && self.spec.cutoff.is_none()
    }

    /// Equilibrium `<xdot^2>`.
    ///
    /// Strict Ohmic friction makes `w^2 J(w)` fall off only as `1/w`: the
    /// zero-point contribution diverges logarithmically unless a cutoff is set.
    pub fn velocity_variance(&self) -> Result<f64> {
        self.v2
            .get_or_init(|| self.velocity_variance_with_tol(SPECTRAL_TOL).map(|r| r.value))
            .clone()
    }

    pub fn velocity_variance_with_tol(&self, tol: f64) -> Result<QuadratureResult> {
        if self.requires_cutoff_for_v2() {
            return Err(Error::Divergent {
                quantity: "<xdot^2>",
                reason: "Ohmic friction gives a logarithmic UV divergence; set a cutoff".into(),
            });
        }
        integrate_semi_infinite(
            |w| w * w * self.spectral_weight(w),
            &KernelHints::smooth(self.characteristic_frequencies()),
            tol,
        )
    }

    /// Equilibrium `<x^2>`; finite only for the bound particle.
    pub fn position_variance(&self) -> Result<f64> {
        self.x2
            .get_or_init(|| {
                if self.spec.model.is_free() {
                    return Err(Error::UnsupportedModel(
                        "<x^2> is infinite for a free particle".into(),
                    ));
                }
                integrate_semi_infinite(
                    |w| self.spectral_weight(w),
                    &KernelHints::smooth(self.characteristic_frequencies()),
                    SPECTRAL_TOL,
                )
                .map(|r| r.value)
            })
            .clone()
    }

    /// `c(t) = <x^2> - s(t)/2` and `dc/dt = -sdot/2`.
    pub fn correlation_function(&self, t: f64) -> Result<Correlation> {
        let x2 = self.position_variance()?;
        let d = self.mean_square_displacement(t)?;
        Ok(Correlation {
            x2,
            c: x2 - 0.5 * d.s,
            cdot: -0.5 * d.sdot,
        })
    }

    /// Thermal de Broglie wavelength `hbar / (m sqrt(<xdot^2>))`.
    pub fn debroglie_wavelength(&self) -> Result<f64> {
        let v2 = self.velocity_variance()?;
        Ok(debroglie_wavelength(self.spec.hbar, self.spec.mass, v2))
    }

    /// Every kinetic coefficient at time `t`.
    pub fn kinetics(&self, t: f64) -> Result<KineticCoefficients> {
        let v2 = self.velocity_variance()?;
        let green = self.green_function(t)?;
        let d = self.mean_square_displacement(t)?;
        let correlation = if self.spec.model.is_free() {
            None
        } else {
            let x2 = self.position_variance()?;
            Some(Correlation {
                x2,
                c: x2 - 0.5 * d.s,
                cdot: -0.5 * d.sdot,
            })
        };
        Ok(KineticCoefficients {
            t,
            g: green.g,
            gdot: green.gdot,
            s: d.s,
            sdot: d.sdot,
            v2,
            correlation,
        })
    }
}

pub fn debroglie_wavelength(hbar: f64, mass: f64, v2: f64) -> f64 {
    hbar / (mass * v2.sqrt())
}

fn check_time(t: f64) -> Result<()> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

/// `Im alpha` for `alpha = 1 / (-m w^2 - i w zeta / (1 - i w tau))`; `tau = 0` is Ohmic.
pub(crate) fn im_alpha_relaxation(m: f64, zeta: f64, tau: f64, w: f64) -> f64 {
    let q = 1.0 + w * w * tau * tau;
    let re = w * (m * q - zeta * tau);
    zeta * q / (w * (re * re + zeta * zeta))
}

/// `coth(hbar w / 2kT)`, with the zero-temperature limit and a series near `w = 0`.
pub(crate) fn thermal_factor(hbar: f64, kt: f64, w: f64) -> f64 {
    if kt == 0.0 {
        return 1.0;
    }
    let x = hbar * w / (2.0 * kt);
    if w < 1e-6 * kt / hbar {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// `(exp(-b t) cosh(k t), exp(-b t) sinh(k t)/k)` with `k = sqrt(kappa)`; for
/// `kappa < 0` these continue to `cos` and `sin(k t)/k`. Requires `b >= sqrt(kappa)`
/// for large `t` to stay bounded.
pub(crate) fn damped_pair(b: f64, kappa: f64, t: f64) -> (f64, f64) {
    let z = kappa * t * t;
    if z.abs() < 1e-4 {
        // cosh and sinh/k as series in kappa t^2.
        let mut ch = 0.0;
        let mut sh = 0.0;
        let mut term_c = 1.0;
        let mut term_s = t;
        for n in 0..7 {
            ch += term_c;
            sh += term_s;
            let k = 2.0 * n as f64;
            term_c *= z / ((k + 1.0) * (k + 2.0));
            term_s *= z / ((k + 2.0) * (k + 3.0));
        }
        let e = (-b * t).exp();
        (e * ch, e * sh)
    } else if kappa > 0.0 {
        let k = kappa.sqrt();
        let slow = ((k - b) * t).exp();
        let fast = (-(k + b) * t).exp();
        let diff = if 2.0 * k * t < 1.0 {
            fast * (2.0 * k * t).exp_m1()
        } else {
            slow - fast
        };
        (0.5 * (slow + fast), diff / (2.0 * k))
    } else {
        let k = (-kappa).sqrt();
        let e = (-b * t).exp();
        (e * (k * t).cos(), e * (k * t).sin() / k)
    }
}
