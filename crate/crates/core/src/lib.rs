//! Exact time evolution of a two-packet superposition of a particle pair, each
//! particle coupled to its own linear passive heat bath.
//!
//! The crate computes the bath kinetic coefficients (Green function, mean-square
//! displacement, equilibrium variances), the Wigner characteristic function,
//! Wigner function and coordinate probability of the superposition, the
//! visibility of its interference term, and the separability criterion whose
//! zero crossing marks the finite-time loss of entanglement.

pub mod bath;
pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod state;
pub mod wigner;

pub use bath::{Bath, BathModel, BathSpec, Correlation, Displacement, GreenFunction, KineticCoefficients};
pub use error::{Error, Result};
pub use entanglement::{
    calibrate_sigma, criterion_at, initial_criterion, optimal_parameters, p_function, quadratic_form,
    separability_criterion, separability_time, tilde_coefficients, Calibration, CalibrationOptions, Crossing,
    SeparabilityReport, StrongCoherentParams, TildeCoefficients,
};
pub use state::{covariance_coefficients, kl_coefficients, CovarianceTriple, KLCoefficients, SuperpositionSpec};
pub use wigner::{
    char_fn_free, char_fn_general, coherence_visibility, position_probability, wigner_function, AxisSpec, GridSpec,
    PhasePoint4, Superposition,
};
