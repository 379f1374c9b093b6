//! Diffusion in `R^d` with a skewed hyperplane interface `S = {x . nu = 0}`:
//!
//! ```text
//! x(t) = x0 + int (q nu + alpha(x^S)) d eta + int beta~(x^S) d w~(eta) + w(t)
//! ```
//!
//! The normal coordinate `x . nu` is a skew Brownian motion with local time
//! `eta`; tangential coordinates move with the Wiener path plus drift and
//! independent noise that run on the local-time clock.

mod coefficients;
mod experiments;
mod frame;
mod inverse;
mod simulate;

pub use coefficients::{
    generate_probes, validate_coefficients, CoefficientField, CoefficientReport, GdiffCoefficients, Profile,
    MAX_PROBE_PAIRS,
};
pub use experiments::{
    continuity_experiment, rho_tail_bound, rho_tail_check, small_local_time_bound, small_local_time_check,
    tangential_moment_experiment, ContinuityReport, OffsetEstimate, RhoTailReport, SmallLocalTimeReport,
    TangentialMomentReport,
};
pub use frame::HyperplaneFrame;
pub use inverse::{
    inverse_local_time, inverse_local_time_index, time_changed_path, LocalTimePath, LocalTimeSeries,
    TimeChangedPath,
};
pub use simulate::{simulate_gdiff, GdiffPath};

/// Default ambient dimension: one normal and two tangential coordinates.
pub const DEFAULT_DIM: usize = 3;
