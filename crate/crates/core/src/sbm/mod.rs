//! Skew Brownian motion: path schemes, local time and its exact law.
//!
//! A skew Brownian motion solves `x(t) = x0 + q * eta(t) + w(t)` where
//! `eta` is its symmetric local time at the origin. Three schemes are
//! provided:
//!
//! * `|q| < 1`, `q != 0`: Euler steps for `dx = a_n(x) dt + dw` with the
//!   mollified Gaussian drift of mass `artanh q`; local time is read off the
//!   accumulated drift.
//! * `q = 0`: the Wiener path itself with the Tanaka local-time estimator.
//! * `|q| = 1`: the discrete Skorokhod reflection map.

mod drift;
mod laws;
mod schemes;
mod transform;
mod validation;

pub use drift::{eval_mollified_drift, skew_to_mass, MollifiedDrift};
pub use laws::{
    expected_local_time, expected_local_time_closed_form, local_time_cdf, sample_local_time, LocalTimeLaw,
};
pub use schemes::{
    simulate_reflected, simulate_sbm, simulate_sbm_mollified, simulate_sbm_transformed, simulate_with_drift,
    tanaka_local_time, SbmPath, Scheme, TanakaEstimate,
};
pub use transform::{limit_sigma, s_inverse, s_transform, sigma_n, space_map, space_map_inverse};
pub use validation::{cross_scheme_ks, quadratic_variation_check, QuadraticVariationReport};

use serde::Serialize;

use crate::error::{invalid, Result};

/// Parameters of one skew Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SbmParams {
    pub q: f64,
    pub x0: f64,
    pub mollifier_n: u32,
}

/// Default mollifier scale for experiments.
pub const DEFAULT_MOLLIFIER_N: u32 = 256;

impl SbmParams {
    pub fn new(q: f64, x0: f64, mollifier_n: u32) -> Result<Self> {
        if !(q.abs() <= 1.0) {
            return invalid(format!("skewing parameter q = {q} must lie in [-1, 1]"));
        }
        if !x0.is_finite() {
            return invalid(format!("start point {x0} is not finite"));
        }
        if mollifier_n == 0 {
            return invalid("mollifier scale n must be at least 1");
        }
        Ok(Self { q, x0, mollifier_n })
    }

    pub fn is_reflected(&self) -> bool {
        self.q.abs() == 1.0
    }
}

/// `sign` with `sign(0) = 0`.
pub fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
