//! Exact law of the local time at the interface and its mean `I_t(x)`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quad::integrate;
use crate::rng::RandomStream;
use crate::special::{gaussian_tail, gaussian_tail_inverse, normal_pdf};
use crate::stats::Cdf;

/// Law of `eta_t` for a start at signed distance `x` from the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalTimeLaw {
    pub x: f64,
    pub t: f64,
}

impl LocalTimeLaw {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return invalid(format!("local-time law needs t > 0, got {t}"));
        }
        if !x.is_finite() {
            return invalid(format!("start point {x} is not finite"));
        }
        Ok(Self { x, t })
    }

    /// `P{eta_t = 0}`: the interface is not reached by time `t`.
    pub fn atom(&self) -> f64 {
        1.0 - 2.0 * gaussian_tail(self.x.abs() / self.t.sqrt())
    }

    fn positive_part(&self, a: f64) -> f64 {
        1.0 - 2.0 * gaussian_tail((self.x.abs() + a) / self.t.sqrt())
    }
}

/// `P{eta_t < a} = (1 - 2 Q((|x| + a) / sqrt t)) 1{a > 0}`.
pub fn local_time_cdf(law: &LocalTimeLaw, a: f64) -> f64 {
    if a > 0.0 {
        law.positive_part(a)
    } else {
        0.0
    }
}

impl Cdf for LocalTimeLaw {
    fn cdf(&self, a: f64) -> f64 {
        if a >= 0.0 {
            self.positive_part(a)
        } else {
            0.0
        }
    }

    fn cdf_left(&self, a: f64) -> f64 {
        local_time_cdf(self, a)
    }
}

/// Inverse-transform sample of `eta_t`; the atom at zero is resolved first.
pub fn sample_local_time(law: &LocalTimeLaw, stream: &mut RandomStream) -> f64 {
    let u = stream.uniform_open();
    if u < law.atom() {
        return 0.0;
    }
    // 1 - 2 Q(z) = u  <=>  Q(z) = (1 - u) / 2
    let z = gaussian_tail_inverse(0.5 * (1.0 - u)).expect("(1 - u) / 2 lies in (0, 1/2] for u in (0, 1)");
    (law.t.sqrt() * z - law.x.abs()).max(0.0)
}

/// `I_t(x) = int_0^t (2 pi tau)^{-1/2} exp(-x^2 / (2 tau)) d tau`, the mean
/// local time, by quadrature after `tau = s^2`.
pub fn expected_local_time(x: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return invalid(format!("I_t(x) needs t >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let c = (2.0 / std::f64::consts::PI).sqrt();
    let half_x2 = 0.5 * x * x;
    let f = |s: f64| {
        if half_x2 == 0.0 {
            c
        } else {
            c * (-half_x2 / (s * s)).exp()
        }
    };
    integrate(f, 0.0, t.sqrt(), 1e-10)
}

/// Closed form `2 sqrt(t) phi(x / sqrt t) - 2 |x| Q(|x| / sqrt t)`.
pub fn expected_local_time_closed_form(x: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let s = t.sqrt();
    2.0 * s * normal_pdf(x / s) - 2.0 * x.abs() * gaussian_tail(x.abs() / s)
}
