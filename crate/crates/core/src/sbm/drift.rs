use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{gaussian_tail, normal_pdf, FRAC_1_SQRT_2PI};

/// The bump is cut (continuously) at this many standard deviations.
pub const SUPPORT_SIGMAS: f64 = 6.0;

/// Mass `A` with `tanh A = q`.
pub fn skew_to_mass(q: f64) -> Result<f64> {
    if !(q.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "q = {q}: drift mass is infinite for |q| >= 1, use the reflected scheme"
        )));
    }
    Ok(q.atanh())
}

/// Compactly supported Gaussian bump of mass `A`,
/// `a(x) = A (phi(x) - phi(6))^+ / Z` with `Z` normalizing the mass, and its
/// rescaling `a_n(x) = n a(n x)`.
///
/// Inside `|x| < 6` the profile is the Gaussian `A/sqrt(2 pi) e^{-x^2/2}` to
/// within a relative `1e-7`; outside it is exactly zero, so the drift of
/// `a_n` acts only on `[-6/n, 6/n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifiedDrift {
    mass: f64,
    scale: u32,
    /// `A / Z`.
    coef: f64,
}

fn floor() -> f64 {
    normal_pdf(SUPPORT_SIGMAS)
}

/// `Z = int (phi(x) - phi(6))^+ dx`.
fn normalizer() -> f64 {
    1.0 - 2.0 * gaussian_tail(SUPPORT_SIGMAS) - 2.0 * SUPPORT_SIGMAS * floor()
}

impl MollifiedDrift {
    pub fn new(mass: f64, scale: u32) -> Self {
        assert!(scale >= 1, "mollifier scale must be positive");
        Self {
            mass,
            scale,
            coef: mass / normalizer(),
        }
    }

    pub fn from_skew(q: f64, scale: u32) -> Result<Self> {
        Ok(Self::new(skew_to_mass(q)?, scale))
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Skewing parameter `tanh A` of the limit process.
    pub fn skew(&self) -> f64 {
        self.mass.tanh()
    }

    /// Unit-mass shape `(phi(x) - phi(6))^+ / Z`.
    pub fn shape(x: f64) -> f64 {
        if x.abs() >= SUPPORT_SIGMAS {
            0.0
        } else {
            (normal_pdf(x) - floor()) / normalizer()
        }
    }

    /// Unscaled profile `a(x)`.
    pub fn profile(&self, x: f64) -> f64 {
        if x.abs() >= SUPPORT_SIGMAS {
            0.0
        } else {
            self.coef * (normal_pdf(x) - floor())
        }
    }

    /// `a_n(x) = n a(n x)`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.scale as f64;
        let u = n * x;
        if u.abs() >= SUPPORT_SIGMAS {
            0.0
        } else {
            n * self.coef * (FRAC_1_SQRT_2PI * (-0.5 * u * u).exp() - floor())
        }
    }

    /// `A(u) = int_{-inf}^u a(z) dz`.
    pub fn primitive(&self, u: f64) -> f64 {
        if u <= -SUPPORT_SIGMAS {
            0.0
        } else if u >= SUPPORT_SIGMAS {
            self.mass
        } else {
            self.coef * (gaussian_tail(-u) - gaussian_tail(SUPPORT_SIGMAS) - floor() * (u + SUPPORT_SIGMAS))
        }
    }

    /// Lipschitz constant of the profile `a`: `|A| / Z * sup |phi'|`.
    pub fn lipschitz_constant(&self) -> f64 {
        self.coef.abs() * normal_pdf(1.0)
    }

    /// Half-width `6 / n` of the support of `a_n`.
    pub fn support(&self) -> f64 {
        SUPPORT_SIGMAS / self.scale as f64
    }
}

pub fn eval_mollified_drift(d: &MollifiedDrift, x: f64) -> f64 {
    d.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn mass_from_skew() {
        assert_eq!(skew_to_mass(0.0).unwrap(), 0.0);
        // Newton on tanh(A) = 0.5 as an independent route.
        let mut a = 0.5_f64;
        for _ in 0..50 {
            a -= (a.tanh() - 0.5) / (1.0 - a.tanh().powi(2));
        }
        assert!((skew_to_mass(0.5).unwrap() - a).abs() < 1e-12);
        assert!((a - 0.549_306_144_334_054_8).abs() < 1e-12);
        assert!(matches!(skew_to_mass(1.0), Err(Error::Domain(_))));
        assert!(skew_to_mass(-1.0).is_err());
    }

    #[test]
    fn drift_values() {
        let d = MollifiedDrift::new(1.0, 5);
        // 5 / sqrt(2 pi) up to the 1e-7 cut correction.
        assert!((d.eval(0.0) / 1.994_711_402_007_163_4 - 1.0).abs() < 1e-7);
        assert_eq!(d.eval(6.0 / 5.0), 0.0);
        assert_eq!(MollifiedDrift::new(1.0, 1000).eval(1.0), 0.0);
    }

    #[test]
    fn drift_integrates_to_mass() {
        for &n in &[1_u32, 4, 16] {
            let d = MollifiedDrift::new(0.8, n);
            let r = d.support();
            let m = integrate(|x| d.eval(x), -r, r, 1e-12).unwrap();
            assert!((m - 0.8).abs() < 1e-8, "n = {n}: {m}");
        }
    }

    #[test]
    fn primitive_limits() {
        let d = MollifiedDrift::new(0.7, 3);
        assert!((d.primitive(0.0) - 0.35).abs() < 1e-15);
        assert!((d.primitive(5.999_999) - 0.7).abs() < 1e-12);
        assert_eq!(d.primitive(6.0), 0.7);
        assert_eq!(d.primitive(-6.0), 0.0);
        let inner = integrate(|x| d.profile(x), -6.0, 1.3, 1e-13).unwrap();
        assert!((d.primitive(1.3) - inner).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_bound_holds_on_a_scan() {
        let d = MollifiedDrift::new(-1.3, 1);
        let l = d.lipschitz_constant();
        let xs: Vec<f64> = (0..700).map(|i| -7.0 + i as f64 * 0.02).collect();
        for w in xs.windows(2) {
            let slope = (d.profile(w[1]) - d.profile(w[0])).abs() / (w[1] - w[0]);
            assert!(slope <= l * (1.0 + 1e-9));
        }
    }
}
