//! Drift-eliminating space transform of the mollified diffusion and its
//! `n -> infinity` limit.

use super::{sign0, MollifiedDrift};
use crate::error::{Error, Result};
use crate::quad::integrate;

const TRANSFORM_TOL: f64 = 1e-13;

fn normalizer(d: &MollifiedDrift) -> f64 {
    (-2.0 * d.primitive(0.0)).exp() / (1.0 + (-2.0 * d.mass()).exp())
}

fn scaled_integrand(d: &MollifiedDrift, u: f64) -> f64 {
    let n = d.scale() as f64;
    (-2.0 * (d.primitive(n * u) - d.primitive(0.0))).exp()
}

/// `S_n'(x)`.
pub fn s_derivative(d: &MollifiedDrift, x: f64) -> f64 {
    normalizer(d) * scaled_integrand(d, x)
}

/// `S_n(x) = c int_0^x exp(-2 (A(n u) - A(0))) du`.
pub fn s_transform(d: &MollifiedDrift, x: f64) -> Result<f64> {
    let c = normalizer(d);
    let f = |u: f64| scaled_integrand(d, u);
    // The integrand is constant outside the drift support.
    let knee = d.support();
    let span = x.abs();
    let inner = span.min(knee);
    let mut total = if x >= 0.0 {
        integrate(f, 0.0, inner, TRANSFORM_TOL)?
    } else {
        integrate(f, -inner, 0.0, TRANSFORM_TOL)?
    };
    if span > knee {
        total += if x >= 0.0 {
            integrate(f, knee, span, TRANSFORM_TOL)?
        } else {
            integrate(f, -span, -knee, TRANSFORM_TOL)?
        };
    }
    Ok(c * sign0(x) * total)
}

/// Inverse of `s_transform`, by safeguarded Newton iteration.
pub fn s_inverse(d: &MollifiedDrift, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    // S_n' lies in [c e^{-|A|}, c e^{|A|}].
    let c = normalizer(d);
    let reach = y.abs() / (c * (-d.mass().abs()).exp());
    let (mut lo, mut hi) = if y > 0.0 { (0.0, reach) } else { (-reach, 0.0) };
    let mut x = y / c;
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let g = s_transform(d, x)? - y;
        if g == 0.0 {
            return Ok(x);
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - g / s_derivative(d, x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NumericFailure(format!(
        "inverse transform did not converge for y = {y}"
    )))
}

/// `sigma_n(y) = S_n'(S_n^{-1}(y))`.
pub fn sigma_n(d: &MollifiedDrift, y: f64) -> Result<f64> {
    Ok(s_derivative(d, s_inverse(d, y)?))
}

/// Limit diffusion coefficient `(1 - q sign y) / 2`, with `sign 0 = 0`.
pub fn limit_sigma(q: f64, y: f64) -> f64 {
    0.5 * (1.0 - q * sign0(y))
}

/// Limit of `S_n`: `x (1 - q sign x) / 2`.
pub fn space_map(q: f64, x: f64) -> f64 {
    0.5 * x * (1.0 - q * sign0(x))
}

/// Inverse of `space_map`: `2 y / (1 - q sign y)`.
pub fn space_map_inverse(q: f64, y: f64) -> f64 {
    2.0 * y / (1.0 - q * sign0(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mass_is_half_identity() {
        for &n in &[1_u32, 7, 300] {
            let d = MollifiedDrift::new(0.0, n);
            for &x in &[-3.0, -0.2, 0.0, 0.4, 5.0] {
                assert!((s_transform(&d, x).unwrap() - x / 2.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_contract() {
        let d = MollifiedDrift::from_skew(0.6, 16).unwrap();
        for &x in &[-3.0, -1.0, 0.0, 1.0, 3.0] {
            let y = s_transform(&d, x).unwrap();
            assert!((s_inverse(&d, y).unwrap() - x).abs() < 1e-10);
        }
    }

    #[test]
    fn transform_is_increasing() {
        let d = MollifiedDrift::from_skew(-0.8, 4).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in -50..=50 {
            let v = s_transform(&d, i as f64 * 0.1).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn slopes_converge_to_the_limit_map() {
        let q = 0.6;
        let d = MollifiedDrift::from_skew(q, 10_000).unwrap();
        let up = s_transform(&d, 1.0).unwrap();
        let down = s_transform(&d, -1.0).unwrap();
        assert!((up - (1.0 - q) / 2.0).abs() < 1e-3);
        assert!((down / -1.0 - (1.0 + q) / 2.0).abs() < 1e-3);
        assert!((up - space_map(q, 1.0)).abs() < 1e-3);
        assert!((down - space_map(q, -1.0)).abs() < 1e-3);
    }

    #[test]
    fn sigma_n_tends_to_limit_sigma_away_from_zero() {
        let q = 0.6;
        let d = MollifiedDrift::from_skew(q, 2_000).unwrap();
        for &y in &[-0.5, 0.5] {
            assert!((sigma_n(&d, y).unwrap() - limit_sigma(q, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_sigma_values() {
        assert_eq!(limit_sigma(0.5, 1.0), 0.25);
        assert_eq!(limit_sigma(0.5, -1.0), 0.75);
        for &q in &[-0.9, 0.0, 0.3] {
            assert_eq!(limit_sigma(q, 0.0), 0.5);
        }
    }

    #[test]
    fn space_map_round_trip() {
        for &x in &[-2.0, -0.5, 0.0, 0.5, 2.0] {
            assert_eq!(space_map(0.0, x), x / 2.0);
            assert_eq!(space_map_inverse(0.0, x), 2.0 * x);
            let y = space_map(0.7, x);
            assert!((space_map_inverse(0.7, y) - x).abs() < 1e-15);
        }
    }
}
