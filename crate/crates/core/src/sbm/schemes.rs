use serde::Serialize;

use super::{limit_sigma, sign0, space_map, space_map_inverse, MollifiedDrift, SbmParams};
use crate::error::{invalid, Error, Result};
use crate::grid::{TimeGrid, WienerPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Mollified,
    Tanaka,
    Reflected,
}

/// Joint `(x, eta)` path on a grid together with its scalar driver.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmPath {
    pub grid: TimeGrid,
    pub q: f64,
    pub x0: f64,
    pub x: Vec<f64>,
    pub eta: Vec<f64>,
    /// Driver values `w(t_k)`.
    pub w: Vec<f64>,
    pub scheme: Scheme,
    /// Largest correction applied to make the Tanaka estimate monotone
    /// (zero for the exact schemes).
    pub clamp: f64,
}

impl SbmPath {
    pub fn terminal_x(&self) -> f64 {
        *self.x.last().expect("nonempty path")
    }

    pub fn terminal_eta(&self) -> f64 {
        *self.eta.last().expect("nonempty path")
    }

    /// `max_k |x_k - x0 - q eta_k - w_k|`.
    pub fn identity_residual(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.eta)
            .zip(&self.w)
            .map(|((x, e), w)| (x - self.x0 - self.q * e - w).abs())
            .fold(0.0, f64::max)
    }
}

fn scalar_driver(w: &WienerPath) -> Result<&[f64]> {
    if w.dims() != 1 {
        return invalid(format!(
            "skew Brownian motion needs a scalar driver, got dimension {}",
            w.dims()
        ));
    }
    Ok(w.values())
}

/// Routes `p` to the appropriate scheme: reflection for `|q| = 1`,
/// the mollified drift otherwise.
pub fn simulate_sbm(p: &SbmParams, w: &WienerPath) -> Result<SbmPath> {
    if p.is_reflected() {
        simulate_reflected(p.x0, p.q, w)
    } else {
        simulate_sbm_mollified(p, w)
    }
}

/// Euler scheme for `dx = a_n(x) dt + dw` with `a_n` the bump of mass
/// `artanh q`. For `q = 0` the path is `x0 + w` with Tanaka local time.
pub fn simulate_sbm_mollified(p: &SbmParams, w: &WienerPath) -> Result<SbmPath> {
    if p.is_reflected() {
        return Err(Error::Domain(format!(
            "q = {} has infinite drift mass, use simulate_reflected",
            p.q
        )));
    }
    if p.q == 0.0 {
        let wv = scalar_driver(w)?;
        let x: Vec<f64> = wv.iter().map(|v| p.x0 + v).collect();
        let est = tanaka_local_time(&x, w)?;
        return Ok(SbmPath {
            grid: *w.grid(),
            q: 0.0,
            x0: p.x0,
            x,
            eta: est.eta,
            w: wv.to_vec(),
            scheme: Scheme::Tanaka,
            clamp: est.clamp,
        });
    }
    let drift = MollifiedDrift::from_skew(p.q, p.mollifier_n)?;
    simulate_with_drift(&drift, p.x0, w)
}

/// Euler scheme for a given nonzero mollified drift.
///
/// The accumulated drift `D_k = sum_{j<k} a_n(x_j) dt` is kept separately so
/// that `x_k = x0 + D_k + w_k` and `eta_k = D_k / q` satisfy the skew
/// identity up to rounding.
pub fn simulate_with_drift(drift: &MollifiedDrift, x0: f64, w: &WienerPath) -> Result<SbmPath> {
    let q = drift.skew();
    if q == 0.0 {
        return invalid("drift of zero mass has no local-time readout");
    }
    let wv = scalar_driver(w)?;
    let grid = *w.grid();
    let dt = grid.dt();
    let len = grid.len();
    let mut x = Vec::with_capacity(len);
    let mut eta = Vec::with_capacity(len);
    let mut acc = 0.0_f64;
    x.push(x0);
    eta.push(0.0);
    for k in 0..grid.steps() {
        acc += drift.eval(x[k]) * dt;
        x.push(x0 + acc + wv[k + 1]);
        eta.push(acc / q);
    }
    Ok(SbmPath {
        grid,
        q,
        x0,
        x,
        eta,
        w: wv.to_vec(),
        scheme: Scheme::Mollified,
        clamp: 0.0,
    })
}

/// Discrete Skorokhod map onto `[0, inf)` (`q = 1`) or `(-inf, 0]`
/// (`q = -1`).
pub fn simulate_reflected(x0: f64, q: f64, w: &WienerPath) -> Result<SbmPath> {
    if q != 1.0 && q != -1.0 {
        return invalid(format!("reflection needs q = +1 or -1, got {q}"));
    }
    if q * x0 < 0.0 {
        return invalid(format!(
            "start point {x0} lies outside the phase space for q = {q}"
        ));
    }
    let wv = scalar_driver(w)?;
    let mut x = Vec::with_capacity(wv.len());
    let mut eta = Vec::with_capacity(wv.len());
    // Lindley recursion in the q = 1 picture. Each step is a rounded sum
    // followed by a max, both monotone, so ordered starts stay ordered
    // exactly in floating point.
    let mut z = q * x0;
    let mut push = 0.0_f64;
    let mut prev = 0.0_f64;
    for &wk in wv {
        let free = z + q * (wk - prev);
        prev = wk;
        if free < 0.0 {
            push -= free;
            z = 0.0;
        } else {
            z = free;
        }
        eta.push(push);
        x.push(q * z);
    }
    Ok(SbmPath {
        grid: *w.grid(),
        q,
        x0,
        x,
        eta,
        w: wv.to_vec(),
        scheme: Scheme::Reflected,
        clamp: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TanakaEstimate {
    pub eta: Vec<f64>,
    /// Raw (unclamped) estimate.
    pub raw: Vec<f64>,
    /// `max_k (eta_k - raw_k)`.
    pub clamp: f64,
}

/// Local time at zero from Tanaka's formula,
/// `eta_k = |x_k| - |x_0| - sum_{j<k} sign(x_j) dw_j`, made nondecreasing by
/// its running maximum.
pub fn tanaka_local_time(x_path: &[f64], w: &WienerPath) -> Result<TanakaEstimate> {
    let wv = scalar_driver(w)?;
    if x_path.len() != wv.len() {
        return invalid(format!(
            "path has {} nodes, driver has {}",
            x_path.len(),
            wv.len()
        ));
    }
    let mut raw = Vec::with_capacity(wv.len());
    let mut eta = Vec::with_capacity(wv.len());
    let mut integral = 0.0_f64;
    let mut envelope = 0.0_f64;
    let mut clamp = 0.0_f64;
    let start = x_path[0].abs();
    for k in 0..wv.len() {
        if k > 0 {
            integral += sign0(x_path[k - 1]) * (wv[k] - wv[k - 1]);
        }
        let r = x_path[k].abs() - start - integral;
        envelope = envelope.max(r);
        clamp = clamp.max(envelope - r);
        raw.push(r);
        eta.push(envelope);
    }
    Ok(TanakaEstimate { eta, raw, clamp })
}

/// Cross-check scheme: Euler for `dy = sigma(y) dw` with the limit
/// coefficient, started at `space_map(q, x0)` and mapped back through
/// `space_map_inverse`. Returns the `x` path.
pub fn simulate_sbm_transformed(q: f64, x0: f64, w: &WienerPath) -> Result<Vec<f64>> {
    if !(q.abs() < 1.0) {
        return invalid(format!("transformed scheme needs |q| < 1, got {q}"));
    }
    let wv = scalar_driver(w)?;
    let mut y = space_map(q, x0);
    let mut x = Vec::with_capacity(wv.len());
    x.push(x0);
    for k in 1..wv.len() {
        y += limit_sigma(q, y) * (wv[k] - wv[k - 1]);
        x.push(space_map_inverse(q, y));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_wiener};
    use crate::rng::derive_stream;

    #[test]
    fn far_from_interface_drift_vanishes() {
        let g = make_grid(1.0, 1000).unwrap();
        let w = WienerPath::zero(g, 1).unwrap();
        let p = SbmParams::new(0.6, 5.0, 64).unwrap();
        let path = simulate_sbm_mollified(&p, &w).unwrap();
        assert!(path.x.iter().all(|&x| (x - 5.0).abs() < 1e-10));
        assert!(path.eta.iter().all(|&e| e.abs() < 1e-10));
    }

    #[test]
    fn mollified_identity_is_exact() {
        let g = make_grid(1.0, 10_000).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(11, 0)).unwrap();
        let p = SbmParams::new(0.6, 0.0, 256).unwrap();
        let path = simulate_sbm_mollified(&p, &w).unwrap();
        assert!(path.identity_residual() <= 1e-12);
        assert_eq!(path.eta[0], 0.0);
        assert!(path.eta.windows(2).all(|e| e[1] >= e[0]));
    }

    #[test]
    fn negative_skew_keeps_eta_nondecreasing() {
        let g = make_grid(1.0, 5_000).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(12, 0)).unwrap();
        let p = SbmParams::new(-0.4, 0.1, 128).unwrap();
        let path = simulate_sbm_mollified(&p, &w).unwrap();
        assert!(path.eta.windows(2).all(|e| e[1] >= e[0]));
        assert!(path.identity_residual() <= 1e-12);
    }

    #[test]
    fn unit_skew_is_rejected_by_the_mollified_scheme() {
        let g = make_grid(1.0, 10).unwrap();
        let w = WienerPath::zero(g, 1).unwrap();
        let p = SbmParams::new(1.0, 0.0, 8).unwrap();
        assert!(matches!(simulate_sbm_mollified(&p, &w), Err(Error::Domain(_))));
        assert!(simulate_sbm(&p, &w).is_ok());
    }

    #[test]
    fn reflection_of_linear_drain() {
        let g = make_grid(1.0, 50).unwrap();
        let w = WienerPath::scalar(g, g.times().iter().map(|t| -t).collect()).unwrap();
        let path = simulate_reflected(0.0, 1.0, &w).unwrap();
        for (k, t) in g.times().iter().enumerate() {
            assert!(path.x[k].abs() < 1e-15);
            assert!((path.eta[k] - t).abs() < 1e-15);
        }
        // Mirror image for q = -1.
        let up = WienerPath::scalar(g, g.times()).unwrap();
        let mirrored = simulate_reflected(0.0, -1.0, &up).unwrap();
        assert!(mirrored.x.iter().all(|x| x.abs() < 1e-15));
        assert!((mirrored.terminal_eta() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_far_from_boundary() {
        let g = make_grid(1.0, 20).unwrap();
        let w = WienerPath::zero(g, 1).unwrap();
        let path = simulate_reflected(1.0, 1.0, &w).unwrap();
        assert!(path.x.iter().all(|&x| x == 1.0));
        assert!(path.eta.iter().all(|&e| e == 0.0));
        assert!(simulate_reflected(-0.5, 1.0, &w).is_err());
        assert!(simulate_reflected(0.5, -1.0, &w).is_err());
        assert!(simulate_reflected(0.5, 0.5, &w).is_err());
    }

    #[test]
    fn reflected_stays_in_phase_space() {
        let g = make_grid(2.0, 4000).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(5, 5)).unwrap();
        let up = simulate_reflected(0.2, 1.0, &w).unwrap();
        let down = simulate_reflected(-0.2, -1.0, &w).unwrap();
        assert!(up.x.iter().all(|&x| x >= 0.0));
        assert!(down.x.iter().all(|&x| x <= 0.0));
        assert!(up.identity_residual() <= 1e-12);
        assert!(down.identity_residual() <= 1e-12);
    }

    #[test]
    fn reflected_order_is_exact_in_floating_point() {
        let g = make_grid(1.0, 2000).unwrap();
        for k in 0..200 {
            let w = sample_wiener(&g, 1, &mut derive_stream(31, k)).unwrap();
            for (q, a, b) in [(1.0, 0.2, 0.5), (-1.0, -0.5, -0.2), (1.0, 0.0, 0.3)] {
                let lo = simulate_reflected(a, q, &w).unwrap();
                let hi = simulate_reflected(b, q, &w).unwrap();
                assert!(lo.x.iter().zip(&hi.x).all(|(x1, x2)| x1 <= x2));
            }
        }
    }

    #[test]
    fn tanaka_vanishes_away_from_zero() {
        let g = make_grid(1.0, 100).unwrap();
        let w = WienerPath::scalar(g, g.times().iter().map(|t| 0.3 * t).collect()).unwrap();
        let x: Vec<f64> = w.values().iter().map(|v| 2.0 + v).collect();
        let est = tanaka_local_time(&x, &w).unwrap();
        assert!(est.eta.iter().all(|e| e.abs() < 1e-12));
        assert!(est.clamp < 1e-12);
    }

    #[test]
    fn tanaka_is_monotone() {
        let g = make_grid(1.0, 2000).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(2, 3)).unwrap();
        let p = SbmParams::new(0.0, 0.0, 1).unwrap();
        let path = simulate_sbm_mollified(&p, &w).unwrap();
        assert_eq!(path.scheme, Scheme::Tanaka);
        assert_eq!(path.eta[0], 0.0);
        assert!(path.eta.windows(2).all(|e| e[1] >= e[0]));
    }

    #[test]
    fn transformed_scheme_without_skew_is_the_driver() {
        let g = make_grid(1.0, 100).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(3, 3)).unwrap();
        let x = simulate_sbm_transformed(0.0, 0.25, &w).unwrap();
        for (xi, wi) in x.iter().zip(w.values()) {
            assert!((xi - 0.25 - wi).abs() < 1e-14);
        }
    }
}
