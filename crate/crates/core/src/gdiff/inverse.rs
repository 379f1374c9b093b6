use serde::Serialize;

use super::{GdiffCoefficients, GdiffPath, HyperplaneFrame};
use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::sbm::SbmPath;

/// A nondecreasing local-time path sampled on a grid.
pub trait LocalTimePath {
    fn grid(&self) -> &TimeGrid;
    fn eta(&self) -> &[f64];
}

impl LocalTimePath for SbmPath {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    fn eta(&self) -> &[f64] {
        &self.eta
    }
}

impl LocalTimePath for GdiffPath {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    fn eta(&self) -> &[f64] {
        &self.eta
    }
}

/// Bare local-time values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeSeries {
    grid: TimeGrid,
    eta: Vec<f64>,
}

impl LocalTimeSeries {
    pub fn new(grid: TimeGrid, eta: Vec<f64>) -> Result<Self> {
        if eta.len() != grid.len() {
            return invalid(format!("{} values for {} grid nodes", eta.len(), grid.len()));
        }
        if eta[0] != 0.0 {
            return invalid("local time must start at 0");
        }
        if eta.windows(2).any(|p| !(p[1] >= p[0])) {
            return invalid("local time must be nondecreasing");
        }
        Ok(Self { grid, eta })
    }
}

impl LocalTimePath for LocalTimeSeries {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    fn eta(&self) -> &[f64] {
        &self.eta
    }
}

/// Index of the first node with `eta >= level`, or `None` past the horizon.
pub fn inverse_local_time_index<P: LocalTimePath + ?Sized>(path: &P, level: f64) -> Result<Option<usize>> {
    if !(level >= 0.0) {
        return invalid(format!("local-time level must be >= 0, got {level}"));
    }
    let eta = path.eta();
    let k = eta.partition_point(|&e| e < level);
    Ok((k < eta.len()).then_some(k))
}

/// `rho_t = inf { s : eta_s >= t }` restricted to grid nodes.
pub fn inverse_local_time<P: LocalTimePath + ?Sized>(path: &P, level: f64) -> Result<Option<f64>> {
    Ok(inverse_local_time_index(path, level)?.map(|k| path.grid().time(k)))
}

/// `x(rho_u)` on a set of local-time levels with the residual of the
/// time-changed equation at each level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeChangedPath {
    /// Levels that were reached, in input order.
    pub levels: Vec<f64>,
    pub times: Vec<f64>,
    pub nodes: Vec<usize>,
    pub x: Vec<Vec<f64>>,
    /// `|x(rho_u) - x0 - int_0^u (q nu + alpha) dv - int beta~ dw~ - w(rho_u)|`.
    pub residuals: Vec<f64>,
    /// Normal part `x(rho_u) . nu - x0 . nu - w(rho_u) . nu - q u`.
    pub normal_residuals: Vec<f64>,
    /// Set when a level lies beyond the local time accumulated on the horizon.
    pub truncated: bool,
}

impl TimeChangedPath {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Samples `x(rho_u)` for nondecreasing `levels`. The `du` integral of
/// `alpha(x^S(rho_u))` is taken exactly for the grid inverse, which is
/// constant on each `(eta_{j-1}, eta_j]`.
pub fn time_changed_path(
    path: &GdiffPath,
    frame: &HyperplaneFrame,
    c: &GdiffCoefficients,
    levels: &[f64],
) -> Result<TimeChangedPath> {
    if levels.iter().any(|u| !(*u >= 0.0 && u.is_finite())) {
        return invalid("local-time levels must be finite and >= 0");
    }
    if levels.windows(2).any(|p| p[1] < p[0]) {
        return invalid("local-time levels must be nondecreasing");
    }
    if frame.dim() != path.dim || c.tangent_dim != path.tangent_dim() {
        return invalid("frame and coefficients must match the path dimension");
    }
    let m = path.tangent_dim();
    let nodes = path.grid.len();
    // integral[j] = sum_{l <= j} alpha(s_l) (eta_l - eta_{l-1})
    let mut integral = vec![0.0; nodes * m];
    let mut alphas = vec![0.0; nodes * m];
    c.alpha(path.tangential_at(0), &mut alphas[..m]);
    for j in 1..nodes {
        c.alpha(path.tangential_at(j), &mut alphas[j * m..(j + 1) * m]);
        let de = path.eta[j] - path.eta[j - 1];
        for i in 0..m {
            integral[j * m + i] = integral[(j - 1) * m + i] + alphas[j * m + i] * de;
        }
    }
    let x0_normal = frame.normal(&path.x0);
    let s0 = frame.tangential(&path.x0);
    let mut out = TimeChangedPath {
        levels: Vec::new(),
        times: Vec::new(),
        nodes: Vec::new(),
        x: Vec::new(),
        residuals: Vec::new(),
        normal_residuals: Vec::new(),
        truncated: false,
    };
    for &u in levels {
        let Some(k) = inverse_local_time_index(path, u)? else {
            out.truncated = true;
            break;
        };
        let overshoot = path.eta[k] - u;
        let normal_res = path.normal.x[k] - x0_normal - path.normal.w[k] - c.q * u;
        let mut sq = normal_res * normal_res;
        let s = path.tangential_at(k);
        let noise = path.noise_at(k);
        let wt = path.w_tangential_at(k);
        for i in 0..m {
            let drift = integral[k * m + i] - alphas[k * m + i] * overshoot;
            let r = s[i] - s0[i] - drift - noise[i] - wt[i];
            sq += r * r;
        }
        out.levels.push(u);
        out.times.push(path.grid.time(k));
        out.nodes.push(k);
        out.x.push(path.x_at(k).to_vec());
        out.residuals.push(sq.sqrt());
        out.normal_residuals.push(normal_res);
    }
    Ok(out)
}
