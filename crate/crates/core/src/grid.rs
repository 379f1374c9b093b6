//! Uniform time grids, sampled Wiener paths and the Hölder-1/4 diagnostic.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::rng::RandomStream;

/// Uniform partition `t_k = k * horizon / steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

pub fn make_grid(horizon: f64, steps: usize) -> Result<TimeGrid> {
    TimeGrid::new(horizon, steps)
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return invalid(format!("grid horizon must be positive and finite, got {horizon}"));
        }
        if steps == 0 {
            return invalid("grid needs at least one step");
        }
        Ok(Self { horizon, steps })
    }

    /// Grid with step as close to `dt` as an integer step count allows.
    pub fn with_step(horizon: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        Self::new(horizon, ((horizon / dt).round() as usize).max(1))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.horizon / self.steps as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    /// Index of the last node with time `<= t` (clamped to the grid).
    pub fn node_at_or_before(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 0;
        }
        let k = (t / self.horizon * self.steps as f64 * (1.0 + 1e-12)).floor() as usize;
        k.min(self.steps)
    }
}

/// A `dims`-dimensional Wiener path on a grid, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    grid: TimeGrid,
    dims: usize,
    values: Vec<f64>,
}

impl WienerPath {
    /// Wraps prescribed node values (e.g. a deterministic driver).
    pub fn from_values(grid: TimeGrid, dims: usize, values: Vec<f64>) -> Result<Self> {
        if dims == 0 {
            return invalid("driver dimension must be at least 1");
        }
        if values.len() != grid.len() * dims {
            return invalid(format!(
                "driver has {} values, grid needs {}",
                values.len(),
                grid.len() * dims
            ));
        }
        if values[..dims].iter().any(|&v| v != 0.0) {
            return invalid("driver must start at the origin");
        }
        Ok(Self { grid, dims, values })
    }

    /// One-dimensional driver from per-node values.
    pub fn scalar(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::from_values(grid, 1, values)
    }

    pub fn zero(grid: TimeGrid, dims: usize) -> Result<Self> {
        Self::from_values(grid, dims, vec![0.0; grid.len() * dims])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.dims..(k + 1) * self.dims]
    }

    /// Values of a one-dimensional path (or the raw node-major buffer).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().skip(i).step_by(self.dims).copied().collect()
    }

    /// Scalar path `w(t) . direction`.
    pub fn project(&self, direction: &[f64]) -> WienerPath {
        assert_eq!(direction.len(), self.dims, "projection direction dimension");
        let values = self
            .values
            .chunks_exact(self.dims)
            .map(|v| v.iter().zip(direction).map(|(a, b)| a * b).sum())
            .collect();
        WienerPath {
            grid: self.grid,
            dims: 1,
            values,
        }
    }
}

/// Samples a Wiener path with i.i.d. `N(0, dt)` increments per coordinate.
pub fn sample_wiener(grid: &TimeGrid, dims: usize, stream: &mut RandomStream) -> Result<WienerPath> {
    if dims == 0 {
        return invalid("driver dimension must be at least 1");
    }
    let sd = grid.dt().sqrt();
    let mut values = vec![0.0; grid.len() * dims];
    for k in 1..grid.len() {
        for i in 0..dims {
            values[k * dims + i] = values[(k - 1) * dims + i] + sd * stream.standard_normal();
        }
    }
    Ok(WienerPath {
        grid: *grid,
        dims,
        values,
    })
}

/// Hölder norm with exponent 1/4 over the nodes in `[0, window_end]`:
/// the maximum of `|w(t) - w(s)| / (t - s)^{1/4}` over node pairs `s < t`.
pub fn holder_quarter_norm(path: &WienerPath, window_end: f64) -> Result<f64> {
    let grid = path.grid();
    if !(window_end > 0.0) {
        return invalid(format!("Hölder window [0, {window_end}] is empty"));
    }
    if window_end > grid.horizon() * (1.0 + 1e-12) {
        return invalid(format!(
            "Hölder window end {window_end} exceeds the horizon {}",
            grid.horizon()
        ));
    }
    let last = grid.node_at_or_before(window_end);
    if last == 0 {
        return invalid(format!("Hölder window [0, {window_end}] holds a single node"));
    }
    let d = path.dims();
    let mut best = 0.0_f64;
    for j in 1..=last {
        let tj = grid.time(j);
        let vj = path.value(j);
        for i in 0..j {
            let vi = path.value(i);
            let dist = if d == 1 {
                (vj[0] - vi[0]).abs()
            } else {
                vj.iter()
                    .zip(vi)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            };
            let q = dist / (tj - grid.time(i)).powf(0.25);
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}
