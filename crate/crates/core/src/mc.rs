//! Path ensembles: grid, per-path substreams and ordered parallel fan-out.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::{sample_wiener, TimeGrid, WienerPath};
use crate::rng::{path_stream, RandomStream, StreamRole};

/// `paths` independent replications on a common grid, keyed by `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ensemble {
    pub grid: TimeGrid,
    pub paths: usize,
    pub seed: u64,
}

impl Ensemble {
    pub fn new(grid: TimeGrid, paths: usize, seed: u64) -> Result<Self> {
        if paths < 2 {
            return invalid(format!("an ensemble needs at least 2 paths, got {paths}"));
        }
        Ok(Self { grid, paths, seed })
    }

    /// Ensemble on `[0, horizon]` with step closest to `dt`.
    pub fn with_step(horizon: f64, dt: f64, paths: usize, seed: u64) -> Result<Self> {
        Self::new(TimeGrid::with_step(horizon, dt)?, paths, seed)
    }

    pub fn stream(&self, path: usize, role: StreamRole) -> RandomStream {
        path_stream(self.seed, path as u64, role)
    }

    pub fn wiener(&self, path: usize, dims: usize) -> Result<WienerPath> {
        sample_wiener(&self.grid, dims, &mut self.stream(path, StreamRole::Wiener))
    }

    /// Evaluates `f` on every path index. Work may run on any number of
    /// threads; results come back in path order.
    pub fn map<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        (0..self.paths).into_par_iter().map(f).collect()
    }
}
