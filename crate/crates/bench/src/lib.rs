//! Shared fixtures for the benchmarks.

use skewdiff_core::{derive_stream, make_grid, sample_wiener, WienerPath};

pub const BENCH_SEED: u64 = 2024;

/// One seeded scalar driver on `[0, 1]`.
pub fn driver(steps: usize) -> WienerPath {
    let grid = make_grid(1.0, steps).expect("valid grid");
    sample_wiener(&grid, 1, &mut derive_stream(BENCH_SEED, 0)).expect("scalar path")
}

/// Deterministic samples spread over `[0, scale)`.
pub fn uniform_samples(count: usize, scale: f64) -> Vec<f64> {
    let mut s = derive_stream(BENCH_SEED, 1);
    (0..count).map(|_| scale * s.uniform()).collect()
}
