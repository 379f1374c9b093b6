//! Simulation and Monte Carlo verification toolkit for skew Brownian motion
//! and diffusions with a skewed hyperplane interface.
//!
//! * [`grid`], [`rng`], [`special`], [`quad`]: time grids, Wiener paths,
//!   reproducible substreams, Gaussian tails and adaptive quadrature.
//! * [`sbm`]: skew Brownian motion schemes and local-time laws.
//! * [`coupling`]: pairs driven by one Wiener path and the comparison and
//!   distance experiments built on them.
//! * [`gdiff`]: the `d`-dimensional interface diffusion, its inverse local
//!   time and the stochastic-continuity experiment.
//! * [`stats`]: Monte Carlo summaries, KS distances, trend checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod gdiff;
pub mod grid;
pub mod mc;
pub mod quad;
pub mod rng;
pub mod sbm;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use grid::{holder_quarter_norm, make_grid, sample_wiener, TimeGrid, WienerPath};
pub use mc::Ensemble;
pub use quad::integrate;
pub use rng::{derive_stream, path_stream, RandomStream, StreamRole};
pub use sbm::{SbmParams, SbmPath};
pub use special::gaussian_tail;
pub use stats::{ks_distance, mc_summary, EmpiricalCdf, McSummary};
