//! One module per subcommand, plus shared parameter resolution.

pub mod continuity;
pub mod couple;
pub mod gdiff;
pub mod laws;
pub mod sbm;

use skewdiff_core::gdiff::{GdiffCoefficients, HyperplaneFrame, Profile, DEFAULT_DIM};
use skewdiff_core::sbm::DEFAULT_MOLLIFIER_N;
use skewdiff_core::{Ensemble, TimeGrid};

use crate::config::ParamMap;
use crate::error::CliError;
use crate::report::Params;

pub const DEFAULT_DT: f64 = 1e-4;

/// Horizon, step and path count shared by most experiments.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub grid: TimeGrid,
    pub paths: usize,
    pub seed: u64,
    pub n: u32,
}

impl Sampling {
    pub fn resolve(
        p: &ParamMap,
        default_t: f64,
        default_dt: f64,
        default_paths: usize,
    ) -> Result<Self, CliError> {
        let t = p.get_or("t", default_t)?;
        let grid = match p.get::<usize>("steps")? {
            Some(steps) => TimeGrid::new(t, steps)?,
            None => TimeGrid::with_step(t, p.get_or("dt", default_dt)?)?,
        };
        let n = p.get_or("n", DEFAULT_MOLLIFIER_N)?;
        if n == 0 {
            return Err(CliError::config("mollifier scale n must be >= 1"));
        }
        Ok(Self {
            grid,
            paths: p.get_or("paths", default_paths)?,
            seed: p.seed()?,
            n,
        })
    }

    pub fn ensemble(&self) -> Result<Ensemble, CliError> {
        Ok(Ensemble::new(self.grid, self.paths, self.seed)?)
    }

    /// Same ensemble on a grid with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Result<Ensemble, CliError> {
        let grid = TimeGrid::new(self.grid.horizon(), self.grid.steps() * factor)?;
        Ok(Ensemble::new(grid, self.paths, self.seed)?)
    }

    pub fn record(&self, params: Params) -> Params {
        params
            .set("t", self.grid.horizon())
            .set("steps", self.grid.steps())
            .set("dt", self.grid.dt())
            .set("paths", self.paths)
            .set("seed", self.seed)
            .set("n", self.n)
    }
}

pub fn experiment_name(p: &ParamMap, default: &str) -> String {
    p.raw("experiment").unwrap_or(default).to_string()
}

pub fn unknown_experiment(sub: &str, name: &str, known: &[&str]) -> CliError {
    CliError::config(format!(
        "unknown {sub} experiment '{name}' (expected one of: {})",
        known.join(", ")
    ))
}

/// Interface frame from `dim` and an optional `normal`.
pub fn frame(p: &ParamMap) -> Result<HyperplaneFrame, CliError> {
    let dim: usize = p.get_or("dim", DEFAULT_DIM)?;
    let frame = match p.raw("normal") {
        Some(_) => {
            let nu = p.list_or("normal", &[])?;
            if nu.len() != dim {
                return Err(CliError::config(format!(
                    "normal has {} components, dim is {dim}",
                    nu.len()
                )));
            }
            HyperplaneFrame::new(&nu)?
        }
        None => HyperplaneFrame::axis_aligned(dim)?,
    };
    Ok(frame)
}

/// Start point in `R^d`, the origin by default.
pub fn start_point(p: &ParamMap, dim: usize) -> Result<Vec<f64>, CliError> {
    let start = p.list_or("start", &vec![0.0; dim])?;
    if start.len() != dim {
        return Err(CliError::config(format!(
            "start has {} components, dim is {dim}",
            start.len()
        )));
    }
    Ok(start)
}

/// Registry profile with parameter overrides.
pub fn profile(p: &ParamMap, default: &str) -> Result<Profile, CliError> {
    let name = p.raw("profile").unwrap_or(default);
    let base = Profile::by_name(name)?;
    Ok(match base {
        Profile::Zero => Profile::Zero,
        Profile::Constant { alpha, kappa } => Profile::Constant {
            alpha: p.get_or("alpha", alpha)?,
            kappa: p.get_or("kappa", kappa)?,
        },
        Profile::Sinusoidal { amp, freq } => Profile::Sinusoidal {
            amp: p.get_or("amp", amp)?,
            freq: p.get_or("freq", freq)?,
        },
        Profile::Mixed { amp, freq, kappa } => Profile::Mixed {
            amp: p.get_or("amp", amp)?,
            freq: p.get_or("freq", freq)?,
            kappa: p.get_or("kappa", kappa)?,
        },
    })
}

pub fn coefficients(
    p: &ParamMap,
    frame: &HyperplaneFrame,
    default_profile: &str,
    default_q: f64,
) -> Result<(Profile, GdiffCoefficients), CliError> {
    let prof = profile(p, default_profile)?;
    let q = p.get_or("q", default_q)?;
    let c = GdiffCoefficients::from_profile(prof, frame.tangent_dim(), q)?;
    Ok((prof, c))
}
