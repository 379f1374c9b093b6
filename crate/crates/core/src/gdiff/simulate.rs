use super::{GdiffCoefficients, HyperplaneFrame};
use crate::error::{invalid, Result};
use crate::grid::{TimeGrid, WienerPath};
use crate::rng::RandomStream;
use crate::sbm::{simulate_sbm, SbmParams, SbmPath};

/// Simulated path of the interface diffusion with its decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct GdiffPath {
    pub grid: TimeGrid,
    pub dim: usize,
    pub x0: Vec<f64>,
    /// Node-major `d`-vectors.
    pub x: Vec<f64>,
    pub eta: Vec<f64>,
    /// Normal coordinate `x . nu` and its driver `w . nu`.
    pub normal: SbmPath,
    /// Node-major tangential basis coordinates of `pi_S x`.
    pub tangential: Vec<f64>,
    /// Node-major tangential coordinates of `pi_S w`.
    pub w_tangential: Vec<f64>,
    /// Node-major running sums of `beta~ xi` (tangential coordinates).
    pub noise: Vec<f64>,
}

impl GdiffPath {
    pub fn tangent_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn x_at(&self, k: usize) -> &[f64] {
        &self.x[k * self.dim..(k + 1) * self.dim]
    }

    pub fn tangential_at(&self, k: usize) -> &[f64] {
        let m = self.tangent_dim();
        &self.tangential[k * m..(k + 1) * m]
    }

    pub fn noise_at(&self, k: usize) -> &[f64] {
        let m = self.tangent_dim();
        &self.noise[k * m..(k + 1) * m]
    }

    pub fn w_tangential_at(&self, k: usize) -> &[f64] {
        let m = self.tangent_dim();
        &self.w_tangential[k * m..(k + 1) * m]
    }

    pub fn terminal(&self) -> &[f64] {
        self.x_at(self.grid.steps())
    }
}

/// Lattice spacing, in local-time units, of the level-indexed `w~`.
pub const LEVEL_STEP: f64 = 1e-3;

/// Brownian motion `w~(u)` indexed by local-time level. Lattice values come
/// from the primary stream in lattice order; points inside a cell are
/// filled by Brownian-bridge draws from the companion stream. Queries must
/// be nondecreasing. Two processes reading one stream therefore see the same
/// `w~` at every lattice level, whatever their local-time paths.
struct LevelBrownian {
    m: usize,
    lattice: Vec<f64>,
    stream: RandomStream,
    bridge: RandomStream,
    last_level: f64,
    last: Vec<f64>,
    scratch: Vec<f64>,
}

impl LevelBrownian {
    fn new(m: usize, stream: &RandomStream) -> Self {
        Self {
            m,
            lattice: vec![0.0; m],
            stream: stream.clone(),
            bridge: stream.companion(),
            last_level: 0.0,
            last: vec![0.0; m],
            scratch: vec![0.0; m],
        }
    }

    fn ensure(&mut self, points: usize) {
        let sd = LEVEL_STEP.sqrt();
        while self.lattice.len() < points * self.m {
            let base = self.lattice.len() - self.m;
            self.stream.fill_normal(&mut self.scratch);
            for i in 0..self.m {
                let v = self.lattice[base + i] + sd * self.scratch[i];
                self.lattice.push(v);
            }
        }
    }

    /// Moves to `level` and writes `w~(level) - w~(previous level)` to `out`.
    fn advance(&mut self, level: f64, out: &mut [f64]) {
        if level <= self.last_level {
            out.fill(0.0);
            return;
        }
        let m = self.m;
        let j = (level / LEVEL_STEP).floor() as usize;
        self.ensure(j + 2);
        let (ua, ub) = (j as f64 * LEVEL_STEP, (j + 1) as f64 * LEVEL_STEP);
        let right = &self.lattice[(j + 1) * m..(j + 2) * m];
        let (a, left): (f64, &[f64]) = if self.last_level >= ua {
            (self.last_level, &self.last)
        } else {
            (ua, &self.lattice[j * m..(j + 1) * m])
        };
        let span = ub - a;
        let lam = (level - a) / span;
        let var = (level - a) * (ub - level) / span;
        if var > 0.0 {
            self.bridge.fill_normal(&mut self.scratch);
        } else {
            self.scratch.fill(0.0);
        }
        let sd = var.max(0.0).sqrt();
        for i in 0..m {
            let v = left[i] + lam * (right[i] - left[i]) + sd * self.scratch[i];
            out[i] = v - self.last[i];
            self.scratch[i] = v;
        }
        std::mem::swap(&mut self.last, &mut self.scratch);
        self.last_level = level;
    }
}

/// Splitting scheme: the normal coordinate runs the skew Brownian motion
/// scheme on `w . nu`; the tangential part then moves by
/// `alpha d eta + beta~ d w~(eta) + pi_S dw`. Given `eta` the increment
/// `d w~(eta)` is `N(0, d eta I)`; it is read from a level-indexed Brownian
/// path built on `wt_stream`, so starts sharing the stream share `w~`.
pub fn simulate_gdiff(
    c: &GdiffCoefficients,
    x0: &[f64],
    frame: &HyperplaneFrame,
    w: &WienerPath,
    wt_stream: &mut RandomStream,
    mollifier_n: u32,
) -> Result<GdiffPath> {
    let d = frame.dim();
    let m = frame.tangent_dim();
    if x0.len() != d || w.dims() != d {
        return invalid(format!(
            "start point ({}) and driver ({}) must match the frame dimension {d}",
            x0.len(),
            w.dims()
        ));
    }
    if c.tangent_dim != m {
        return invalid(format!(
            "coefficients act on dimension {}, hyperplane has dimension {m}",
            c.tangent_dim
        ));
    }
    let params = SbmParams::new(c.q, frame.normal(x0), mollifier_n)?;
    let normal = simulate_sbm(&params, &w.project(frame.nu()))?;
    let grid = *w.grid();
    let nodes = grid.len();

    let mut w_tangential = Vec::with_capacity(nodes * m);
    for k in 0..nodes {
        w_tangential.extend(frame.tangential(w.value(k)));
    }

    let mut level_noise = LevelBrownian::new(m, wt_stream);
    let mut tangential = Vec::with_capacity(nodes * m);
    let mut noise = vec![0.0; nodes * m];
    tangential.extend(frame.tangential(x0));
    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; m * m];
    let mut dwt = vec![0.0; m];
    for k in 0..grid.steps() {
        let d_eta = normal.eta[k + 1] - normal.eta[k];
        level_noise.advance(normal.eta[k + 1], &mut dwt);
        let s = tangential[k * m..(k + 1) * m].to_vec();
        c.alpha(&s, &mut alpha);
        c.beta_tilde(&s, &mut beta);
        for i in 0..m {
            let bdw: f64 = (0..m).map(|j| beta[i * m + j] * dwt[j]).sum();
            noise[(k + 1) * m + i] = noise[k * m + i] + bdw;
            let dw = w_tangential[(k + 1) * m + i] - w_tangential[k * m + i];
            tangential.push(s[i] + alpha[i] * d_eta + bdw + dw);
        }
    }
    *wt_stream = level_noise.stream;

    let mut x = Vec::with_capacity(nodes * d);
    x.extend_from_slice(x0);
    for k in 1..nodes {
        x.extend(frame.assemble(normal.x[k], &tangential[k * m..(k + 1) * m]));
    }
    Ok(GdiffPath {
        grid,
        dim: d,
        x0: x0.to_vec(),
        x,
        eta: normal.eta.clone(),
        normal,
        tangential,
        w_tangential,
        noise,
    })
}
