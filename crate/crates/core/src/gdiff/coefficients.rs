use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::RandomStream;

/// Tangential coefficients on `S`, in basis coordinates of dimension `m`.
pub trait CoefficientField: Send + Sync {
    /// Writes `alpha(s)` into `out` (length `m`).
    fn alpha(&self, s: &[f64], out: &mut [f64]);
    /// Writes `beta~(s)` row-major into `out` (length `m * m`).
    fn beta_tilde(&self, s: &[f64], out: &mut [f64]);
}

/// Named coefficient profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    /// `alpha_i = alpha`, `beta~ = kappa I`.
    Constant {
        alpha: f64,
        kappa: f64,
    },
    /// `alpha_i = amp sin(freq s_i)`, `beta~ = 0`.
    Sinusoidal {
        amp: f64,
        freq: f64,
    },
    /// `alpha_i = amp sin(freq s_i)` with
    /// `beta~_ii = kappa (1 + sin(freq s_i) / 2)` and constant off-diagonal
    /// coupling `kappa / (4 (m - 1))`.
    Mixed {
        amp: f64,
        freq: f64,
        kappa: f64,
    },
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Zero => "zero",
            Profile::Constant { .. } => "constant",
            Profile::Sinusoidal { .. } => "sinusoidal",
            Profile::Mixed { .. } => "mixed",
        }
    }

    /// Profile by registry name with default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "zero" => Profile::Zero,
            "constant" => Profile::Constant {
                alpha: 0.0,
                kappa: 1.0,
            },
            "sinusoidal" => Profile::Sinusoidal { amp: 0.5, freq: 1.0 },
            "mixed" => Profile::Mixed {
                amp: 0.5,
                freq: 1.0,
                kappa: 0.5,
            },
            other => {
                return invalid(format!(
                    "unknown coefficient profile '{other}' (expected zero, constant, sinusoidal or mixed)"
                ))
            }
        })
    }

    /// Constant `K` satisfying both coefficient conditions in dimension `m`.
    pub fn analytic_bound(&self, m: usize) -> f64 {
        let mf = m as f64;
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { alpha, kappa } => alpha.abs() * mf.sqrt() + kappa.abs(),
            Profile::Sinusoidal { amp, freq } => {
                let sup = amp.abs() * mf.sqrt();
                sup.max(amp * amp * freq * freq)
            }
            Profile::Mixed { amp, freq, kappa } => {
                // Gershgorin: the spectrum sits in kappa [1/4, 7/4].
                let sup = amp.abs() * mf.sqrt() + 1.75 * kappa.abs();
                let lip = (amp * amp + 0.25 * kappa * kappa) * freq * freq;
                sup.max(lip)
            }
        }
    }
}

impl CoefficientField for Profile {
    fn alpha(&self, s: &[f64], out: &mut [f64]) {
        match *self {
            Profile::Zero => out.fill(0.0),
            Profile::Constant { alpha, .. } => out.fill(alpha),
            Profile::Sinusoidal { amp, freq } | Profile::Mixed { amp, freq, .. } => {
                for (o, si) in out.iter_mut().zip(s) {
                    *o = amp * (freq * si).sin();
                }
            }
        }
    }

    fn beta_tilde(&self, s: &[f64], out: &mut [f64]) {
        let m = s.len();
        out.fill(0.0);
        match *self {
            Profile::Zero | Profile::Sinusoidal { .. } => {}
            Profile::Constant { kappa, .. } => {
                for i in 0..m {
                    out[i * m + i] = kappa;
                }
            }
            Profile::Mixed { freq, kappa, .. } => {
                let off = if m > 1 { 0.25 * kappa / (m - 1) as f64 } else { 0.0 };
                for i in 0..m {
                    for j in 0..m {
                        out[i * m + j] = if i == j {
                            kappa * (1.0 + 0.5 * (freq * s[i]).sin())
                        } else {
                            off
                        };
                    }
                }
            }
        }
    }
}

/// Coefficients `(alpha, beta~)`, skew parameter `q` and constant `K`.
#[derive(Clone)]
pub struct GdiffCoefficients {
    field: Arc<dyn CoefficientField>,
    label: String,
    pub tangent_dim: usize,
    pub q: f64,
    pub bound: f64,
}

impl fmt::Debug for GdiffCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GdiffCoefficients")
            .field("label", &self.label)
            .field("tangent_dim", &self.tangent_dim)
            .field("q", &self.q)
            .field("bound", &self.bound)
            .finish()
    }
}

fn check_common(tangent_dim: usize, q: f64, bound: f64) -> Result<()> {
    if tangent_dim == 0 {
        return invalid("tangential dimension must be at least 1");
    }
    if !(q.abs() <= 1.0) {
        return invalid(format!("skew parameter must lie in [-1, 1], got {q}"));
    }
    if !(bound >= 0.0 && bound.is_finite()) {
        return invalid(format!(
            "coefficient bound K must be finite and >= 0, got {bound}"
        ));
    }
    Ok(())
}

impl GdiffCoefficients {
    /// Registry profile with `K` from [`Profile::analytic_bound`].
    pub fn from_profile(profile: Profile, tangent_dim: usize, q: f64) -> Result<Self> {
        let bound = profile.analytic_bound(tangent_dim);
        Self::with_bound(profile, tangent_dim, q, bound)
    }

    pub fn with_bound(profile: Profile, tangent_dim: usize, q: f64, bound: f64) -> Result<Self> {
        check_common(tangent_dim, q, bound)?;
        Ok(Self {
            field: Arc::new(profile),
            label: profile.name().to_string(),
            tangent_dim,
            q,
            bound,
        })
    }

    /// User-supplied coefficient field.
    pub fn custom(
        field: Arc<dyn CoefficientField>,
        label: &str,
        tangent_dim: usize,
        q: f64,
        bound: f64,
    ) -> Result<Self> {
        check_common(tangent_dim, q, bound)?;
        Ok(Self {
            field,
            label: label.to_string(),
            tangent_dim,
            q,
            bound,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alpha(&self, s: &[f64], out: &mut [f64]) {
        self.field.alpha(s, out)
    }

    pub fn beta_tilde(&self, s: &[f64], out: &mut [f64]) {
        self.field.beta_tilde(s, out)
    }
}

/// Result of checking both coefficient conditions on a probe set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientReport {
    /// `max_s (|alpha(s)| + ||beta~(s)||)`.
    pub sup_functional: f64,
    /// `max (|d alpha|^2 + ||d beta~||^2) / |d s|^2` over probe pairs.
    pub max_lipschitz_quotient: f64,
    pub bound: f64,
    pub probes: usize,
    pub pairs: usize,
    pub pass: bool,
}

/// Upper limit on pairs visited by the Lipschitz scan.
pub const MAX_PROBE_PAIRS: usize = 1_000_000;

const SYMMETRY_TOL: f64 = 1e-12;

fn spectral_norm_sym(m: usize, a: &[f64]) -> f64 {
    if m == 1 {
        return a[0].abs();
    }
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(m, m, a));
    eig.eigenvalues.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn check_beta(m: usize, b: &[f64], s: &[f64]) -> Result<f64> {
    let scale = b.iter().fold(1.0, |acc: f64, v| acc.max(v.abs()));
    for i in 0..m {
        for j in 0..i {
            if (b[i * m + j] - b[j * m + i]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidCoefficient(format!(
                    "beta~ is not symmetric at {s:?}: entries ({i},{j}) and ({j},{i}) differ"
                )));
            }
        }
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidCoefficient(format!("beta~ is not finite at {s:?}")));
    }
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(m, m, b));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -SYMMETRY_TOL * scale {
        return Err(Error::InvalidCoefficient(format!(
            "beta~ is indefinite at {s:?}: smallest eigenvalue {min}"
        )));
    }
    Ok(eig.eigenvalues.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())))
}

/// Checks symmetry and nonnegativity of `beta~`, then evaluates the sup and
/// Lipschitz functionals over the probe set. `beta~` uses the spectral norm.
pub fn validate_coefficients(c: &GdiffCoefficients, probes: &[Vec<f64>]) -> Result<CoefficientReport> {
    if probes.is_empty() {
        return invalid("coefficient validation needs at least one probe point");
    }
    let m = c.tangent_dim;
    if let Some(p) = probes.iter().find(|p| p.len() != m) {
        return invalid(format!("probe {p:?} does not have dimension {m}"));
    }
    let mut alphas = Vec::with_capacity(probes.len());
    let mut betas = Vec::with_capacity(probes.len());
    let mut sup: f64 = 0.0;
    for s in probes {
        let mut a = vec![0.0; m];
        let mut b = vec![0.0; m * m];
        c.alpha(s, &mut a);
        c.beta_tilde(s, &mut b);
        let bn = check_beta(m, &b, s)?;
        let an = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        sup = sup.max(an + bn);
        alphas.push(a);
        betas.push(b);
    }
    let mut quotient: f64 = 0.0;
    let mut pairs = 0usize;
    let mut diff = vec![0.0; m * m];
    'scan: for i in 0..probes.len() {
        for j in (i + 1)..probes.len() {
            if pairs == MAX_PROBE_PAIRS {
                break 'scan;
            }
            pairs += 1;
            let ds: f64 = probes[i]
                .iter()
                .zip(&probes[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            if ds == 0.0 {
                continue;
            }
            let da: f64 = alphas[i]
                .iter()
                .zip(&alphas[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            diff.iter_mut()
                .zip(betas[i].iter().zip(&betas[j]))
                .for_each(|(d, (a, b))| *d = a - b);
            let db = spectral_norm_sym(m, &diff);
            quotient = quotient.max((da + db * db) / ds);
        }
    }
    Ok(CoefficientReport {
        sup_functional: sup,
        max_lipschitz_quotient: quotient,
        bound: c.bound,
        probes: probes.len(),
        pairs,
        pass: sup <= c.bound && quotient <= c.bound,
    })
}

/// `count` probe points in `[-radius, radius]^m`: half from an additive
/// Kronecker lattice, half uniform from `stream`.
pub fn generate_probes(m: usize, count: usize, radius: f64, stream: &mut RandomStream) -> Vec<Vec<f64>> {
    // Generalized golden ratio: the root of x^(m+1) = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (m as f64 + 1.0));
    }
    let steps: Vec<f64> = (1..=m).map(|j| phi.powi(-(j as i32)).fract()).collect();
    let lattice = count / 2;
    let mut out = Vec::with_capacity(count);
    for k in 0..lattice {
        out.push(
            steps
                .iter()
                .map(|g| radius * (2.0 * (0.5 + (k as f64 + 1.0) * g).fract() - 1.0))
                .collect(),
        );
    }
    for _ in lattice..count {
        out.push((0..m).map(|_| radius * (2.0 * stream.uniform() - 1.0)).collect());
    }
    out
}
