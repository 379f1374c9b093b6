use std::f64::consts::PI;

use serde::Serialize;

use super::{inverse_local_time, simulate_gdiff, GdiffCoefficients, HyperplaneFrame, Profile};
use crate::coupling::{BoundCheck, TargetCheck};
use crate::error::{invalid, Result};
use crate::mc::Ensemble;
use crate::rng::StreamRole;
use crate::sbm::{expected_local_time, local_time_cdf, simulate_sbm, LocalTimeLaw, SbmParams};
use crate::stats::{
    mc_summary, monotone_trend, proportion_summary, McSummary, TrendPoint, TrendVerdict, SCHEME_ALLOWANCE,
};

/// Shared-noise estimate of `P{|x_n(T) - x(T)| > eps}` for one offset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffsetEstimate {
    pub offset: Vec<f64>,
    pub offset_norm: f64,
    pub hits: usize,
    pub summary: McSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub epsilon: f64,
    pub estimates: Vec<OffsetEstimate>,
    /// Trend over the offsets in input order, when there are at least three.
    pub trend: Option<TrendVerdict>,
}

/// Runs the process from `x` and from each `x + offset` on identical
/// `(w, w~)` noise and counts terminal separations larger than `eps`.
pub fn continuity_experiment(
    c: &GdiffCoefficients,
    frame: &HyperplaneFrame,
    x: &[f64],
    offsets: &[Vec<f64>],
    eps: f64,
    ens: &Ensemble,
    mollifier_n: u32,
) -> Result<ContinuityReport> {
    if !(eps > 0.0) {
        return invalid(format!("separation threshold must be > 0, got {eps}"));
    }
    let d = frame.dim();
    if x.len() != d || offsets.iter().any(|o| o.len() != d) {
        return invalid(format!("start point and offsets must have dimension {d}"));
    }
    let per_path = ens.map(|i| {
        let w = ens.wiener(i, d)?;
        let wt = ens.stream(i, StreamRole::TimeChanged);
        let base = simulate_gdiff(c, x, frame, &w, &mut wt.clone(), mollifier_n)?;
        let end = base.terminal();
        offsets
            .iter()
            .map(|o| {
                let start: Vec<f64> = x.iter().zip(o).map(|(a, b)| a + b).collect();
                let moved = simulate_gdiff(c, &start, frame, &w, &mut wt.clone(), mollifier_n)?;
                let gap: f64 = moved
                    .terminal()
                    .iter()
                    .zip(end)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Ok(gap > eps)
            })
            .collect::<Result<Vec<bool>>>()
    })?;
    let mut estimates = Vec::with_capacity(offsets.len());
    for (j, o) in offsets.iter().enumerate() {
        let hits = per_path.iter().filter(|row| row[j]).count();
        estimates.push(OffsetEstimate {
            offset: o.clone(),
            offset_norm: o.iter().map(|v| v * v).sum::<f64>().sqrt(),
            hits,
            summary: proportion_summary(hits, ens.paths)?,
        });
    }
    let trend = if estimates.len() >= 3 {
        let points: Vec<TrendPoint> = estimates
            .iter()
            .map(|e| TrendPoint {
                value: e.summary.mean,
                half_width: e.summary.half_width,
            })
            .collect();
        Some(monotone_trend(&points)?)
    } else {
        None
    };
    Ok(ContinuityReport {
        epsilon: eps,
        estimates,
        trend,
    })
}

/// `2 (|x^nu| + T) / sqrt(2 pi N)`.
pub fn rho_tail_bound(x_nu: f64, big_t: f64, n_level: f64) -> f64 {
    2.0 * (x_nu.abs() + big_t) / (2.0 * PI * n_level).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoTailReport {
    pub level: f64,
    pub n_level: f64,
    /// Frequency of `rho_level >= N` against the analytic bound.
    pub check: BoundCheck,
    /// `P{eta_N < level}` from the exact law.
    pub exact: f64,
}

/// Tail frequency of `rho_level` past `N` over an ensemble of normal
/// coordinates started at `x_nu`. The ensemble horizon must reach `N`.
pub fn rho_tail_check(
    q: f64,
    x_nu: f64,
    level: f64,
    big_t: f64,
    n_level: f64,
    ens: &Ensemble,
    mollifier_n: u32,
) -> Result<RhoTailReport> {
    if !(n_level > 0.0) {
        return invalid(format!("tail level N must be > 0, got {n_level}"));
    }
    if !(level >= 0.0 && level <= big_t) {
        return invalid(format!(
            "local-time level must lie in [0, T], got {level} with T = {big_t}"
        ));
    }
    let horizon = ens.grid.horizon();
    if horizon < n_level * (1.0 - 1e-12) {
        return invalid(format!("ensemble horizon {horizon} does not reach N = {n_level}"));
    }
    let params = SbmParams::new(q, x_nu, mollifier_n)?;
    let tail = ens.map(|i| {
        let path = simulate_sbm(&params, &ens.wiener(i, 1)?)?;
        Ok(match inverse_local_time(&path, level)? {
            Some(rho) => rho >= n_level * (1.0 - 1e-12),
            None => true,
        })
    })?;
    let hits = tail.iter().filter(|&&b| b).count();
    let summary = proportion_summary(hits, ens.paths)?;
    let exact = local_time_cdf(&LocalTimeLaw::new(x_nu, n_level)?, level);
    Ok(RhoTailReport {
        level,
        n_level,
        check: BoundCheck::new(summary, rho_tail_bound(x_nu, big_t, n_level)),
        exact,
    })
}

/// `a sqrt 2 / sqrt(pi t)`.
pub fn small_local_time_bound(t: f64, a: f64) -> f64 {
    a * 2f64.sqrt() / (PI * t).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallLocalTimeReport {
    pub t: f64,
    pub a: f64,
    /// `P{eta_t < a}` for a start on the interface.
    pub exact: f64,
    pub bound: f64,
    pub exact_pass: bool,
    /// Simulated frequency of `eta_t < a`.
    pub mc: Option<McSummary>,
    /// `frequency - 3 SE <= bound (1 + allowance)`.
    pub mc_pass: Option<bool>,
    pub pass: bool,
}

/// Exact small-local-time probability against its bound, with an optional
/// Monte Carlo frequency from `(ensemble, q, n)` whose horizon is `t`.
pub fn small_local_time_check(
    x_nu: f64,
    t: f64,
    a: f64,
    mc: Option<(&Ensemble, f64, u32)>,
) -> Result<SmallLocalTimeReport> {
    if x_nu != 0.0 {
        return invalid(format!(
            "start point must lie on the interface, got x . nu = {x_nu}"
        ));
    }
    if !(a > 0.0) {
        return invalid(format!("local-time level must be > 0, got {a}"));
    }
    let law = LocalTimeLaw::new(0.0, t)?;
    let exact = local_time_cdf(&law, a);
    let bound = small_local_time_bound(t, a);
    let exact_pass = exact <= bound * (1.0 + 1e-12);
    let (summary, mc_pass) = match mc {
        None => (None, None),
        Some((ens, q, n)) => {
            if (ens.grid.horizon() - t).abs() > 1e-9 * t {
                return invalid(format!(
                    "ensemble horizon {} differs from t = {t}",
                    ens.grid.horizon()
                ));
            }
            let params = SbmParams::new(q, 0.0, n)?;
            let below = ens.map(|i| Ok(simulate_sbm(&params, &ens.wiener(i, 1)?)?.terminal_eta() < a))?;
            let hits = below.iter().filter(|&&b| b).count();
            let s = proportion_summary(hits, ens.paths)?;
            (Some(s), Some(s.lower() <= bound * (1.0 + SCHEME_ALLOWANCE)))
        }
    };
    Ok(SmallLocalTimeReport {
        t,
        a,
        exact,
        bound,
        exact_pass,
        mc: summary,
        mc_pass,
        pass: exact_pass && mc_pass.unwrap_or(true),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentialMomentReport {
    pub kappa: f64,
    /// One check per tangential coordinate.
    pub coordinates: Vec<TargetCheck>,
    pub pass: bool,
}

/// With `alpha = 0` and `beta~ = kappa I`, each tangential coordinate has
/// second moment `T + kappa^2 I_T(x . nu)` about its start.
pub fn tangential_moment_experiment(
    kappa: f64,
    q: f64,
    frame: &HyperplaneFrame,
    x0: &[f64],
    ens: &Ensemble,
    mollifier_n: u32,
) -> Result<TangentialMomentReport> {
    let m = frame.tangent_dim();
    let c = GdiffCoefficients::from_profile(Profile::Constant { alpha: 0.0, kappa }, m, q)?;
    let start = frame.tangential(x0);
    let displacements = ens.map(|i| {
        let w = ens.wiener(i, frame.dim())?;
        let mut wt = ens.stream(i, StreamRole::TimeChanged);
        let p = simulate_gdiff(&c, x0, frame, &w, &mut wt, mollifier_n)?;
        let end = p.tangential_at(p.grid.steps());
        Ok(end
            .iter()
            .zip(&start)
            .map(|(a, b)| (a - b).powi(2))
            .collect::<Vec<f64>>())
    })?;
    let big_t = ens.grid.horizon();
    let target = big_t + kappa * kappa * expected_local_time(frame.normal(x0), big_t)?;
    let mut coordinates = Vec::with_capacity(m);
    for i in 0..m {
        let col: Vec<f64> = displacements.iter().map(|row| row[i]).collect();
        let summary = mc_summary(&col)?;
        coordinates.push(TargetCheck {
            summary,
            target,
            allowance: SCHEME_ALLOWANCE,
            pass: summary.agrees_with(target, SCHEME_ALLOWANCE),
        });
    }
    let pass = coordinates.iter().all(|c| c.pass);
    Ok(TangentialMomentReport {
        kappa,
        coordinates,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_bounds() {
        assert!((rho_tail_bound(0.0, 1.0, 4.0) - 0.398942280401433).abs() < 1e-12);
        assert!((small_local_time_bound(1.0, 0.5) - 0.398942280401433).abs() < 1e-12);
        let r = small_local_time_check(0.0, 1.0, 0.5, None).unwrap();
        assert!((r.exact - 0.382924922548026).abs() < 1e-12);
        assert!(r.exact_pass && r.pass);
        let big = small_local_time_check(0.0, 1.0, 5.0, None).unwrap();
        assert!(big.bound > 1.0 && big.pass);
        let tiny = small_local_time_check(0.0, 1.0, 1e-9, None).unwrap();
        assert!(tiny.exact < 1e-8 && tiny.bound < 1e-8);
        assert!(small_local_time_check(0.1, 1.0, 0.5, None).is_err());
    }

    #[test]
    fn zero_level_never_exceeds() {
        let ens = Ensemble::with_step(1.0, 1e-2, 50, 5).unwrap();
        let r = rho_tail_check(0.5, 0.0, 0.0, 1.0, 1.0, &ens, 256).unwrap();
        assert_eq!(r.check.summary.mean, 0.0);
        assert!(r.check.pass);
        assert!(rho_tail_check(0.5, 0.0, 0.5, 1.0, 2.0, &ens, 256).is_err());
        assert!(rho_tail_check(0.5, 0.0, 0.5, 1.0, 0.0, &ens, 256).is_err());
    }

    #[test]
    fn zero_offset_control_and_tangential_translation() {
        let frame = HyperplaneFrame::axis_aligned(3).unwrap();
        let c = GdiffCoefficients::from_profile(Profile::Zero, 2, 0.5).unwrap();
        let ens = Ensemble::with_step(1.0, 1e-3, 40, 9).unwrap();
        let offsets = vec![vec![0.0; 3], vec![0.0, 0.3, 0.0], vec![0.0, 0.1, 0.1]];
        let r = continuity_experiment(&c, &frame, &[0.0; 3], &offsets, 0.25, &ens, 256).unwrap();
        assert_eq!(r.estimates[0].hits, 0);
        assert_eq!(r.estimates[1].hits, 40);
        assert_eq!(r.estimates[2].hits, 0);
        assert!(continuity_experiment(&c, &frame, &[0.0; 3], &offsets, 0.0, &ens, 256).is_err());
    }
}
