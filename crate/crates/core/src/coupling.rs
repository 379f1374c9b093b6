//! Pairs of skew Brownian motions driven by one Wiener path, and the
//! comparison and distance experiments built on them.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::WienerPath;
use crate::mc::Ensemble;
use crate::sbm::{
    expected_local_time, simulate_reflected, simulate_sbm, skew_to_mass, tanaka_local_time, MollifiedDrift,
    SbmParams, SbmPath,
};
use crate::stats::{mc_summary, proportion_summary, McSummary, SCHEME_ALLOWANCE};

/// Bumps `a1` of mass `artanh q1` and `a2 = a1 + (A2 - A1) * shape`, where
/// `shape` is the unit-mass bump, so `a2_n >= a1_n` pointwise for every scale.
pub fn make_comparable_drifts(q1: f64, q2: f64, n: u32) -> Result<(MollifiedDrift, MollifiedDrift)> {
    if q1 > q2 {
        return invalid(format!("comparable drifts need q1 <= q2, got {q1} > {q2}"));
    }
    let a1 = skew_to_mass(q1)?;
    let a2 = skew_to_mass(q2)?;
    let first = MollifiedDrift::new(a1, n);
    // Bumps of one shape add by mass.
    let second = MollifiedDrift::new(a1 + (a2 - a1), n);
    Ok((first, second))
}

/// Pointwise increment `a2(x) - a1(x) = (A2 - A1) shape(x)`.
pub fn drift_gap(d1: &MollifiedDrift, d2: &MollifiedDrift, x: f64) -> f64 {
    (d2.mass() - d1.mass()) * MollifiedDrift::shape(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    pub params1: SbmParams,
    pub params2: SbmParams,
    pub path1: SbmPath,
    pub path2: SbmPath,
}

/// Simulates both processes on the same driver increments.
pub fn simulate_coupled_pair(p1: &SbmParams, p2: &SbmParams, w: &WienerPath) -> Result<CoupledPair> {
    match (p1.is_reflected(), p2.is_reflected()) {
        (true, true) if p1.q != p2.q => {
            return invalid("reflected pair needs the same phase space (equal q)")
        }
        (true, false) | (false, true) => {
            return invalid("coupling a reflected and a skew process is not supported")
        }
        _ => {}
    }
    Ok(CoupledPair {
        params1: *p1,
        params2: *p2,
        path1: simulate_sbm(p1, w)?,
        path2: simulate_sbm(p2, w)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingReport {
    /// Largest `(x1 - x2)^+` over nodes and paths.
    pub max_violation: f64,
    /// Fraction of paths whose violation exceeds `tolerance`.
    pub violating_fraction: f64,
    pub median_violation: f64,
    pub tolerance: f64,
    pub paths: usize,
}

fn path_violation(pair: &CoupledPair) -> f64 {
    pair.path1
        .x
        .iter()
        .zip(&pair.path2.x)
        .map(|(a, b)| (a - b).max(0.0))
        .fold(0.0, f64::max)
}

/// Ordering check `x1 <= x2` along a single coupled pair.
pub fn check_ordering(pair: &CoupledPair, tolerance: f64) -> OrderingReport {
    let v = path_violation(pair);
    OrderingReport {
        max_violation: v,
        violating_fraction: if v > tolerance { 1.0 } else { 0.0 },
        median_violation: v,
        tolerance,
        paths: 1,
    }
}

fn check_comparison_order(p1: &SbmParams, p2: &SbmParams) -> Result<()> {
    if p1.x0 > p2.x0 || p1.q > p2.q {
        return invalid(format!(
            "ordering needs x01 <= x02 and q1 <= q2, got ({}, {}) and ({}, {})",
            p1.x0, p2.x0, p1.q, p2.q
        ));
    }
    Ok(())
}

/// Default multiplier `c` of the `c sqrt(dt)` violation tolerance.
pub const ORDERING_TOL_FACTOR: f64 = 5.0;

/// Ordering over an ensemble of coupled pairs.
pub fn ordering_experiment(
    p1: &SbmParams,
    p2: &SbmParams,
    ens: &Ensemble,
    tolerance: f64,
) -> Result<OrderingReport> {
    check_comparison_order(p1, p2)?;
    let mut per_path = ens.map(|i| {
        let w = ens.wiener(i, 1)?;
        Ok(path_violation(&simulate_coupled_pair(p1, p2, &w)?))
    })?;
    let exceed = per_path.iter().filter(|&&v| v > tolerance).count();
    let max_violation = per_path.iter().copied().fold(0.0, f64::max);
    per_path.sort_by(f64::total_cmp);
    let m = per_path.len();
    let median_violation = if m % 2 == 1 {
        per_path[m / 2]
    } else {
        0.5 * (per_path[m / 2 - 1] + per_path[m / 2])
    };
    Ok(OrderingReport {
        max_violation,
        violating_fraction: exceed as f64 / m as f64,
        median_violation,
        tolerance,
        paths: m,
    })
}

/// Monte Carlo estimate compared with an analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetCheck {
    pub summary: McSummary,
    pub target: f64,
    pub allowance: f64,
    pub pass: bool,
}

/// Monte Carlo estimate compared with an analytic upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub summary: McSummary,
    pub bound: f64,
    /// `estimate - 3 SE <= bound`.
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(summary: McSummary, bound: f64) -> Self {
        // Relative slack for rounding when the bound is attained exactly.
        let pass = summary.lower() <= bound + 1e-12 * bound.abs();
        Self { summary, bound, pass }
    }
}

/// `E|x1(t) - x2(t)|` for a common start `x` against `|q1 - q2| I_t(x)`.
pub fn corollary1_experiment(x: f64, q1: f64, q2: f64, ens: &Ensemble, n: u32) -> Result<TargetCheck> {
    let p1 = SbmParams::new(q1, x, n)?;
    let p2 = SbmParams::new(q2, x, n)?;
    if p1.is_reflected() || p2.is_reflected() {
        return Err(Error::Domain("equal-start distance needs |q1|, |q2| < 1".into()));
    }
    let dist = ens.map(|i| {
        let w = ens.wiener(i, 1)?;
        let pair = simulate_coupled_pair(&p1, &p2, &w)?;
        Ok((pair.path1.terminal_x() - pair.path2.terminal_x()).abs())
    })?;
    let summary = mc_summary(&dist)?;
    let target = (q1 - q2).abs() * expected_local_time(x, ens.grid.horizon())?;
    Ok(TargetCheck {
        summary,
        target,
        allowance: SCHEME_ALLOWANCE,
        pass: summary.agrees_with(target, SCHEME_ALLOWANCE),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corollary2Report {
    /// `E|x1 - x2| <= |x01 - x02| + |q| |I(x01) - I(x02)|`.
    pub x_distance: BoundCheck,
    /// `E|eta1 - eta2| <= |x01 - x02| / |q| + |I(x01) - I(x02)|`.
    pub eta_distance: BoundCheck,
    pub pass: bool,
}

/// Both distance inequalities for a common skew `q` and two starts.
pub fn corollary2_experiment(x01: f64, x02: f64, q: f64, ens: &Ensemble, n: u32) -> Result<Corollary2Report> {
    if q == 0.0 || !(q.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "start-distance bounds need q in (-1, 0) U (0, 1), got {q}"
        )));
    }
    let p1 = SbmParams::new(q, x01, n)?;
    let p2 = SbmParams::new(q, x02, n)?;
    let pairs = ens.map(|i| {
        let w = ens.wiener(i, 1)?;
        let pair = simulate_coupled_pair(&p1, &p2, &w)?;
        let wt = *pair.path1.w.last().expect("nonempty");
        let x1 = pair.path1.terminal_x();
        let x2 = pair.path2.terminal_x();
        // eta = (x - x0 - w) / q
        let e1 = (x1 - x01 - wt) / q;
        let e2 = (x2 - x02 - wt) / q;
        Ok(((x1 - x2).abs(), (e1 - e2).abs()))
    })?;
    let (dx, de): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let t = ens.grid.horizon();
    let di = (expected_local_time(x01, t)? - expected_local_time(x02, t)?).abs();
    let d0 = (x01 - x02).abs();
    let x_distance = BoundCheck::new(mc_summary(&dx)?, d0 + q.abs() * di);
    let eta_distance = BoundCheck::new(mc_summary(&de)?, d0 / q.abs() + di);
    Ok(Corollary2Report {
        x_distance,
        eta_distance,
        pass: x_distance.pass && eta_distance.pass,
    })
}

/// `E|x1(t) - x2(t)|^2 <= |x01 - x02|^2` for reflected motions on the
/// half-line selected by `q = +1` or `-1`.
pub fn remark1_experiment(x01: f64, x02: f64, q: f64, ens: &Ensemble) -> Result<BoundCheck> {
    if q != 1.0 && q != -1.0 {
        return invalid(format!("reflected distance bound needs q = +1 or -1, got {q}"));
    }
    if q * x01 < 0.0 || q * x02 < 0.0 {
        return invalid(format!(
            "starts {x01}, {x02} must lie in the phase space for q = {q}"
        ));
    }
    let sq = ens.map(|i| {
        let w = ens.wiener(i, 1)?;
        let a = simulate_reflected(x01, q, &w)?.terminal_x();
        let b = simulate_reflected(x02, q, &w)?.terminal_x();
        Ok((a - b) * (a - b))
    })?;
    Ok(BoundCheck::new(mc_summary(&sq)?, (x01 - x02).powi(2)))
}

/// Bound `16 d^2 + 8 sqrt(t/pi) d` on `E|eta1 - eta2|^2` for `q = 0`.
pub fn remark2_bound(x01: f64, x02: f64, t: f64) -> f64 {
    let d = (x01 - x02).abs();
    16.0 * d * d + 8.0 * t.sqrt() / std::f64::consts::PI.sqrt() * d
}

/// Local-time distance for two Brownian motions `x0i + w` via Tanaka.
pub fn remark2_experiment(x01: f64, x02: f64, ens: &Ensemble) -> Result<BoundCheck> {
    let sq = ens.map(|i| {
        let w = ens.wiener(i, 1)?;
        let shifted = |x0: f64| -> Vec<f64> { w.values().iter().map(|v| x0 + v).collect() };
        let e1 = tanaka_local_time(&shifted(x01), &w)?;
        let e2 = tanaka_local_time(&shifted(x02), &w)?;
        let d = e1.eta.last().expect("nonempty") - e2.eta.last().expect("nonempty");
        Ok(d * d)
    })?;
    Ok(BoundCheck::new(
        mc_summary(&sq)?,
        remark2_bound(x01, x02, ens.grid.horizon()),
    ))
}

/// Fraction of paths whose ordering violation exceeds `tolerance`,
/// expressed as a proportion summary (for CI reporting).
pub fn violation_summary(report: &OrderingReport) -> Result<McSummary> {
    let hits = (report.violating_fraction * report.paths as f64).round() as usize;
    proportion_summary(hits, report.paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_wiener};
    use crate::quad::integrate;
    use crate::rng::derive_stream;

    #[test]
    fn comparable_drifts() {
        let (a, b) = make_comparable_drifts(0.3, 0.3, 8).unwrap();
        assert_eq!(a, b);
        let (a, b) = make_comparable_drifts(0.2, 0.6, 1).unwrap();
        for &x in &[-2.0, 0.0, 2.0] {
            assert!(drift_gap(&a, &b, x) > 0.0);
            assert!(b.profile(x) > a.profile(x));
        }
        let m = integrate(|x| b.profile(x), -6.0, 6.0, 1e-12).unwrap();
        assert!((m - 0.6_f64.atanh()).abs() < 1e-8);
        assert!(make_comparable_drifts(0.6, 0.2, 1).is_err());
    }

    #[test]
    fn comparable_drifts_ordered_at_every_scale() {
        let (a, b) = make_comparable_drifts(-0.5, 0.1, 1).unwrap();
        for &n in &[1_u32, 10, 256] {
            let an = MollifiedDrift::new(a.mass(), n);
            let bn = MollifiedDrift::new(b.mass(), n);
            for i in -100..=100 {
                let x = i as f64 * 0.37 / n as f64;
                assert!(bn.eval(x) >= an.eval(x));
            }
        }
    }

    #[test]
    fn identical_params_give_identical_paths() {
        let g = make_grid(1.0, 1000).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(1, 1)).unwrap();
        let p = SbmParams::new(0.4, 0.1, 256).unwrap();
        let pair = simulate_coupled_pair(&p, &p, &w).unwrap();
        assert_eq!(pair.path1, pair.path2);
        assert_eq!(check_ordering(&pair, 0.0).max_violation, 0.0);
    }

    #[test]
    fn reflected_pair_is_ordered() {
        let g = make_grid(1.0, 2000).unwrap();
        let w = sample_wiener(&g, 1, &mut derive_stream(1, 2)).unwrap();
        let p1 = SbmParams::new(1.0, 0.0, 1).unwrap();
        let p2 = SbmParams::new(1.0, 1.0, 1).unwrap();
        let pair = simulate_coupled_pair(&p1, &p2, &w).unwrap();
        assert!(pair.path1.x.iter().zip(&pair.path2.x).all(|(a, b)| a <= b));
        assert_eq!(check_ordering(&pair, 0.0).max_violation, 0.0);
    }

    #[test]
    fn mixed_regimes_rejected() {
        let g = make_grid(1.0, 10).unwrap();
        let w = WienerPath::zero(g, 1).unwrap();
        let refl = SbmParams::new(1.0, 0.0, 1).unwrap();
        let skew = SbmParams::new(0.5, 0.0, 1).unwrap();
        let mirror = SbmParams::new(-1.0, 0.0, 1).unwrap();
        assert!(simulate_coupled_pair(&refl, &skew, &w).is_err());
        assert!(simulate_coupled_pair(&refl, &mirror, &w).is_err());
    }

    #[test]
    fn far_apart_starts_stay_constant() {
        let g = make_grid(1.0, 500).unwrap();
        let w = WienerPath::zero(g, 1).unwrap();
        let p1 = SbmParams::new(0.3, -5.0, 64).unwrap();
        let p2 = SbmParams::new(0.7, 5.0, 64).unwrap();
        let pair = simulate_coupled_pair(&p1, &p2, &w).unwrap();
        assert!(pair.path1.x.iter().all(|&x| (x + 5.0).abs() < 1e-10));
        assert!(pair.path2.x.iter().all(|&x| (x - 5.0).abs() < 1e-10));
    }

    #[test]
    fn equal_skews_give_zero_distance() {
        let ens = Ensemble::with_step(1.0, 1e-3, 20, 3).unwrap();
        let r = corollary1_experiment(0.0, 0.4, 0.4, &ens, 64).unwrap();
        assert_eq!(r.summary.mean, 0.0);
        assert_eq!(r.target, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn equal_starts_satisfy_both_bounds() {
        let ens = Ensemble::with_step(1.0, 1e-3, 20, 3).unwrap();
        let r = corollary2_experiment(0.3, 0.3, 0.5, &ens, 64).unwrap();
        assert_eq!(r.x_distance.summary.mean, 0.0);
        assert_eq!(r.eta_distance.summary.mean, 0.0);
        assert!(r.pass);
        assert!(corollary2_experiment(0.0, 0.1, 0.0, &ens, 64).is_err());
    }

    #[test]
    fn symmetric_starts_reduce_the_bound() {
        let ens = Ensemble::with_step(1.0, 1e-3, 20, 3).unwrap();
        let r = corollary2_experiment(-0.4, 0.4, 0.5, &ens, 64).unwrap();
        assert!((r.x_distance.bound - 0.8).abs() < 1e-9);
    }

    #[test]
    fn distance_bounds_at_equal_starts() {
        let ens = Ensemble::with_step(1.0, 1e-3, 20, 3).unwrap();
        let r1 = remark1_experiment(0.5, 0.5, 1.0, &ens).unwrap();
        assert_eq!((r1.summary.mean, r1.bound), (0.0, 0.0));
        assert!(r1.pass);
        let r2 = remark2_experiment(0.2, 0.2, &ens).unwrap();
        assert_eq!((r2.summary.mean, r2.bound), (0.0, 0.0));
        assert!(r2.pass);
        assert!(remark1_experiment(-0.5, 0.5, 1.0, &ens).is_err());
    }

    #[test]
    fn remark1_tight_for_zero_driver() {
        let g = make_grid(1.0, 100).unwrap();
        let w = WienerPath::zero(g, 1).unwrap();
        let a = simulate_reflected(0.0, 1.0, &w).unwrap();
        let b = simulate_reflected(1.0, 1.0, &w).unwrap();
        for (x1, x2) in a.x.iter().zip(&b.x) {
            assert_eq!((x1 - x2).powi(2), 1.0);
        }
    }

    #[test]
    fn remark2_bound_value() {
        let b = remark2_bound(0.0, 0.1, 1.0);
        assert!((b - 0.611_351_666_838_205).abs() < 1e-12, "{b}");
    }
}
