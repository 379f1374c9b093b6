//! `laws`: the exact local-time law, the mean local-time table and the
//! scheme checks against them.

use skewdiff_core::rng::StreamRole;
use skewdiff_core::sbm::{
    cross_scheme_ks, expected_local_time, expected_local_time_closed_form, quadratic_variation_check,
    sample_local_time, simulate_sbm, LocalTimeLaw, SbmParams,
};
use skewdiff_core::stats::{ks_critical_1pct, ks_distance, mc_summary, proportion_summary, SCHEME_ALLOWANCE};
use skewdiff_core::{EmpiricalCdf, Ensemble, TimeGrid};

use super::{experiment_name, unknown_experiment, Sampling};
use crate::config::ParamMap;
use crate::error::CliError;
use crate::report::{Check, CsvTable, Params, Report};
use crate::Output;

pub const EXPERIMENTS: [&str; 4] = ["eta-cdf", "i-table", "mollified", "transform"];

/// KS gate for mollified local times against the exact law.
pub const MOLLIFIED_KS_MAX: f64 = 0.05;
/// Relative gate for the quadratic-variation ratio.
pub const QV_TOLERANCE: f64 = 0.10;
/// KS gate between the mollified and transformed schemes.
pub const CROSS_SCHEME_KS_MAX: f64 = 0.03;
/// Agreement required between quadrature and closed form for `I_t(x)`.
pub const TABLE_TOLERANCE: f64 = 1e-10;

pub fn run(p: &ParamMap) -> Result<Output, CliError> {
    let name = experiment_name(p, "eta-cdf");
    let (report, csv) = match name.as_str() {
        "eta-cdf" => (eta_cdf(p)?, None),
        "i-table" => {
            let (r, t) = i_table(p)?;
            (r, Some(t))
        }
        "mollified" => (mollified(p)?, None),
        "transform" => (transform(p)?, None),
        other => return Err(unknown_experiment("laws", other, &EXPERIMENTS)),
    };
    Ok(Output {
        pass: report.pass,
        report: Some(report),
        csv,
    })
}

fn eta_cdf(p: &ParamMap) -> Result<Report, CliError> {
    let x0 = p.get_or("x0", 1.0)?;
    let t = p.get_or("t", 1.0)?;
    let paths = p.get_or("paths", 100_000usize)?;
    let seed = p.seed()?;
    let law = LocalTimeLaw::new(x0, t)?;
    let ens = Ensemble::new(TimeGrid::new(t, 1)?, paths, seed)?;
    let samples = ens.map(|i| Ok(sample_local_time(&law, &mut ens.stream(i, StreamRole::Law))))?;
    let zeros = samples.iter().filter(|v| **v == 0.0).count();
    let mean = mc_summary(&samples)?;
    let ks = ks_distance(&EmpiricalCdf::new(samples)?, &law);
    let crit = ks_critical_1pct(paths);
    let atom = proportion_summary(zeros, paths)?;
    let target = expected_local_time(x0, t)?;
    Ok(Report::new(
        "eta-cdf",
        Params::new()
            .set("x0", x0)
            .set("t", t)
            .set("paths", paths)
            .set("seed", seed)
            .build(),
        vec![
            Check::new("ks-distance", ks, ks <= crit).bound(crit),
            Check::from_summary("atom-mass", &atom, atom.agrees_with(law.atom(), 0.0)).target(law.atom()),
            Check::from_summary("mean", &mean, mean.agrees_with(target, 0.0)).target(target),
        ],
    ))
}

fn i_table(p: &ParamMap) -> Result<(Report, CsvTable), CliError> {
    let xs = p.list_or("xs", &[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])?;
    let ts = p.list_or("ts", &[0.25, 0.5, 1.0, 2.0])?;
    let mut table = CsvTable::new(&["x", "t", "quadrature", "closed_form", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for &t in &ts {
        if !(t >= 0.0) {
            return Err(CliError::config(format!("horizon t must be >= 0, got {t}")));
        }
        for &x in &xs {
            let q = expected_local_time(x, t)?;
            let c = expected_local_time_closed_form(x, t);
            let diff = (q - c).abs();
            worst = worst.max(diff / c.abs().max(1e-12));
            table.push(&[x, t, q, c, diff]);
        }
    }
    let report = Report::new(
        "i-table",
        Params::new().set("xs", &xs).set("ts", &ts).build(),
        vec![Check::new("max-relative-diff", worst, worst <= TABLE_TOLERANCE).bound(TABLE_TOLERANCE)],
    )
    .detail("rows", table.rows());
    Ok((report, table))
}

fn mollified(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let q = p.get_or("q", 0.6)?;
    let x0 = p.get_or("x0", 0.0)?;
    let params = SbmParams::new(q, x0, s.n)?;
    let ens = s.ensemble()?;
    let etas = ens.map(|i| Ok(simulate_sbm(&params, &ens.wiener(i, 1)?)?.terminal_eta()))?;
    let summary = mc_summary(&etas)?;
    let target = expected_local_time(x0, s.grid.horizon())?;
    let law = LocalTimeLaw::new(x0, s.grid.horizon())?;
    let ks = ks_distance(&EmpiricalCdf::new(etas)?, &law);
    Ok(Report::new(
        "mollified",
        s.record(Params::new().set("q", q).set("x0", x0)).build(),
        vec![
            Check::from_summary(
                "mean-eta",
                &summary,
                summary.agrees_with(target, SCHEME_ALLOWANCE),
            )
            .target(target)
            .tolerance(SCHEME_ALLOWANCE),
            Check::new("ks-distance", ks, ks <= MOLLIFIED_KS_MAX).bound(MOLLIFIED_KS_MAX),
        ],
    ))
}

fn transform(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let q = p.get_or("q", 0.6)?;
    let x0 = p.get_or("x0", 0.0)?;
    let ens = s.ensemble()?;
    let qv = quadratic_variation_check(q, x0, &ens, s.n)?;
    let ks = cross_scheme_ks(q, x0, &ens, s.n)?;
    Ok(Report::new(
        "transform",
        s.record(Params::new().set("q", q).set("x0", x0)).build(),
        vec![
            Check::new("qv-ratio", qv.ratio, (qv.ratio - 1.0).abs() <= QV_TOLERANCE)
                .target(1.0)
                .tolerance(QV_TOLERANCE),
            Check::new("cross-scheme-ks", ks, ks <= CROSS_SCHEME_KS_MAX).bound(CROSS_SCHEME_KS_MAX),
        ],
    )
    .detail("quadratic-variation", qv))
}
