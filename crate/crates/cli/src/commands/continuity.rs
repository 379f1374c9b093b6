//! `continuity`: shared-noise separation probabilities for shrinking
//! start offsets.

use skewdiff_core::gdiff::continuity_experiment;
use skewdiff_core::stats::{monotone_trend, TrendPoint};

use super::{coefficients, frame, start_point, Sampling};
use crate::config::ParamMap;
use crate::error::CliError;
use crate::report::{Check, CsvTable, Params, Report};
use crate::Output;

pub const DEFAULT_OFFSETS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

pub fn run(p: &ParamMap) -> Result<Output, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 4000)?;
    let fr = frame(p)?;
    let (prof, c) = coefficients(p, &fr, "mixed", 0.5)?;
    let start = start_point(p, fr.dim())?;
    let eps = p.get_or("epsilon", 0.25)?;
    let sizes = p.list_or("offsets", &DEFAULT_OFFSETS)?;
    if sizes.len() < 3 {
        return Err(CliError::config("continuity needs at least 3 offsets"));
    }
    let dir = match p.raw("offset-dir") {
        Some(_) => p.list_or("offset-dir", &[])?,
        None => fr.nu().to_vec(),
    };
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dir.len() != fr.dim() || !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::config(format!(
            "offset-dir must be a nonzero vector with {} components",
            fr.dim()
        )));
    }
    let mut offsets: Vec<Vec<f64>> = sizes
        .iter()
        .map(|h| dir.iter().map(|v| h * v / norm).collect())
        .collect();
    // zero-offset control: the two runs must coincide exactly
    offsets.push(vec![0.0; fr.dim()]);

    let (coef_report, mut checks) = super::gdiff::coefficient_checks(p, &c, s.seed)?;
    let r = continuity_experiment(&c, &fr, &start, &offsets, eps, &s.ensemble()?, s.n)?;
    let (control, shrinking) = r.estimates.split_last().expect("at least one offset");
    let points: Vec<TrendPoint> = shrinking
        .iter()
        .map(|e| TrendPoint {
            value: e.summary.mean,
            half_width: e.summary.half_width,
        })
        .collect();
    let trend = monotone_trend(&points)?;

    let mut table = CsvTable::new(&["offset", "probability", "stderr", "ci_low", "ci_high"]);
    let mut estimate_checks = Vec::new();
    for (h, e) in sizes.iter().zip(shrinking) {
        table.push(&[
            *h,
            e.summary.mean,
            e.summary.std_err,
            e.summary.lower(),
            e.summary.upper(),
        ]);
        estimate_checks.push(Check::from_summary(&format!("separation-{h}"), &e.summary, true));
    }
    let mut all = vec![
        Check::new("trend", shrinking[0].summary.mean, trend.pass)
            .bound(shrinking[shrinking.len() - 1].summary.mean),
        Check::new("zero-offset-control", control.summary.mean, control.hits == 0).bound(0.0),
    ];
    all.append(&mut checks);
    all.extend(estimate_checks);

    let report = Report::new(
        "continuity",
        s.record(
            Params::new()
                .set("dim", fr.dim())
                .set("normal", fr.nu())
                .set("q", c.q)
                .set("profile", prof)
                .set("epsilon", eps)
                .set("offsets", &sizes)
                .set("offset-dir", &dir)
                .set("start", &start),
        )
        .build(),
        all,
    )
    .detail("trend", trend)
    .detail("coefficients", coef_report);
    Ok(Output {
        pass: report.pass,
        report: Some(report),
        csv: Some(table),
    })
}
