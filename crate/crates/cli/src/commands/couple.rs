//! `couple`: comparison and distance experiments on coupled pairs.

use skewdiff_core::coupling::{
    corollary1_experiment, corollary2_experiment, ordering_experiment, remark1_experiment,
    remark2_experiment, ORDERING_TOL_FACTOR,
};
use skewdiff_core::sbm::SbmParams;

use super::{experiment_name, unknown_experiment, Sampling};
use crate::config::ParamMap;
use crate::error::CliError;
use crate::report::{Check, Params, Report};
use crate::Output;

pub const EXPERIMENTS: [&str; 5] = ["corollary1", "corollary2", "remark1", "remark2", "ordering"];

/// Largest violating fraction accepted by the mollified ordering gate.
pub const ORDERING_MAX_FRACTION: f64 = 0.01;

pub fn run(p: &ParamMap) -> Result<Output, CliError> {
    let name = experiment_name(p, "corollary1");
    let report = match name.as_str() {
        "corollary1" => corollary1(p)?,
        "corollary2" => corollary2(p)?,
        "remark1" => remark1(p)?,
        "remark2" => remark2(p)?,
        "ordering" => ordering(p)?,
        other => return Err(unknown_experiment("couple", other, &EXPERIMENTS)),
    };
    Ok(Output {
        pass: report.pass,
        report: Some(report),
        csv: None,
    })
}

fn corollary1(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let x0 = p.get_or("x0", 0.0)?;
    let q1 = p.get_or("q1", 0.6)?;
    let q2 = p.get_or("q2", 0.2)?;
    let c = corollary1_experiment(x0, q1, q2, &s.ensemble()?, s.n)?;
    Ok(Report::new(
        "corollary1",
        s.record(Params::new().set("x0", x0).set("q1", q1).set("q2", q2))
            .build(),
        vec![Check::from_target("mean-distance", &c)],
    ))
}

fn corollary2(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let x01 = p.get_or("x01", 0.0)?;
    let x02 = p.get_or("x02", 0.5)?;
    let q = p.get_or("q", 0.5)?;
    let r = corollary2_experiment(x01, x02, q, &s.ensemble()?, s.n)?;
    Ok(Report::new(
        "corollary2",
        s.record(Params::new().set("x01", x01).set("x02", x02).set("q", q))
            .build(),
        vec![
            Check::from_bound("x-distance", &r.x_distance),
            Check::from_bound("eta-distance", &r.eta_distance),
        ],
    ))
}

fn remark1(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let x01 = p.get_or("x01", 0.0)?;
    let x02 = p.get_or("x02", 1.0)?;
    let q = p.get_or("q", 1.0)?;
    let r = remark1_experiment(x01, x02, q, &s.ensemble()?)?;
    Ok(Report::new(
        "remark1",
        s.record(Params::new().set("x01", x01).set("x02", x02).set("q", q))
            .build(),
        vec![Check::from_bound("squared-distance", &r)],
    ))
}

fn remark2(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let x01 = p.get_or("x01", 0.0)?;
    let x02 = p.get_or("x02", 0.1)?;
    let r = remark2_experiment(x01, x02, &s.ensemble()?)?;
    Ok(Report::new(
        "remark2",
        s.record(Params::new().set("x01", x01).set("x02", x02).set("q", 0.0))
            .build(),
        vec![Check::from_bound("squared-eta-distance", &r)],
    ))
}

fn ordering(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 1000)?;
    let q1 = p.get_or("q1", 0.2)?;
    let q2 = p.get_or("q2", 0.6)?;
    let x01 = p.get_or("x01", -0.1)?;
    let x02 = p.get_or("x02", 0.1)?;
    let factor = p.get_or("tol-factor", ORDERING_TOL_FACTOR)?;
    let refine = p.get_or("refine", true)?;
    let p1 = SbmParams::new(q1, x01, s.n)?;
    let p2 = SbmParams::new(q2, x02, s.n)?;
    let params = s.record(
        Params::new()
            .set("q1", q1)
            .set("q2", q2)
            .set("x01", x01)
            .set("x02", x02)
            .set("tol-factor", factor)
            .set("refine", refine),
    );

    if p1.is_reflected() && p2.is_reflected() {
        // Exact map: no tolerance.
        let r = ordering_experiment(&p1, &p2, &s.ensemble()?, 0.0)?;
        let check = Check::new("max-violation", r.max_violation, r.max_violation == 0.0).bound(0.0);
        return Ok(Report::new("ordering", params.build(), vec![check]).detail("coarse", r));
    }

    let ens = s.ensemble()?;
    let tol = factor * s.grid.dt().sqrt();
    let coarse = ordering_experiment(&p1, &p2, &ens, tol)?;
    let mut checks = vec![Check::new(
        "violating-fraction",
        coarse.violating_fraction,
        coarse.violating_fraction <= ORDERING_MAX_FRACTION,
    )
    .bound(ORDERING_MAX_FRACTION)
    .tolerance(tol)];
    let mut report_fine = None;
    if refine {
        let fine_ens = s.refined(4)?;
        let fine_tol = factor * fine_ens.grid.dt().sqrt();
        let fine = ordering_experiment(&p1, &p2, &fine_ens, fine_tol)?;
        checks.push(
            Check::new(
                "refined-fraction",
                fine.violating_fraction,
                fine.violating_fraction <= coarse.violating_fraction,
            )
            .bound(coarse.violating_fraction)
            .tolerance(fine_tol),
        );
        checks.push(
            Check::new(
                "refined-median-violation",
                fine.median_violation,
                fine.median_violation <= coarse.median_violation,
            )
            .bound(coarse.median_violation),
        );
        report_fine = Some(fine);
    }
    let mut report = Report::new("ordering", params.build(), checks).detail("coarse", coarse);
    if let Some(f) = report_fine {
        report = report.detail("refined", f);
    }
    Ok(report)
}
