//! `sbm`: one path as CSV, or an ensemble summary of the terminal local time.

use skewdiff_core::coupling::TargetCheck;
use skewdiff_core::rng::{path_stream, StreamRole};
use skewdiff_core::sample_wiener;
use skewdiff_core::sbm::{expected_local_time, simulate_sbm, SbmParams, SbmPath};
use skewdiff_core::stats::{mc_summary, SCHEME_ALLOWANCE};

use super::Sampling;
use crate::config::ParamMap;
use crate::error::CliError;
use crate::report::{Check, CsvTable, Params, Report};
use crate::Output;

pub const PATH_HEADER: [&str; 4] = ["time", "x", "eta", "w"];

pub fn path_table(path: &SbmPath) -> CsvTable {
    let mut t = CsvTable::new(&PATH_HEADER);
    for k in 0..path.grid.len() {
        t.push(&[path.grid.time(k), path.x[k], path.eta[k], path.w[k]]);
    }
    t
}

pub fn run(p: &ParamMap) -> Result<Output, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 1)?;
    let q = p.get_or("q", 0.5)?;
    let x0 = p.get_or("x0", 0.0)?;
    let params = SbmParams::new(q, x0, s.n)?;
    if s.paths == 0 {
        return Err(CliError::config("paths must be >= 1"));
    }

    let first = {
        let w = sample_wiener(&s.grid, 1, &mut path_stream(s.seed, 0, StreamRole::Wiener))?;
        simulate_sbm(&params, &w)?
    };
    if s.paths == 1 {
        return Ok(Output {
            report: None,
            csv: Some(path_table(&first)),
            pass: true,
        });
    }

    let ens = s.ensemble()?;
    let per_path = ens.map(|i| {
        let path = simulate_sbm(&params, &ens.wiener(i, 1)?)?;
        let monotone = path.eta.windows(2).all(|w| w[1] >= w[0]) && path.eta[0] == 0.0;
        Ok((path.terminal_eta(), path.identity_residual(), monotone))
    })?;
    let etas: Vec<f64> = per_path.iter().map(|r| r.0).collect();
    let summary = mc_summary(&etas)?;
    let target = expected_local_time(x0, s.grid.horizon())?;
    let mean = TargetCheck {
        summary,
        target,
        allowance: SCHEME_ALLOWANCE,
        pass: summary.agrees_with(target, SCHEME_ALLOWANCE),
    };
    let residual = per_path.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut checks = vec![
        Check::from_target("mean-terminal-eta", &mean),
        Check::new(
            "eta-nondecreasing",
            per_path.iter().filter(|r| !r.2).count() as f64,
            per_path.iter().all(|r| r.2),
        )
        .bound(0.0),
    ];
    if q != 0.0 {
        checks.push(Check::new("identity-residual", residual, residual <= 1e-12).bound(1e-12));
    }
    let report = Report::new(
        "sbm-ensemble",
        s.record(Params::new().set("q", q).set("x0", x0)).build(),
        checks,
    )
    .detail("scheme", first.scheme);
    Ok(Output {
        pass: report.pass,
        report: Some(report),
        csv: Some(path_table(&first)),
    })
}
