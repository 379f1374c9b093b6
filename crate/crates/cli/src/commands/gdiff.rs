//! `gdiff`: the interface diffusion, its inverse local time and the tail
//! bounds.

use skewdiff_core::gdiff::{
    generate_probes, rho_tail_check, simulate_gdiff, small_local_time_check, tangential_moment_experiment,
    time_changed_path, validate_coefficients, CoefficientReport, GdiffCoefficients, GdiffPath,
    HyperplaneFrame,
};
use skewdiff_core::rng::{path_stream, StreamRole};
use skewdiff_core::stats::{mc_summary, SCHEME_ALLOWANCE};
use skewdiff_core::{derive_stream, sample_wiener, Ensemble};

use super::{coefficients, experiment_name, frame, start_point, unknown_experiment, Sampling};
use crate::config::ParamMap;
use crate::error::CliError;
use crate::report::{Check, CsvTable, Params, Report};
use crate::Output;

pub const EXPERIMENTS: [&str; 6] = [
    "simulate",
    "validate",
    "rho-tail",
    "small-local-time",
    "time-change",
    "moment",
];

pub const DEFAULT_PROBES: usize = 1000;
const PROBE_RADIUS: f64 = 4.0;

pub fn run(p: &ParamMap) -> Result<Output, CliError> {
    let name = experiment_name(p, "simulate");
    if name == "simulate" {
        return simulate(p);
    }
    let report = match name.as_str() {
        "validate" => validate(p)?,
        "rho-tail" => rho_tail(p)?,
        "small-local-time" => small_local_time(p)?,
        "time-change" => time_change(p)?,
        "moment" => moment(p)?,
        other => return Err(unknown_experiment("gdiff", other, &EXPERIMENTS)),
    };
    Ok(Output {
        pass: report.pass,
        report: Some(report),
        csv: None,
    })
}

/// Checks both coefficient conditions on a seeded probe set.
pub fn coefficient_checks(
    p: &ParamMap,
    c: &GdiffCoefficients,
    seed: u64,
) -> Result<(CoefficientReport, Vec<Check>), CliError> {
    let count = p.get_or("probes", DEFAULT_PROBES)?;
    if count == 0 {
        return Err(CliError::config("probes must be >= 1"));
    }
    // Probes use their own stream family, away from path streams.
    let probes = generate_probes(
        c.tangent_dim,
        count,
        PROBE_RADIUS,
        &mut derive_stream(seed, u64::MAX),
    );
    let r = validate_coefficients(c, &probes)?;
    let checks = vec![
        Check::new("sup-functional", r.sup_functional, r.sup_functional <= r.bound).bound(r.bound),
        Check::new(
            "lipschitz-quotient",
            r.max_lipschitz_quotient,
            r.max_lipschitz_quotient <= r.bound,
        )
        .bound(r.bound),
    ];
    Ok((r, checks))
}

pub fn path_table(path: &GdiffPath) -> CsvTable {
    let mut header = vec!["time".to_string()];
    header.extend((1..=path.dim).map(|i| format!("x{i}")));
    header.push("eta".into());
    let mut t = CsvTable::new(&header);
    let mut row = Vec::with_capacity(path.dim + 2);
    for k in 0..path.grid.len() {
        row.clear();
        row.push(path.grid.time(k));
        row.extend_from_slice(path.x_at(k));
        row.push(path.eta[k]);
        t.push(&row);
    }
    t
}

fn setup(
    p: &ParamMap,
    default_q: f64,
) -> Result<(HyperplaneFrame, GdiffCoefficients, Vec<f64>, Params), CliError> {
    let fr = frame(p)?;
    let (prof, c) = coefficients(p, &fr, "mixed", default_q)?;
    let start = start_point(p, fr.dim())?;
    let params = Params::new()
        .set("dim", fr.dim())
        .set("normal", fr.nu())
        .set("q", c.q)
        .set("profile", prof)
        .set("bound", c.bound)
        .set("start", &start);
    Ok((fr, c, start, params))
}

fn simulate(p: &ParamMap) -> Result<Output, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 1)?;
    let (fr, c, start, _) = setup(p, 0.5)?;
    let (_, checks) = coefficient_checks(p, &c, s.seed)?;
    let w = sample_wiener(&s.grid, fr.dim(), &mut path_stream(s.seed, 0, StreamRole::Wiener))?;
    let mut wt = path_stream(s.seed, 0, StreamRole::TimeChanged);
    let path = simulate_gdiff(&c, &start, &fr, &w, &mut wt, s.n)?;
    for ch in checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "skewdiff: coefficient check {} failed: {} > {:?}",
            ch.name, ch.estimate, ch.bound
        );
    }
    Ok(Output {
        pass: checks.iter().all(|c| c.pass),
        report: None,
        csv: Some(path_table(&path)),
    })
}

fn validate(p: &ParamMap) -> Result<Report, CliError> {
    let (_, c, _, params) = setup(p, 0.5)?;
    let seed = p.seed()?;
    let (r, checks) = coefficient_checks(p, &c, seed)?;
    Ok(Report::new("validate", params.set("seed", seed).build(), checks).detail("coefficients", r))
}

fn rho_tail(p: &ParamMap) -> Result<Report, CliError> {
    let n_level = p.get_or("n-level", 4.0)?;
    let mut grid_params = p.clone();
    if p.raw("t").is_none() {
        grid_params.insert("t", n_level.to_string());
    }
    let s = Sampling::resolve(&grid_params, n_level, 1e-3, 10_000)?;
    let q = p.get_or("q", 0.5)?;
    let x_nu = p.get_or("x0", 0.0)?;
    let level = p.get_or("level", 0.5)?;
    let big_t = p.get_or("big-t", 1.0)?;
    let r = rho_tail_check(q, x_nu, level, big_t, n_level, &s.ensemble()?, s.n)?;
    let exact_ok = r.exact <= r.check.bound * (1.0 + 1e-12);
    Ok(Report::new(
        "rho-tail",
        s.record(
            Params::new()
                .set("q", q)
                .set("x0", x_nu)
                .set("level", level)
                .set("big-t", big_t)
                .set("n-level", n_level),
        )
        .build(),
        vec![
            Check::from_bound("tail-frequency", &r.check),
            Check::new("exact-tail", r.exact, exact_ok).bound(r.check.bound),
        ],
    ))
}

fn small_local_time(p: &ParamMap) -> Result<Report, CliError> {
    let t = p.get_or("t", 1.0)?;
    let a = p.get_or("a", 0.5)?;
    let x_nu = p.get_or("x0", 0.0)?;
    let paths = p.get_or("paths", 10_000usize)?;
    let mut params = Params::new()
        .set("t", t)
        .set("a", a)
        .set("x0", x_nu)
        .set("paths", paths);
    let r = if paths >= 2 {
        let s = Sampling::resolve(p, t, super::DEFAULT_DT, paths)?;
        let q = p.get_or("q", 0.5)?;
        params = s.record(params).set("q", q);
        small_local_time_check(x_nu, t, a, Some((&s.ensemble()?, q, s.n)))?
    } else {
        small_local_time_check(x_nu, t, a, None)?
    };
    let mut checks = vec![Check::new("exact-probability", r.exact, r.exact_pass).bound(r.bound)];
    if let (Some(mc), Some(pass)) = (r.mc, r.mc_pass) {
        checks.push(
            Check::from_summary("mc-frequency", &mc, pass)
                .bound(r.bound)
                .tolerance(SCHEME_ALLOWANCE),
        );
    }
    Ok(Report::new("small-local-time", params.build(), checks))
}

fn mean_max_residual(
    c: &GdiffCoefficients,
    fr: &HyperplaneFrame,
    start: &[f64],
    ens: &Ensemble,
    levels: &[f64],
    n: u32,
) -> Result<(f64, f64, usize), CliError> {
    let rows = ens.map(|i| {
        let w = ens.wiener(i, fr.dim())?;
        let mut wt = ens.stream(i, StreamRole::TimeChanged);
        let path = simulate_gdiff(c, start, fr, &w, &mut wt, n)?;
        let tc = time_changed_path(&path, fr, c, levels)?;
        let normal = tc.normal_residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Ok((tc.max_residual(), normal, tc.truncated))
    })?;
    let res = mc_summary(&rows.iter().map(|r| r.0).collect::<Vec<_>>())?;
    let normal = mc_summary(&rows.iter().map(|r| r.1).collect::<Vec<_>>())?;
    let truncated = rows.iter().filter(|r| r.2).count();
    Ok((res.mean, normal.mean, truncated))
}

fn time_change(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, 1e-3, 200)?;
    let (fr, c, start, params) = setup(p, 0.5)?;
    let top = p.get_or("level", 0.25)?;
    let count = p.get_or("levels", 10usize)?;
    if count == 0 || !(top >= 0.0) {
        return Err(CliError::config("levels must be >= 1 and level >= 0"));
    }
    let levels: Vec<f64> = (0..=count).map(|j| top * j as f64 / count as f64).collect();
    let (coarse, coarse_normal, coarse_trunc) =
        mean_max_residual(&c, &fr, &start, &s.ensemble()?, &levels, s.n)?;
    let (fine, fine_normal, fine_trunc) = mean_max_residual(&c, &fr, &start, &s.refined(4)?, &levels, s.n)?;
    Ok(Report::new(
        "time-change",
        s.record(params.set("level", top).set("levels", count)).build(),
        vec![
            Check::new("refined-mean-max-residual", fine, fine < coarse).bound(coarse),
            Check::new(
                "refined-mean-normal-residual",
                fine_normal,
                fine_normal <= coarse_normal,
            )
            .bound(coarse_normal),
        ],
    )
    .detail("truncated-paths", [coarse_trunc, fine_trunc]))
}

fn moment(p: &ParamMap) -> Result<Report, CliError> {
    let s = Sampling::resolve(p, 1.0, super::DEFAULT_DT, 10_000)?;
    let fr = frame(p)?;
    let kappa = p.get_or("kappa", 0.8)?;
    let q = p.get_or("q", 0.6)?;
    let start = start_point(p, fr.dim())?;
    let r = tangential_moment_experiment(kappa, q, &fr, &start, &s.ensemble()?, s.n)?;
    let checks = r
        .coordinates
        .iter()
        .enumerate()
        .map(|(i, c)| Check::from_target(&format!("second-moment-{}", i + 1), c))
        .collect();
    Ok(Report::new(
        "moment",
        s.record(
            Params::new()
                .set("dim", fr.dim())
                .set("normal", fr.nu())
                .set("kappa", kappa)
                .set("q", q)
                .set("start", &start),
        )
        .build(),
        checks,
    ))
}
