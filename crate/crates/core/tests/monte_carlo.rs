//! Statistical checks against analytic oracles. Every run is seeded.

use std::f64::consts::PI;

use skewdiff_core::coupling::{
    corollary1_experiment, corollary2_experiment, remark1_experiment, remark2_experiment,
};
use skewdiff_core::gdiff::{
    generate_probes, simulate_gdiff, time_changed_path, validate_coefficients, GdiffCoefficients,
    HyperplaneFrame, Profile,
};
use skewdiff_core::grid::{sample_wiener, TimeGrid};
use skewdiff_core::mc::Ensemble;
use skewdiff_core::rng::{derive_stream, StreamRole};
use skewdiff_core::sbm::{
    expected_local_time, sample_local_time, simulate_reflected, simulate_sbm, tanaka_local_time,
    LocalTimeLaw, SbmParams,
};
use skewdiff_core::special::gaussian_tail;
use skewdiff_core::stats::{
    ks_critical_1pct, ks_distance, mc_summary, proportion_summary, EmpiricalCdf, FnCdf, SCHEME_ALLOWANCE,
};

fn sqrt_2_over_pi() -> f64 {
    (2.0 / PI).sqrt()
}

#[test]
fn wiener_terminal_variance_and_increment_means() {
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let m = 100_000;
    let mut terminal_sq = Vec::with_capacity(m);
    let mut inc_sums = vec![0.0; 4];
    for i in 0..m {
        let w = sample_wiener(&grid, 1, &mut derive_stream(101, i as u64)).unwrap();
        let v = w.values();
        terminal_sq.push(v[4] * v[4]);
        for k in 0..4 {
            inc_sums[k] += v[k + 1] - v[k];
        }
    }
    let s = mc_summary(&terminal_sq).unwrap();
    assert!(s.agrees_with(1.0, 0.0), "{s:?}");
    let limit = 4.0 * (grid.dt() / m as f64).sqrt();
    for sum in inc_sums {
        assert!((sum / m as f64).abs() <= limit);
    }
}

#[test]
fn neighbouring_streams_are_uncorrelated() {
    // For each output position, correlate adjacent stream indices across
    // 10^4 streams.
    let (streams, len) = (10_000, 1000);
    let mut data = vec![0.0; streams * len];
    for k in 0..streams {
        let mut s = derive_stream(7, k as u64);
        for j in 0..len {
            data[k * len + j] = s.uniform();
        }
    }
    let mut worst: f64 = 0.0;
    for j in 0..len {
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for k in 0..streams - 1 {
            let (x, y) = (data[k * len + j], data[(k + 1) * len + j]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let n = (streams - 1) as f64;
        let cov = sxy / n - sx * sy / (n * n);
        let r = cov / ((sxx / n - (sx / n).powi(2)) * (syy / n - (sy / n).powi(2))).sqrt();
        worst = worst.max(r.abs());
    }
    assert!(worst <= 0.05, "largest neighbour correlation {worst}");
}

#[test]
fn local_time_sampling_matches_the_law() {
    let m = 100_000;
    let crit = ks_critical_1pct(m);
    let sample = |x: f64, seed: u64| -> Vec<f64> {
        let law = LocalTimeLaw::new(x, 1.0).unwrap();
        let mut s = derive_stream(seed, 0);
        (0..m).map(|_| sample_local_time(&law, &mut s)).collect()
    };

    let at_one = sample(1.0, 5);
    assert!(at_one.iter().all(|v| *v >= 0.0));
    let zeros = at_one.iter().filter(|v| **v == 0.0).count();
    let atom = 1.0 - 2.0 * gaussian_tail(1.0);
    assert!(proportion_summary(zeros, m).unwrap().agrees_with(atom, 0.0));
    let law = LocalTimeLaw::new(1.0, 1.0).unwrap();
    assert!(ks_distance(&EmpiricalCdf::new(at_one.clone()).unwrap(), &law) <= crit);

    // Continuous part, conditioned on positivity, against its own law.
    let positive: Vec<f64> = at_one.into_iter().filter(|v| *v > 0.0).collect();
    let mass = 1.0 - atom;
    let conditional = FnCdf(move |a: f64| {
        if a <= 0.0 {
            0.0
        } else {
            (1.0 - 2.0 * gaussian_tail(1.0 + a) - atom) / mass
        }
    });
    let mp = positive.len();
    assert!(ks_distance(&EmpiricalCdf::new(positive).unwrap(), &conditional) <= ks_critical_1pct(mp));

    let at_zero = sample(0.0, 6);
    let s = mc_summary(&at_zero).unwrap();
    assert!(s.agrees_with(sqrt_2_over_pi(), 0.0), "{s:?}");
    let law0 = LocalTimeLaw::new(0.0, 1.0).unwrap();
    assert!(ks_distance(&EmpiricalCdf::new(at_zero).unwrap(), &law0) <= crit);
}

#[test]
fn mollified_paths_respect_identity_and_locality() {
    let n = 256;
    let ens = Ensemble::with_step(1.0, 1e-4, 200, 17).unwrap();
    let dt = ens.grid.dt();
    let reach = 6.0 / n as f64 + 4.0 * dt.sqrt();
    for q in [0.6, -0.4] {
        let p = SbmParams::new(q, 0.05, n).unwrap();
        let checks = ens
            .map(|i| {
                let path = simulate_sbm(&p, &ens.wiener(i, 1)?)?;
                let local = (0..path.eta.len() - 1).all(|k| {
                    path.eta[k + 1] == path.eta[k] || path.x[k].abs().min(path.x[k + 1].abs()) <= reach
                });
                let monotone = if q > 0.0 {
                    path.eta.windows(2).all(|w| w[1] >= w[0])
                } else {
                    path.eta.windows(2).all(|w| w[1] >= w[0] - 1e-15)
                };
                Ok(local && monotone && path.eta[0] == 0.0 && path.identity_residual() <= 1e-12)
            })
            .unwrap();
        assert!(checks.iter().all(|&ok| ok), "q = {q}");
    }
}

#[test]
fn tanaka_mean_and_clamp_refinement() {
    let ens = Ensemble::with_step(1.0, 1e-4, 10_000, 23).unwrap();
    let stats = ens
        .map(|i| {
            let w = ens.wiener(i, 1)?;
            let est = tanaka_local_time(w.values(), &w)?;
            Ok((*est.eta.last().unwrap(), est.clamp))
        })
        .unwrap();
    let eta: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let s = mc_summary(&eta).unwrap();
    assert!(s.agrees_with(sqrt_2_over_pi(), SCHEME_ALLOWANCE), "{s:?}");

    // Each Tanaka increment |x_k| - |x_{k-1}| - sign(x_{k-1}) dx is
    // nonnegative by convexity, so the clamp only absorbs rounding at any step.
    for dt in [4e-3, 1e-3, 2.5e-4] {
        let ens = Ensemble::with_step(1.0, dt, 500, 29).unwrap();
        let worst = ens
            .map(|i| {
                let w = ens.wiener(i, 1)?;
                Ok(tanaka_local_time(w.values(), &w)?.clamp)
            })
            .unwrap()
            .into_iter()
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "dt {dt}: clamp {worst}");
    }
}

#[test]
fn reflected_terminal_is_folded_normal() {
    let ens = Ensemble::with_step(1.0, 1e-3, 100_000, 31).unwrap();
    let ends = ens
        .map(|i| Ok(simulate_reflected(0.0, 1.0, &ens.wiener(i, 1)?)?.terminal_x()))
        .unwrap();
    assert!(ends.iter().all(|x| *x >= 0.0));
    let s = mc_summary(&ends).unwrap();
    assert!(s.agrees_with(sqrt_2_over_pi(), SCHEME_ALLOWANCE), "{s:?}");
}

#[test]
fn distance_experiments_small_cases() {
    let ens = Ensemble::with_step(1.0, 1e-3, 2000, 37).unwrap();
    let same = corollary1_experiment(0.3, 0.4, 0.4, &ens, 256).unwrap();
    assert_eq!(same.summary.mean, 0.0);
    assert_eq!(same.target, 0.0);

    let c2 = corollary2_experiment(0.0, 0.5, 0.5, &ens, 256).unwrap();
    assert!(c2.pass, "{c2:?}");

    let big = Ensemble::with_step(1.0, 1e-2, 100_000, 41).unwrap();
    let r1 = remark1_experiment(0.0, 1.0, 1.0, &big).unwrap();
    assert!(r1.pass && r1.bound == 1.0, "{r1:?}");

    let ens4 = Ensemble::with_step(1.0, 1e-4, 10_000, 43).unwrap();
    let r2 = remark2_experiment(0.0, 0.1, &ens4).unwrap();
    assert!((r2.bound - 0.611351666838205).abs() < 1e-12);
    assert!(r2.pass, "{r2:?}");
}

#[test]
fn time_change_residual_shrinks_under_refinement() {
    let frame = HyperplaneFrame::new(&[1.0, 0.5, -0.25]).unwrap();
    let c = GdiffCoefficients::from_profile(
        Profile::Mixed {
            amp: 0.5,
            freq: 1.0,
            kappa: 0.5,
        },
        2,
        0.5,
    )
    .unwrap();
    let x0 = [0.0, 0.0, 0.0];
    let mean_residual = |dt: f64| -> f64 {
        let ens = Ensemble::with_step(1.0, dt, 200, 47).unwrap();
        let r = ens
            .map(|i| {
                let w = ens.wiener(i, 3)?;
                let mut wt = ens.stream(i, StreamRole::TimeChanged);
                let p = simulate_gdiff(&c, &x0, &frame, &w, &mut wt, 256)?;
                let levels: Vec<f64> = (0..=10).map(|j| 0.05 * j as f64).collect();
                let tc = time_changed_path(&p, &frame, &c, &levels)?;
                Ok(tc.max_residual())
            })
            .unwrap();
        mc_summary(&r).unwrap().mean
    };
    let coarse = mean_residual(1e-3);
    let fine = mean_residual(2.5e-4);
    assert!(fine < coarse, "{coarse} -> {fine}");
}

#[test]
fn zero_coefficient_time_change_identity() {
    let frame = HyperplaneFrame::axis_aligned(3).unwrap();
    let c = GdiffCoefficients::from_profile(Profile::Zero, 2, 0.6).unwrap();
    let grid = TimeGrid::with_step(1.0, 1e-4).unwrap();
    let tol = 10.0 * grid.dt().sqrt();
    for seed in 0..20 {
        let w = sample_wiener(&grid, 3, &mut derive_stream(seed, 0)).unwrap();
        let p = simulate_gdiff(&c, &[0.0; 3], &frame, &w, &mut derive_stream(seed, 1), 256).unwrap();
        let top = *p.eta.last().unwrap();
        let mut levels: Vec<f64> = (0..20).map(|j| top * j as f64 / 20.0).collect();
        levels.push(top);
        let tc = time_changed_path(&p, &frame, &c, &levels).unwrap();
        assert!(!tc.truncated);
        assert!(tc.normal_residuals.iter().all(|r| r.abs() <= tol));
    }
}

#[test]
fn registry_profiles_validate_on_a_thousand_probes() {
    let probes = generate_probes(2, 1000, 4.0, &mut derive_stream(53, 0));
    for name in ["zero", "constant", "sinusoidal", "mixed"] {
        let c = GdiffCoefficients::from_profile(Profile::by_name(name).unwrap(), 2, 0.5).unwrap();
        let r = validate_coefficients(&c, &probes).unwrap();
        assert!(r.pass, "{name}: {r:?}");
    }
}

#[test]
fn mean_local_time_is_unbiased_for_exact_samples_off_interface() {
    let law = LocalTimeLaw::new(0.7, 2.0).unwrap();
    let mut s = derive_stream(59, 0);
    let v: Vec<f64> = (0..100_000).map(|_| sample_local_time(&law, &mut s)).collect();
    let target = expected_local_time(0.7, 2.0).unwrap();
    assert!(mc_summary(&v).unwrap().agrees_with(target, 0.0));
}
