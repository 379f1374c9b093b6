use serde::Serialize;

use super::{limit_sigma, simulate_sbm, simulate_sbm_transformed, space_map, SbmParams};
use crate::error::{Error, Result};
use crate::mc::Ensemble;
use crate::stats::{compensated_sum, ks_distance, EmpiricalCdf};

/// Pooled quadratic variation of `y = space_map(q, x)` along mollified paths
/// against `int sigma(y)^2 dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticVariationReport {
    pub quadratic_variation: f64,
    pub sigma_integral: f64,
    pub ratio: f64,
}

fn check_skew(q: f64) -> Result<()> {
    if !(q.abs() < 1.0) || q == 0.0 {
        return Err(Error::Domain(format!(
            "transform checks need a mollified path, 0 < |q| < 1, got {q}"
        )));
    }
    Ok(())
}

pub fn quadratic_variation_check(
    q: f64,
    x0: f64,
    ens: &Ensemble,
    n: u32,
) -> Result<QuadraticVariationReport> {
    check_skew(q)?;
    let p = SbmParams::new(q, x0, n)?;
    let dt = ens.grid.dt();
    let per_path = ens.map(|i| {
        let path = simulate_sbm(&p, &ens.wiener(i, 1)?)?;
        let y: Vec<f64> = path.x.iter().map(|&x| space_map(q, x)).collect();
        let qv = compensated_sum(y.windows(2).map(|w| (w[1] - w[0]).powi(2)));
        let integral = compensated_sum(y[..y.len() - 1].iter().map(|&v| limit_sigma(q, v).powi(2) * dt));
        Ok((qv, integral))
    })?;
    let quadratic_variation = compensated_sum(per_path.iter().map(|p| p.0));
    let sigma_integral = compensated_sum(per_path.iter().map(|p| p.1));
    Ok(QuadraticVariationReport {
        quadratic_variation,
        sigma_integral,
        ratio: quadratic_variation / sigma_integral,
    })
}

/// KS distance between terminal values of the mollified scheme and of the
/// Euler scheme for `dy = sigma(y) dw` mapped back to `x`. Both read the same
/// driver on each path, as the transform prescribes.
pub fn cross_scheme_ks(q: f64, x0: f64, ens: &Ensemble, n: u32) -> Result<f64> {
    check_skew(q)?;
    let p = SbmParams::new(q, x0, n)?;
    let ends = ens.map(|i| {
        let w = ens.wiener(i, 1)?;
        let a = simulate_sbm(&p, &w)?.terminal_x();
        let b = *simulate_sbm_transformed(q, x0, &w)?
            .last()
            .expect("nonempty path");
        Ok((a, b))
    })?;
    let a = EmpiricalCdf::new(ends.iter().map(|e| e.0).collect())?;
    let b = EmpiricalCdf::new(ends.iter().map(|e| e.1).collect())?;
    Ok(ks_distance(&a, &b))
}
