//! Monte Carlo summaries, empirical CDFs, Kolmogorov–Smirnov distances and
//! the monotone-trend check.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Confidence multiplier applied to the standard error everywhere.
pub const CI_SIGMAS: f64 = 3.0;

/// Relative allowance for the bias of a discretized scheme against its
/// limit law.
pub const SCHEME_ALLOWANCE: f64 = 0.05;

/// Sum with Neumaier compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSummary {
    pub count: usize,
    pub mean: f64,
    pub std_err: f64,
    /// Confidence multiplier (`CI_SIGMAS`).
    pub sigmas: f64,
    pub half_width: f64,
}

impl McSummary {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    /// `|mean - target| <= 3 SE + allowance * |target|`.
    pub fn agrees_with(&self, target: f64, allowance: f64) -> bool {
        (self.mean - target).abs() <= self.half_width + allowance * target.abs()
    }
}

/// Mean, standard error and `3 SE` half-width.
///
/// Samples are summed in sorted order so the result does not depend on
/// the order in which paths were produced.
pub fn mc_summary(samples: &[f64]) -> Result<McSummary> {
    if samples.len() < 2 {
        return invalid(format!("need at least 2 samples, got {}", samples.len()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mean = compensated_sum(sorted.iter().copied()) / m;
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let var = compensated_sum(dev) / (m - 1.0);
    let std_err = (var / m).sqrt();
    Ok(McSummary {
        count: samples.len(),
        mean,
        std_err,
        sigmas: CI_SIGMAS,
        half_width: CI_SIGMAS * std_err,
    })
}

/// Summary of 0/1 indicators.
pub fn proportion_summary(hits: usize, count: usize) -> Result<McSummary> {
    if count < 2 {
        return invalid(format!("need at least 2 samples, got {count}"));
    }
    let m = count as f64;
    let p = hits as f64 / m;
    let var = if count > 1 {
        p * (1.0 - p) * m / (m - 1.0)
    } else {
        0.0
    };
    let std_err = (var / m).sqrt();
    Ok(McSummary {
        count,
        mean: p,
        std_err,
        sigmas: CI_SIGMAS,
        half_width: CI_SIGMAS * std_err,
    })
}

/// A cumulative distribution function that may have atoms.
pub trait Cdf {
    /// `P{X <= x}`.
    fn cdf(&self, x: f64) -> f64;

    /// `P{X < x}`; equals `cdf` for continuous laws.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Points where the CDF may jump, if the law is discrete.
    fn jumps(&self) -> Option<&[f64]> {
        None
    }
}

/// Continuous CDF given by a closure.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Right-continuous step function with jumps `1/M` at the sorted samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return invalid("empirical CDF needs at least one sample");
        }
        if samples.iter().any(|v| v.is_nan()) {
            return invalid("empirical CDF samples contain NaN");
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    fn jumps(&self) -> Option<&[f64]> {
        Some(&self.sorted)
    }
}

/// Sup-distance between `a` and `b`, checked on both sides of every jump
/// of either function.
pub fn ks_distance<B: Cdf + ?Sized>(a: &EmpiricalCdf, b: &B) -> f64 {
    let gap = |x: f64| {
        let right = (a.cdf(x) - b.cdf(x)).abs();
        let left = (a.cdf_left(x) - b.cdf_left(x)).abs();
        right.max(left)
    };
    let mut best = 0.0_f64;
    let mut scan = |points: &[f64]| {
        let mut prev = f64::NAN;
        for &x in points {
            if x != prev {
                best = best.max(gap(x));
                prev = x;
            }
        }
    };
    scan(a.samples());
    if let Some(points) = b.jumps() {
        scan(points);
    }
    best
}

/// 1% critical value of the one-sample KS statistic, asymptotic form.
pub fn ks_critical_1pct(m: usize) -> f64 {
    1.63 / (m as f64).sqrt()
}

/// An estimate with its confidence half-width, ordered by a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendPoint {
    pub value: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendVerdict {
    /// No later point exceeds an earlier one beyond their joint CI.
    pub nonincreasing: bool,
    /// The last point sits below the first beyond their joint CI.
    pub strict_drop: bool,
    pub pass: bool,
}

/// Checks that values decrease along the sequence, up to CI overlap.
pub fn monotone_trend(points: &[TrendPoint]) -> Result<TrendVerdict> {
    if points.len() < 3 {
        return invalid(format!(
            "trend check needs at least 3 points, got {}",
            points.len()
        ));
    }
    // v[j] - h[j] <= v[i] + h[i] for all i < j
    let mut ceiling = f64::INFINITY;
    let mut nonincreasing = true;
    for p in points {
        if p.value - p.half_width > ceiling {
            nonincreasing = false;
        }
        ceiling = ceiling.min(p.value + p.half_width);
    }
    let first = points[0];
    let last = points[points.len() - 1];
    let strict_drop = last.value + last.half_width < first.value - first.half_width;
    Ok(TrendVerdict {
        nonincreasing,
        strict_drop,
        pass: nonincreasing && strict_drop,
    })
}
