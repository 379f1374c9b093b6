//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{invalid, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (Piece, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let resasc = resasc * half.abs();
    let value = resk * half;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let resabs = resabs * half.abs();
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    (Piece { a, b, value, error }, resabs)
}

/// Integrates `f` over `[a, b]` to relative accuracy `rel_tol`.
///
/// The integration range is bisected where the local Kronrod error is
/// largest until the summed error estimate falls below
/// `rel_tol * |integral|` (or the round-off floor of the rule).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return invalid(format!(
            "integration bounds [{a}, {b}] must be finite with a <= b"
        ));
    }
    if !(rel_tol > 0.0) {
        return invalid(format!("rel_tol must be positive, got {rel_tol}"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (first, first_abs) = kronrod15(&f, a, b);
    if !first.value.is_finite() {
        return Err(Error::NumericFailure(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mut pieces = vec![first];
    let mut abs_total = first_abs;
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        let floor = 50.0 * f64::EPSILON * abs_total;
        if err <= rel_tol * total.abs() || err <= floor {
            return Ok(total);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::NumericFailure(format!(
                "quadrature on [{a}, {b}] stalled at error {err:e} (value {total})"
            )));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::NumericFailure(format!(
                "quadrature interval near {mid} cannot be bisected further"
            )));
        }
        let (left, la) = kronrod15(&f, p.a, mid);
        let (right, ra) = kronrod15(&f, mid, p.b);
        if !(left.value.is_finite() && right.value.is_finite()) {
            return Err(Error::NumericFailure(format!(
                "integrand is not finite near {mid}"
            )));
        }
        abs_total += la + ra;
        pieces.push(left);
        pieces.push(right);
    }
}
