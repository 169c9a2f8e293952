//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{RayleighError, Result};

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
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`quad`]: the estimate must satisfy `err <= max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8, max_intervals: 4000 }
    }
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(RayleighError::QuadratureFailure { a, b, estimate: f64::INFINITY });
    }
    Ok((value, error))
}

/// Adaptive quadrature of a fallible integrand over `[a, b]`.
pub fn quad_try<F>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    quad_points_try(&mut f, &[a, b], tol)
}

/// Adaptive quadrature over `[a, b]`.
pub fn quad<F>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    quad_try(|x| Ok(f(x)), a, b, tol)
}

/// Real integrand convenience wrapper.
pub fn quad_real<F>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = quad(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok((r.value.re, r.error))
}

/// Adaptive quadrature with initial breakpoints (`points` sorted, first and last are the limits).
pub fn quad_points_try<F>(f: &mut F, points: &[f64], tol: QuadTol) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    assert!(points.len() >= 2);
    let (a0, b0) = (points[0], points[points.len() - 1]);
    if a0 == b0 {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let mut segs = Vec::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, error) = gk15(f, w[0], w[1])?;
        evaluations += 15;
        segs.push(Segment { a: w[0], b: w[1], value, error });
    }
    loop {
        let total: Complex64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= tol.abs.max(tol.rel * total.norm()) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if segs.len() >= tol.max_intervals {
            return Err(RayleighError::QuadratureFailure { a: a0, b: b0, estimate: err });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .unwrap();
        let s = segs.swap_remove(idx);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            return Err(RayleighError::QuadratureFailure { a: a0, b: b0, estimate: err });
        }
        let (v1, e1) = gk15(f, s.a, mid)?;
        let (v2, e2) = gk15(f, mid, s.b)?;
        evaluations += 30;
        segs.push(Segment { a: s.a, b: mid, value: v1, error: e1 });
        segs.push(Segment { a: mid, b: s.b, value: v2, error: e2 });
    }
}
