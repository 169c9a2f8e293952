//! Shear profiles `U_s(y)` with analytic derivatives, plus critical-point
//! location and order classification.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{RayleighError, Result};

/// Highest derivative order tried by [`classify_order`].
pub const ORDER_CAP: usize = 8;

const DOMAIN_SLACK: f64 = 1e-12;

/// Interval on which a profile is posed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `[0, +inf)`
    HalfLine,
    /// `[lo, hi]`
    Interval { lo: f64, hi: f64 },
    /// The whole real line (used for local models such as `y^n`).
    Line,
}

impl Domain {
    pub fn contains(&self, y: f64) -> bool {
        if !y.is_finite() {
            return false;
        }
        match *self {
            Domain::HalfLine => y >= -DOMAIN_SLACK,
            Domain::Interval { lo, hi } => y >= lo - DOMAIN_SLACK && y <= hi + DOMAIN_SLACK,
            Domain::Line => true,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::HalfLine => write!(f, "[0, inf)"),
            Domain::Interval { lo, hi } => write!(f, "[{lo}, {hi}]"),
            Domain::Line => write!(f, "(-inf, inf)"),
        }
    }
}

/// Derivative callback of a user profile: `(y, k) -> d^k U_s / dy^k`.
pub type DerivativeFn = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// Ascending coefficients.
    Polynomial(Vec<f64>),
    /// `offset + amplitude * exp(-rate * y)`
    Exponential { amplitude: f64, rate: f64, offset: f64 },
    /// `offset + amplitude * tanh(scale * (y - shift))`
    Tanh { amplitude: f64, scale: f64, shift: f64, offset: f64 },
    Custom { f: DerivativeFn, max_order: usize },
}

/// An immutable shear profile.
#[derive(Clone)]
pub struct ShearProfile {
    kind: Kind,
    domain: Domain,
    u_plus: f64,
    decay_rate: f64,
    name: String,
}

impl fmt::Debug for ShearProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShearProfile")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("u_plus", &self.u_plus)
            .field("decay_rate", &self.decay_rate)
            .finish()
    }
}

impl ShearProfile {
    /// `U_s(y) = y^n` on the whole line.
    pub fn power(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self::polynomial(coeffs, Domain::Line).with_name(format!("power:n={n}"))
    }

    /// Polynomial with ascending coefficients.
    pub fn polynomial(coeffs: Vec<f64>, domain: Domain) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        let u_plus = coeffs[0];
        Self {
            name: format!("poly:{coeffs:?}"),
            kind: Kind::Polynomial(coeffs),
            domain,
            u_plus,
            decay_rate: 1.0,
        }
    }

    /// `U_s = y^n (1 + y W(y))` with `W` a polynomial (ascending coefficients).
    pub fn power_with_correction(n: usize, w: &[f64], domain: Domain) -> Self {
        let mut coeffs = vec![0.0; n + 1 + w.len()];
        coeffs[n] = 1.0;
        for (j, &wj) in w.iter().enumerate() {
            coeffs[n + 1 + j] += wj;
        }
        Self::polynomial(coeffs, domain).with_name(format!("power:n={n},w={w:?}"))
    }

    /// Even polynomial in `y` on `[-1, 1]`: `sum_j coeffs[j] y^(2j)`.
    pub fn even_polynomial(coeffs: &[f64]) -> Self {
        let mut full = vec![0.0; 2 * coeffs.len().max(1) - 1];
        for (j, &cj) in coeffs.iter().enumerate() {
            full[2 * j] = cj;
        }
        Self::polynomial(full, Domain::Interval { lo: -1.0, hi: 1.0 })
            .with_name(format!("even_poly:{coeffs:?}"))
    }

    /// `U_s ≡ 0` on the half-line (the free case).
    pub fn zero() -> Self {
        Self::polynomial(vec![0.0], Domain::HalfLine)
            .with_name("zero".into())
            .with_decay_rate(1.0)
    }

    /// `offset + amplitude * exp(-rate * y)` on the half-line.
    pub fn exponential(amplitude: f64, rate: f64, offset: f64) -> Self {
        Self {
            kind: Kind::Exponential { amplitude, rate, offset },
            domain: Domain::HalfLine,
            u_plus: offset,
            decay_rate: rate,
            name: format!("exp:amp={amplitude},rate={rate},offset={offset}"),
        }
    }

    /// `exp(-y)`.
    pub fn exp_decay() -> Self {
        Self::exponential(1.0, 1.0, 0.0).with_name("exp_decay".into())
    }

    /// `offset + amplitude * tanh(scale * (y - shift))`.
    pub fn tanh(amplitude: f64, scale: f64, shift: f64, offset: f64, domain: Domain) -> Self {
        Self {
            kind: Kind::Tanh { amplitude, scale, shift, offset },
            domain,
            u_plus: offset + amplitude * scale.signum(),
            decay_rate: 2.0 * scale.abs(),
            name: format!("tanh:amp={amplitude},scale={scale},shift={shift},offset={offset}"),
        }
    }

    /// User profile given by a derivative callback valid up to `max_order`.
    pub fn custom(f: DerivativeFn, max_order: usize, domain: Domain, u_plus: f64, decay_rate: f64) -> Self {
        Self {
            kind: Kind::Custom { f, max_order },
            domain,
            u_plus,
            decay_rate,
            name: "custom".into(),
        }
    }

    pub fn with_name(mut self, name: String) -> Self {
        self.name = name;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_u_plus(mut self, u_plus: f64) -> Self {
        self.u_plus = u_plus;
        self
    }

    pub fn with_decay_rate(mut self, rate: f64) -> Self {
        self.decay_rate = rate;
        self
    }

    /// Scale the profile, `U_s -> lambda U_s`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let kind = match &self.kind {
            Kind::Polynomial(c) => Kind::Polynomial(c.iter().map(|x| x * lambda).collect()),
            Kind::Exponential { amplitude, rate, offset } => Kind::Exponential {
                amplitude: amplitude * lambda,
                rate: *rate,
                offset: offset * lambda,
            },
            Kind::Tanh { amplitude, scale, shift, offset } => Kind::Tanh {
                amplitude: amplitude * lambda,
                scale: *scale,
                shift: *shift,
                offset: offset * lambda,
            },
            Kind::Custom { f, max_order } => {
                let f = f.clone();
                Kind::Custom { f: Arc::new(move |y, k| lambda * f(y, k)), max_order: *max_order }
            }
        };
        Self {
            kind,
            domain: self.domain,
            u_plus: self.u_plus * lambda,
            decay_rate: self.decay_rate,
            name: format!("{}*{lambda}", self.name),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Limit of `U_s` at the right end of the half-line.
    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Highest derivative order this profile can evaluate.
    pub fn max_order(&self) -> usize {
        match &self.kind {
            Kind::Polynomial(_) | Kind::Exponential { .. } => 64,
            Kind::Tanh { .. } => 24,
            Kind::Custom { max_order, .. } => *max_order,
        }
    }

    pub fn has_complex_extension(&self) -> bool {
        !matches!(self.kind, Kind::Custom { .. })
    }

    /// `d^k U_s / dy^k` at `y`, checked against domain and order.
    pub fn derivative(&self, y: f64, k: usize) -> Result<f64> {
        if k > self.max_order() {
            return Err(RayleighError::UnsupportedDerivative { order: k, max: self.max_order() });
        }
        if !self.domain.contains(y) {
            return Err(RayleighError::OutsideDomain { y, domain: self.domain.to_string() });
        }
        Ok(self.d(y, k))
    }

    /// Unchecked derivative; the profile formula is evaluated wherever it is defined.
    pub(crate) fn d(&self, y: f64, k: usize) -> f64 {
        match &self.kind {
            Kind::Polynomial(c) => poly_derivative(c, y, k),
            Kind::Exponential { amplitude, rate, offset } => {
                let base = amplitude * (-rate).powi(k as i32) * (-rate * y).exp();
                if k == 0 {
                    base + offset
                } else {
                    base
                }
            }
            Kind::Tanh { amplitude, scale, shift, offset } => {
                let t = (scale * (y - shift)).tanh();
                let p = tanh_derivative_poly(k);
                let v = amplitude * scale.powi(k as i32) * p.iter().rev().fold(0.0, |acc, &c| acc * t + c);
                if k == 0 {
                    v + offset
                } else {
                    v
                }
            }
            Kind::Custom { f, .. } => f(y, k),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.d(y, 0)
    }

    /// `(U, U', U'')` at `y`.
    pub(crate) fn triple(&self, y: f64) -> (f64, f64, f64) {
        (self.d(y, 0), self.d(y, 1), self.d(y, 2))
    }

    /// Analytic continuation of `d^k U_s` to complex `z` (built-in profiles only).
    pub fn derivative_complex(&self, z: Complex64, k: usize) -> Result<Complex64> {
        match &self.kind {
            Kind::Polynomial(c) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in (k..c.len()).rev() {
                    let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
                    acc = acc * z + c[j] * falling;
                }
                Ok(acc)
            }
            Kind::Exponential { amplitude, rate, offset } => {
                let base = (-rate * z).exp() * (amplitude * (-rate).powi(k as i32));
                Ok(if k == 0 { base + offset } else { base })
            }
            Kind::Tanh { amplitude, scale, shift, offset } => {
                let t = ((z - shift) * *scale).tanh();
                let p = tanh_derivative_poly(k);
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in p.iter().rev() {
                    acc = acc * t + c;
                }
                let v = acc * (amplitude * scale.powi(k as i32));
                Ok(if k == 0 { v + offset } else { v })
            }
            Kind::Custom { .. } => Err(RayleighError::NoComplexExtension),
        }
    }
}

/// `k`-th derivative of the polynomial with ascending coefficients `c`.
pub(crate) fn poly_derivative(c: &[f64], y: f64, k: usize) -> f64 {
    let mut acc = 0.0;
    for j in (k..c.len()).rev() {
        let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
        acc = acc * y + c[j] * falling;
    }
    acc
}

/// Coefficients (in `T = tanh x`) of `d^k tanh(x) / dx^k`.
fn tanh_derivative_poly(k: usize) -> Vec<f64> {
    let mut p = vec![0.0, 1.0];
    for _ in 0..k {
        // d/dx P(T) = P'(T) (1 - T^2)
        let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect();
        let mut next = vec![0.0; dp.len() + 2];
        for (j, &c) in dp.iter().enumerate() {
            next[j] += c;
            next[j + 2] -= c;
        }
        p = next;
    }
    p
}

/// `∂_y^k U_s(y)`, the checked public evaluator.
pub fn eval_profile(p: &ShearProfile, y: f64, k: usize) -> Result<f64> {
    p.derivative(y, k)
}

/// A point `(y0, c0)` with `U_s(y0) = c0` and order `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub y0: f64,
    pub c0: f64,
    pub order: usize,
}

impl CriticalPoint {
    pub fn new(y0: f64, c0: f64, order: usize) -> Self {
        Self { y0, c0, order }
    }
}

/// Smallest `n >= 1` with `|∂^n U_s(y0)| > tol` while lower derivatives are `<= tol`.
///
/// The tolerance is relative: a derivative counts as vanishing when it is at
/// most `tol * max(1, m)` where `m` is the largest of `|∂^k U_s(y0)|`,
/// `k = 1..=ORDER_CAP`.
pub fn classify_order(p: &ShearProfile, y0: f64, tol: f64) -> Result<usize> {
    let cap = ORDER_CAP.min(p.max_order());
    let derivs: Vec<f64> = (1..=cap).map(|k| p.derivative(y0, k)).collect::<Result<_>>()?;
    let scale = derivs.iter().fold(1.0f64, |m, d| m.max(d.abs()));
    derivs
        .iter()
        .position(|d| d.abs() > tol * scale)
        .map(|i| i + 1)
        .ok_or(RayleighError::DegenerateBeyondCap { y0, cap })
}

/// Default tolerance used by [`find_critical_points`].
pub const ORDER_TOL: f64 = 1e-9;

/// All real roots of `U_s(y) = c` in `window`, with their orders, sorted by `y`.
///
/// Returns an empty list when `Im c != 0`. Sign changes are refined by
/// bisection; tangential roots are found as zeros of `U_s'` at which
/// `U_s - c` vanishes.
pub fn find_critical_points(p: &ShearProfile, c: Complex64, window: (f64, f64)) -> Result<Vec<CriticalPoint>> {
    if c.im != 0.0 {
        return Ok(Vec::new());
    }
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(RayleighError::InvalidArgument(format!("empty window [{lo}, {hi}]")));
    }
    for y in [lo, hi] {
        if !p.domain().contains(y) {
            return Err(RayleighError::OutsideDomain { y, domain: p.domain().to_string() });
        }
    }
    let c = c.re;
    let m = (((hi - lo) / 1e-4).ceil() as usize).clamp(1000, 200_000);
    let step = (hi - lo) / m as f64;
    let ys: Vec<f64> = (0..=m).map(|i| lo + step * i as f64).collect();
    let g: Vec<f64> = ys.iter().map(|&y| p.d(y, 0) - c).collect();
    let dg: Vec<f64> = ys.iter().map(|&y| p.d(y, 1)).collect();
    let scale = g.iter().fold(c.abs().max(1.0), |a, b| a.max(b.abs() + c.abs()));
    let zero_tol = 1e-12 * scale;
    let near_tol = 1e-7 * scale;

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..m {
        if g[i] == 0.0 {
            roots.push(ys[i]);
            continue;
        }
        if g[i] * g[i + 1] < 0.0 {
            roots.push(bisect(|y| p.d(y, 0) - c, ys[i], ys[i + 1])?);
        } else if dg[i] * dg[i + 1] < 0.0 {
            // Local extremum of U_s - c: possible tangency.
            let ys_ext = bisect(|y| p.d(y, 1), ys[i], ys[i + 1])?;
            let gv = p.d(ys_ext, 0) - c;
            if gv.abs() <= zero_tol {
                roots.push(ys_ext);
            } else if gv.abs() <= near_tol && g[i] * gv > 0.0 {
                return Err(RayleighError::BracketFailure {
                    y: ys_ext,
                    reason: format!("near-tangency with |U_s - c| = {:.3e} cannot be resolved", gv.abs()),
                });
            }
        }
    }
    if g[m] == 0.0 {
        roots.push(ys[m]);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 2.0 * step);

    roots
        .into_iter()
        .map(|y0| {
            let order = classify_order(p, y0, ORDER_TOL)?;
            Ok(CriticalPoint { y0, c0: c, order })
        })
        .collect()
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(RayleighError::BracketFailure { y: a, reason: "no sign change".into() });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(RayleighError::BracketFailure { y: mid, reason: "non-finite value".into() });
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivative() {
        let p = ShearProfile::power(2);
        assert_eq!(eval_profile(&p, 0.5, 1).unwrap(), 1.0);
        assert_eq!(eval_profile(&p, 0.5, 3).unwrap(), 0.0);
    }

    #[test]
    fn exp_value_at_zero() {
        let p = ShearProfile::exp_decay();
        assert_eq!(eval_profile(&p, 0.0, 0).unwrap(), 1.0);
        assert!(matches!(eval_profile(&p, -1.0, 0), Err(RayleighError::OutsideDomain { .. })));
    }

    #[test]
    fn tanh_second_derivative_vanishes_at_center() {
        let p = ShearProfile::tanh(1.0, 1.0, 1.0, 0.0, Domain::Line);
        let v = eval_profile(&p, 1.0, 2).unwrap();
        let h = 1e-4;
        let fd = (p.value(1.0 + h) - 2.0 * p.value(1.0) + p.value(1.0 - h)) / (h * h);
        assert!(v.abs() < 1e-15);
        assert!((v - fd).abs() < 1e-6);
        // third derivative: -2 sech^2 (1 - 3 tanh^2) at 0 -> -2
        assert!((p.d(1.0, 3) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn derivatives_consistent_with_finite_differences() {
        let profiles = [
            ShearProfile::exp_decay(),
            ShearProfile::tanh(0.7, 1.3, 0.4, 0.1, Domain::HalfLine),
            ShearProfile::power_with_correction(2, &[1.0, -0.5], Domain::Line),
        ];
        let h = 1e-5;
        for p in &profiles {
            for &y in &[0.3, 0.9, 1.7] {
                for k in 1..5 {
                    let fd = (p.d(y + h, k - 1) - p.d(y - h, k - 1)) / (2.0 * h);
                    let an = p.d(y, k);
                    assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "{} k={k} y={y}", p.name());
                }
            }
        }
    }

    #[test]
    fn complex_extension_agrees_on_real_axis() {
        let p = ShearProfile::tanh(0.7, 1.3, 0.4, 0.1, Domain::Line);
        for k in 0..5 {
            let z = p.derivative_complex(Complex64::new(0.8, 0.0), k).unwrap();
            assert!((z.re - p.d(0.8, k)).abs() < 1e-13 && z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn unsupported_order() {
        let f: DerivativeFn = Arc::new(|y, _| y);
        let p = ShearProfile::custom(f, 2, Domain::Line, 0.0, 1.0);
        assert!(matches!(p.derivative(0.0, 3), Err(RayleighError::UnsupportedDerivative { .. })));
    }

    #[test]
    fn critical_points_examples() {
        let cps = find_critical_points(&ShearProfile::power(3), Complex64::new(0.0, 0.0), (-1.0, 1.0)).unwrap();
        assert_eq!(cps.len(), 1);
        assert!(cps[0].y0.abs() < 1e-6);
        assert_eq!(cps[0].order, 3);

        let cps = find_critical_points(&ShearProfile::power(1), Complex64::new(0.3, 0.0), (0.0, 1.0)).unwrap();
        assert_eq!(cps.len(), 1);
        assert!((cps[0].y0 - 0.3).abs() < 1e-14);
        assert_eq!(cps[0].order, 1);

        let p = ShearProfile::power_with_correction(2, &[1.0], Domain::Line);
        let cps = find_critical_points(&p, Complex64::new(0.01, 0.0), (0.0, 1.0)).unwrap();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].order, 1);
        // Independent root finder on y^2 (1 + y) - 0.01.
        assert!((cps[0].y0 - 0.095_540_135_658_747_6).abs() < 1e-12);
        assert!((p.value(cps[0].y0) - 0.01).abs() < 1e-14);

        assert!(find_critical_points(&p, Complex64::new(0.01, 1e-3), (0.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn tangential_root_is_found() {
        let p = ShearProfile::power(2);
        // Grid does not contain 0 exactly.
        let cps = find_critical_points(&p, Complex64::new(0.0, 0.0), (-0.333, 0.777)).unwrap();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].order, 2);
    }

    #[test]
    fn order_classification() {
        assert_eq!(classify_order(&ShearProfile::power(2), 0.0, ORDER_TOL).unwrap(), 2);
        assert_eq!(classify_order(&ShearProfile::power(1), 0.0, ORDER_TOL).unwrap(), 1);
        let p = ShearProfile::polynomial(vec![0.0, 0.0, 0.0, 1.0, 0.0, 1.0], Domain::Line);
        assert_eq!(classify_order(&p, 0.0, ORDER_TOL).unwrap(), 3);
        let flat = ShearProfile::polynomial(vec![1.0], Domain::Line);
        assert!(matches!(classify_order(&flat, 0.0, ORDER_TOL), Err(RayleighError::DegenerateBeyondCap { .. })));
    }

    #[test]
    fn order_invariant_under_scaling() {
        let p = ShearProfile::polynomial(vec![0.0, 0.0, 0.0, 1.0, 0.0, 1.0], Domain::Line);
        for lambda in [0.5, 2.0, 10.0] {
            assert_eq!(classify_order(&p.scaled(lambda), 0.0, ORDER_TOL).unwrap(), 3);
        }
    }
}
