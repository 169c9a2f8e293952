//! Normalising coordinate `s` near a critical point: `s^n = (U_s(y0 + x) - c0) / a`.

use crate::error::{RayleighError, Result};
use crate::profiles::{CriticalPoint, ShearProfile};
use crate::series;

/// Below this `|x| / radius` the coordinate is evaluated from its Taylor series at 0.
const SERIES_ZONE: f64 = 1e-3;
const ZERO_SERIES_LEN: usize = 12;

#[derive(Debug, Clone)]
pub struct NormalCoordinate {
    p: ShearProfile,
    pub cp: CriticalPoint,
    /// `U_s^(n)(y0) / n!`.
    pub a: f64,
    /// Half-width of the validity window in `x = y - y0`.
    pub radius: f64,
    /// Coefficients of `(U~/a) / x^n` at `x = 0`, raised to `1/n`.
    zero_series: Vec<f64>,
}

impl NormalCoordinate {
    pub fn new(p: &ShearProfile, cp: CriticalPoint, radius: f64) -> Result<Self> {
        let n = cp.order;
        if n < 1 {
            return Err(RayleighError::InvalidArgument("order must be at least 1".into()));
        }
        let a = p.derivative(cp.y0, n)? / series::factorial(n);
        if a == 0.0 || !a.is_finite() {
            return Err(RayleighError::InvalidArgument(format!("U^({n}) vanishes at y0 = {}", cp.y0)));
        }
        let len = ZERO_SERIES_LEN.min(p.max_order().saturating_sub(n) + 1).max(1);
        let f: Vec<f64> = (0..len)
            .map(|j| p.d(cp.y0, n + j) / (series::factorial(n + j) * a))
            .collect();
        let zero_series = series::powf(&f, 1.0 / n as f64, len);
        let me = Self { p: p.clone(), cp, a, radius, zero_series };
        me.validate()?;
        Ok(me)
    }

    pub fn order(&self) -> usize {
        self.cp.order
    }

    pub fn profile(&self) -> &ShearProfile {
        &self.p
    }

    /// `U~(x) / a` with `U~(x) = U_s(y0 + x) - c0`.
    pub fn u_norm(&self, x: f64) -> f64 {
        (self.p.d(self.cp.y0 + x, 0) - self.cp.c0) / self.a
    }

    /// `U~'(x) / a`.
    pub fn du_norm(&self, x: f64) -> f64 {
        self.p.d(self.cp.y0 + x, 1) / self.a
    }

    fn zero_eval(&self, x: f64) -> (f64, f64) {
        let g = self.zero_series.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let dg = self.zero_series.iter().enumerate().skip(1).rev().fold(0.0, |acc, (j, &c)| acc * x + j as f64 * c);
        (x * g, g + x * dg)
    }

    /// `(s(x), s'(x))`.
    pub fn s_and_ds(&self, x: f64) -> (f64, f64) {
        let n = self.order();
        if n == 1 {
            return (self.u_norm(x), self.du_norm(x));
        }
        if x.abs() < SERIES_ZONE * self.radius {
            return self.zero_eval(x);
        }
        let u = self.u_norm(x);
        let s = x.signum() * u.abs().powf(1.0 / n as f64);
        (s, self.du_norm(x) / (n as f64 * s.powi(n as i32 - 1)))
    }

    pub fn s(&self, x: f64) -> f64 {
        self.s_and_ds(x).0
    }

    /// Taylor coefficients of `h -> s(x + h)`, `len` terms.
    pub fn s_series(&self, x: f64, len: usize) -> Vec<f64> {
        let n = self.order();
        let max = self.p.max_order();
        let f: Vec<f64> = (0..len)
            .map(|j| {
                if j > max {
                    return 0.0;
                }
                let d = self.p.d(self.cp.y0 + x, j) - if j == 0 { self.cp.c0 } else { 0.0 };
                d / (self.a * series::factorial(j))
            })
            .collect();
        if n == 1 {
            return f;
        }
        if x == 0.0 {
            let mut out = vec![0.0; len];
            for j in 1..len {
                out[j] = self.zero_series.get(j - 1).copied().unwrap_or(0.0);
            }
            return out;
        }
        let sigma = f[0].signum();
        let g: Vec<f64> = f.iter().map(|v| v * sigma).collect();
        series::powf(&g, 1.0 / n as f64, len).into_iter().map(|v| v * x.signum()).collect()
    }

    /// `V^(k)(s(x))` for `k < m`, where `V = dx/ds`.
    pub fn v_derivatives(&self, x: f64, m: usize) -> Vec<f64> {
        let mut sser = self.s_series(x, m + 1);
        sser[0] = 0.0;
        let d = series::revert(&sser, m + 1);
        (0..m).map(|k| series::factorial(k) * (k + 1) as f64 * d[k + 1]).collect()
    }

    /// `x` with `s(x) = target`, by bisection refined with Newton steps.
    pub fn x_of_s(&self, target: f64) -> Result<f64> {
        let (lo, hi) = (-self.radius, self.radius);
        let (slo, shi) = (self.s(lo), self.s(hi));
        if target < slo || target > shi {
            return Err(RayleighError::OutsideValidity { y: self.cp.y0 + target, radius: self.radius });
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.s(m) < target {
                a = m;
            } else {
                b = m;
            }
            if b - a < 1e-15 * (1.0 + a.abs()) {
                break;
            }
        }
        let mut x = 0.5 * (a + b);
        for _ in 0..3 {
            let (s, ds) = self.s_and_ds(x);
            if ds > 0.0 {
                x -= (s - target) / ds;
            }
        }
        Ok(x)
    }

    fn validate(&self) -> Result<()> {
        let m = 400;
        for i in 0..=m {
            let x = -self.radius + 2.0 * self.radius * i as f64 / m as f64;
            if !self.p.domain().contains(self.cp.y0 + x) {
                return Err(RayleighError::OutsideDomain { y: self.cp.y0 + x, domain: self.p.domain().to_string() });
            }
            let (_, ds) = self.s_and_ds(x);
            if !(ds > 0.0) || !ds.is_finite() {
                return Err(RayleighError::OutsideValidity { y: self.cp.y0 + x, radius: self.radius });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Domain;

    #[test]
    fn power_profile_is_its_own_coordinate() {
        let p = ShearProfile::power(3);
        let nc = NormalCoordinate::new(&p, CriticalPoint::new(0.0, 0.0, 3), 0.3).unwrap();
        for x in [-0.2, -1e-5, 0.0, 0.1] {
            let (s, ds) = nc.s_and_ds(x);
            assert!((s - x).abs() < 1e-15 && (ds - 1.0).abs() < 1e-12);
        }
        let v = nc.v_derivatives(0.05, 4);
        assert!((v[0] - 1.0).abs() < 1e-12 && v[1].abs() < 1e-10);
    }

    #[test]
    fn inverse_derivatives_match_finite_differences() {
        // U = y^2 (1 + y): V = dx/ds, check V' by differencing x(s).
        let p = ShearProfile::power_with_correction(2, &[1.0], Domain::Line);
        let nc = NormalCoordinate::new(&p, CriticalPoint::new(0.0, 0.0, 2), 0.3).unwrap();
        let x0 = 0.07;
        let s0 = nc.s(x0);
        let v = nc.v_derivatives(x0, 3);
        let h = 1e-4;
        let xp = nc.x_of_s(s0 + h).unwrap();
        let xm = nc.x_of_s(s0 - h).unwrap();
        assert!((v[0] - (xp - xm) / (2.0 * h)).abs() < 1e-7);
        assert!((v[1] - (xp - 2.0 * x0 + xm) / (h * h)).abs() < 1e-5);
        // Negative side, and continuity of s' through the series zone.
        // s = x sqrt(1 + x) exactly.
        for x in [-2.9e-4, -3.1e-4, 0.2] {
            let (s, ds) = nc.s_and_ds(x);
            let r = (1.0f64 + x).sqrt();
            assert!((s - x * r).abs() < 1e-15);
            assert!((ds - (r + x / (2.0 * r))).abs() < 1e-9, "{x}");
        }
    }
}
