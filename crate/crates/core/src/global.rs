//! Global solutions on the half-line, the Miles-Riccati variable and the dispersion ratio,
//! and the even solution on `[-1, 1]`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::branch::{BranchMeta, LogBranch, Method, SolutionBranch};
use crate::error::{RayleighError, Result};
use crate::grid::{graded_breakpoints, PanelGrid};
use crate::oracle::ode::{self, State};
use crate::oracle::{quad, quad_try, OdeOptions, QuadTol};
use crate::profiles::{find_critical_points, ShearProfile};

type C = Complex64;

/// Hard cap on the truncation point of the half-line.
pub const Y_MAX_CAP: f64 = 200.0;

/// `min(12 / decay + 6 / alpha, 200)`.
pub fn default_y_max(p: &ShearProfile, alpha: f64) -> f64 {
    (12.0 / p.decay_rate() + 6.0 / alpha.abs()).min(Y_MAX_CAP)
}

fn ode_options() -> OdeOptions {
    OdeOptions::tight()
}

fn refuse_real_layer(p: &ShearProfile, c: C, lo: f64, hi: f64) -> Result<()> {
    if c.im == 0.0 {
        if let Some(cp) = find_critical_points(p, c, (lo, hi))?.first() {
            return Err(RayleighError::RealCriticalLayer { y: cp.y0 });
        }
    }
    Ok(())
}

fn rayleigh_rhs(p: ShearProfile, alpha: f64, c: C) -> impl Fn(f64, &State<2>) -> Result<State<2>> + Send + Sync {
    let a2 = alpha * alpha;
    move |y, s| {
        let w = p.d(y, 0) - c;
        if w.norm() == 0.0 {
            return Err(RayleighError::Pole { y, denominator: 0.0 });
        }
        Ok([s[1], s[0] * (a2 + p.d(y, 2) / w)])
    }
}

/// Branch backed by an ODE trajectory between `a` and `b`.
fn integrated_branch(p: &ShearProfile, alpha: f64, c: C, a: f64, init: (C, C), b: f64, note: &str) -> Result<SolutionBranch> {
    let rhs = rayleigh_rhs(p.clone(), alpha, c);
    let traj = ode::solve(&rhs, a, [init.0, init.1], b, &ode_options())?;
    let data = Arc::new((traj, rhs));
    Ok(SolutionBranch::from_fn(
        move |y| {
            let s = data.0.eval(&data.1, y)?;
            Ok((s[0], s[1]))
        },
        LogBranch::None,
        BranchMeta::new(c, alpha, Method::Integrated).note(note),
        (a.min(b), a.max(b)),
    ))
}

/// Decaying solution `~ e^{-alpha y}`, normalised by `psi(y_max) e^{alpha y_max} = 1`.
pub fn decaying_solution(p: &ShearProfile, alpha: f64, c: C, y_max: Option<f64>) -> Result<SolutionBranch> {
    if !(alpha > 0.0) {
        return Err(RayleighError::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let y_max = y_max.unwrap_or_else(|| default_y_max(p, alpha));
    refuse_real_layer(p, c, 0.0, y_max)?;
    // One Duhamel sweep past y_max: psi = e^{-ay} + int_y^inf sinh(a(z-y))/a V(z) e^{-az} dz.
    let v = |z: f64| p.d(z, 2) / (p.d(z, 0) - c);
    let tail_end = y_max + 40.0 / p.decay_rate();
    let tol = QuadTol::new(1e-16, 1e-12);
    let e = (-alpha * y_max).exp();
    let d0 = quad(|z| v(z) * (e - (-alpha * (2.0 * z - y_max)).exp()) / (2.0 * alpha), y_max, tail_end, tol)?;
    let d1 = quad(|z| -v(z) * (e + (-alpha * (2.0 * z - y_max)).exp()) * 0.5, y_max, tail_end, tol)?;
    let init = (C::new(e, 0.0) + d0.value, C::new(-alpha * e, 0.0) + d1.value);
    let scale = e / init.0;
    let init = (init.0 * scale, init.1 * scale);
    integrated_branch(p, alpha, c, y_max, init, 0.0, "decaying at infinity")
}

#[derive(Debug, Clone)]
pub struct GlobalPair {
    pub psi_minus: SolutionBranch,
    pub psi_plus: SolutionBranch,
    /// `psi_- psi_+' - psi_-' psi_+`.
    pub wronskian: C,
    pub y_max: f64,
    pub alpha: f64,
    pub c: C,
}

/// `psi_-` from infinity and a growing `psi_+` with unit Wronskian.
pub fn global_pair(p: &ShearProfile, alpha: f64, c: C, y_max: Option<f64>) -> Result<GlobalPair> {
    let y_max = y_max.unwrap_or_else(|| default_y_max(p, alpha));
    let psi_minus = decaying_solution(p, alpha, c, Some(y_max))?;
    let (m0, m1) = psi_minus.eval(0.0)?;
    let n = m0.norm_sqr() + m1.norm_sqr();
    let init = (-m1.conj() / n, m0.conj() / n);
    let psi_plus = integrated_branch(p, alpha, c, 0.0, init, y_max, "unit Wronskian with psi_-")?;
    Ok(GlobalPair { psi_minus, psi_plus, wronskian: C::new(1.0, 0.0), y_max, alpha, c })
}

/// `Omega = psi / ((U - c)[U' psi - (U - c) psi'])`.
pub fn miles_omega(branch: &SolutionBranch, p: &ShearProfile, c: C, y: f64) -> Result<C> {
    let (v, d) = branch.eval(y)?;
    let w = p.d(y, 0) - c;
    let inner = v * p.d(y, 1) - w * d;
    let den = w * inner;
    let scale = w.norm() * (v.norm() * p.d(y, 1).abs() + w.norm() * d.norm());
    if den.norm() <= 1e-14 * scale || den.norm() == 0.0 {
        return Err(RayleighError::Pole { y, denominator: den.norm() });
    }
    Ok(v / den)
}

/// `-(U+ - c)^{-2} int_y^inf [(U - c)^2/(U+ - c)^2 - (U+ - c)^2/(U - c)^2] dz`.
pub fn omega0(p: &ShearProfile, c: C, y: f64) -> Result<C> {
    omega0_truncated(p, c, y, y.max(0.0) + 40.0 / p.decay_rate())
}

/// `omega0` with the integral cut at `end`.
pub fn omega0_truncated(p: &ShearProfile, c: C, y: f64, end: f64) -> Result<C> {
    refuse_real_layer(p, c, y, end)?;
    let up = p.u_plus() - c;
    let up2 = up * up;
    let f = |z: f64| {
        let w = p.d(z, 0) - c;
        let y2 = w * w;
        Ok(y2 / up2 - up2 / y2)
    };
    let mut pts: Vec<f64> = (0..=16).map(|k| y + (end - y) * k as f64 / 16.0).collect();
    if c.im.abs() < 0.05 {
        // Break at the nearby real critical layers so the adaptive rule sees the peaks.
        for cp in crate::profiles::find_critical_points(p, C::new(c.re, 0.0), (y.min(end), y.max(end)))? {
            pts.push(cp.y0);
        }
        pts.sort_by(|a, b| if end >= y { a.total_cmp(b) } else { b.total_cmp(a) });
    }
    let mut g = f;
    let r = crate::oracle::quadrature::quad_points_try(&mut g, &pts, QuadTol::new(1e-13, 1e-10))?;
    Ok(-r.value / up2)
}

/// `Omega`, `Omega_0` and the correction `theta_1 = Omega - 1/(alpha (U+ - c)^2) - Omega_0` along `psi_-`.
#[derive(Debug, Clone)]
pub struct RiccatiState {
    pub psi_minus: SolutionBranch,
    p: ShearProfile,
    pub alpha: f64,
    pub c: C,
}

impl RiccatiState {
    pub fn new(p: &ShearProfile, alpha: f64, c: C, y_max: Option<f64>) -> Result<Self> {
        Ok(Self { psi_minus: decaying_solution(p, alpha, c, y_max)?, p: p.clone(), alpha, c })
    }

    pub fn y_max(&self) -> f64 {
        self.psi_minus.range.1
    }

    pub fn omega_big(&self, y: f64) -> Result<C> {
        miles_omega(&self.psi_minus, &self.p, self.c, y)
    }

    pub fn omega_limit(&self) -> C {
        let up = self.p.u_plus() - self.c;
        1.0 / (up * up * self.alpha)
    }

    pub fn omega0(&self, y: f64) -> Result<C> {
        omega0(&self.p, self.c, y)
    }

    pub fn theta_corr(&self, y: f64) -> Result<C> {
        Ok(self.omega_big(y)? - self.omega_limit() - self.omega0(y)?)
    }

    /// `|Omega' - alpha^2 Y Omega^2 + 1/Y|` with a central difference of step `h`.
    pub fn riccati_residual(&self, y: f64, h: f64) -> Result<f64> {
        let d = (self.omega_big(y + h)? - self.omega_big(y - h)?) / (2.0 * h);
        let o = self.omega_big(y)?;
        let w = self.p.d(y, 0) - self.c;
        let yy = w * w;
        Ok((d - o * o * yy * (self.alpha * self.alpha) + 1.0 / yy).norm())
    }
}

/// `psi_-'(0) / psi_-(0)`.
pub fn dispersion_ratio(p: &ShearProfile, alpha: f64, c: C, y_max: Option<f64>) -> Result<C> {
    let b = decaying_solution(p, alpha, c, y_max)?;
    ratio_of(&b, alpha)
}

/// Log-derivative at 0 of any multiple of `psi_-`.
pub fn ratio_of(b: &SolutionBranch, alpha: f64) -> Result<C> {
    let (v, d) = b.eval(0.0)?;
    let norm = v.norm().max(d.norm() / alpha.abs().max(1e-300));
    if v.norm() < 1e-8 * norm {
        return Err(RayleighError::NearEigenvalue { value: v.norm(), norm });
    }
    Ok(d / v)
}

/// `U'(0)/(U(0) - c) - [alpha (U+ - c)^2 - alpha^2 (U+ - c)^4 Omega_0(0)] / (U(0) - c)^2`.
///
/// Reduces to `-U'(0)/c - (alpha/c^2)(U+ - c)^2 + (alpha^2/c^2)(U+ - c)^4 Omega_0(0)` when `U(0) = 0`.
pub fn ratio_expansion(p: &ShearProfile, alpha: f64, c: C) -> Result<C> {
    let w0 = p.d(0.0, 0) - c;
    let up = p.u_plus() - c;
    let up2 = up * up;
    let o0 = omega0(p, c, 0.0)?;
    Ok(p.d(0.0, 1) / w0 - (up2 * alpha - up2 * up2 * o0 * (alpha * alpha)) / (w0 * w0))
}

fn check_even(p: &ShearProfile) -> Result<()> {
    for y in [0.1, 0.37, 0.8, 1.0] {
        let (a, b) = (p.d(y, 0), p.d(-y, 0));
        if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
            return Err(RayleighError::InvalidArgument(format!("profile is not even: U({y}) != U(-{y})")));
        }
    }
    Ok(())
}

/// `omega(1)` for `omega' = -alpha^2 Y + omega^2 / Y`, `omega(0) = 0`, `Y = (U - c)^2`.
pub fn interval_omega(p: &ShearProfile, alpha: f64, c: C) -> Result<C> {
    interval_omega_with(p, alpha, c, &ode_options())
}

pub fn interval_omega_with(p: &ShearProfile, alpha: f64, c: C, opts: &OdeOptions) -> Result<C> {
    check_even(p)?;
    refuse_real_layer(p, c, 0.0, 1.0)?;
    let a2 = alpha * alpha;
    let pp = p.clone();
    let rhs = move |y: f64, s: &State<1>| -> Result<State<1>> {
        let w = pp.d(y, 0) - c;
        let yy = w * w;
        if s[0].norm() > 1e12 || !s[0].is_finite() {
            return Err(RayleighError::RiccatiBlowUp { y });
        }
        Ok([-yy * a2 + s[0] * s[0] / yy])
    };
    match ode::solve(&rhs, 0.0, [C::new(0.0, 0.0)], 1.0, opts) {
        Ok(t) => Ok(t.final_state()[0]),
        Err(RayleighError::StepUnderflow { s }) => Err(RayleighError::RiccatiBlowUp { y: s }),
        Err(e) => Err(e),
    }
}

/// `-alpha^2 int_0^1 Y + alpha^4 int_0^1 omega_2^2 / Y` with `omega_2(y) = int_y^0 Y`.
pub fn interval_expansion(p: &ShearProfile, alpha: f64, c: C) -> Result<C> {
    check_even(p)?;
    let g = PanelGrid::new(graded_breakpoints(0.0, 1.0, &[], 1.0, 1.0, 1.0 / 8.0));
    let yv: Vec<C> = g.nodes.iter().map(|&y| (p.d(y, 0) - c) * (p.d(y, 0) - c)).collect();
    let cum = g.cumulative(&yv);
    let total = g.integrate(&yv);
    let second: Vec<C> = cum.iter().zip(&yv).map(|(w2, yy)| w2 * w2 / yy).collect();
    let a2 = alpha * alpha;
    Ok(-total * a2 + g.integrate(&second) * (a2 * a2))
}

/// `int_0^1 (U - c)^2` by adaptive quadrature, an independent check of the leading term.
pub fn leading_integral(p: &ShearProfile, c: C) -> Result<C> {
    Ok(quad_try(|y| Ok((p.d(y, 0) - c) * (p.d(y, 0) - c)), 0.0, 1.0, QuadTol::new(1e-15, 1e-14))?.value)
}
