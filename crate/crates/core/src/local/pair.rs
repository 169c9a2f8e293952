//! The two local solutions `psi_1`, `psi_2` at `alpha = 0`.

use std::sync::Arc;

use num_complex::Complex64;

use super::coordinate::NormalCoordinate;
use super::hermite::{hermite_interpolant, HermiteFit};
use super::partial_fraction::{partial_fraction, PartialFraction};
use crate::branch::{BranchMeta, LogBranch, Method, SolutionBranch};
use crate::error::{RayleighError, Result};
use crate::grid::{graded_breakpoints, Cumulative};
use crate::profiles::{CriticalPoint, Domain, ShearProfile};

/// The two-sided weight `zeta(y, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaWeight {
    pub n: usize,
    pub c_abs: f64,
}

impl ZetaWeight {
    pub fn new(n: usize, c_abs: f64) -> Self {
        Self { n, c_abs }
    }

    fn bracket(&self, y: f64) -> f64 {
        self.c_abs.powf(1.0 / self.n as f64) + y.abs()
    }

    /// `<y>^n` for `y >= 0`, `|c|^{2-1/n} <y>^{1-n}` for `y < 0`, with `<y> = |c|^{1/n} + |y|`.
    pub fn value(&self, y: f64) -> f64 {
        let n = self.n as i32;
        if y >= 0.0 {
            self.bracket(y).powi(n)
        } else {
            self.c_abs.powf(2.0 - 1.0 / self.n as f64) * self.bracket(y).powi(1 - n)
        }
    }

    /// Left and right limits at `y = 0`.
    pub fn one_sided_at_zero(&self) -> (f64, f64) {
        let n = self.n as i32;
        let b = self.bracket(0.0);
        (self.c_abs.powf(2.0 - 1.0 / self.n as f64) * b.powi(1 - n), b.powi(n))
    }
}

/// Scale of the returned branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `(U/a - c^) (J + R)`: bounded by `zeta`, Wronskian of order `|c|^{2-1/n}`.
    Zeta,
    /// `(U - c) int dy / (U - c)^2`: the Zeta branches divided by `a |c^|^{2-1/n}`.
    Raw,
}

#[derive(Debug, Clone, Copy)]
pub struct LocalOptions {
    /// Matched derivatives per endpoint in the Hermite split.
    pub hermite_n: usize,
    /// Validity radius in `y - y0`.
    pub radius: f64,
    /// Lower limit of the remainder integral, in `y - y0`; default `radius / 2`.
    pub anchor: Option<f64>,
    /// Integrations by parts in the order-one construction.
    pub ibp_terms: usize,
    pub normalization: Normalization,
}

impl Default for LocalOptions {
    fn default() -> Self {
        Self { hermite_n: 6, radius: 0.3, anchor: None, ibp_terms: 4, normalization: Normalization::Zeta }
    }
}

impl LocalOptions {
    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.radius = r;
        self
    }

    fn anchor(&self) -> f64 {
        self.anchor.unwrap_or(0.5 * self.radius)
    }
}

fn domain_range(d: Domain) -> (f64, f64) {
    match d {
        Domain::HalfLine => (0.0, f64::INFINITY),
        Domain::Interval { lo, hi } => (lo, hi),
        Domain::Line => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

/// `U_s - c`, the explicit solution at `alpha = 0`.
pub fn psi_smooth(p: &ShearProfile, c: Complex64) -> SolutionBranch {
    let q = p.clone();
    SolutionBranch::from_fn(
        move |y| Ok((q.value(y) - c, Complex64::new(q.d(y, 1), 0.0))),
        LogBranch::None,
        BranchMeta::new(c, 0.0, Method::Smooth),
        domain_range(p.domain()),
    )
}

/// Hermite split of `int Psi(t) / (t^n - e^{i theta})^2 dt` with the remainder tabulated in `x`.
struct Split {
    nc: NormalCoordinate,
    chat: Complex64,
    eps: f64,
    pf: PartialFraction,
    fit: HermiteFit,
    rem: Cumulative,
}

impl Split {
    fn build(nc: NormalCoordinate, chat: Complex64, hermite_n: usize, anchor: f64) -> Result<Self> {
        let n = nc.order();
        let eps = chat.norm().powf(1.0 / n as f64);
        let theta = chat.arg();
        let mut minus = Vec::with_capacity(hermite_n);
        let mut plus = Vec::with_capacity(hermite_n);
        let xm = nc.x_of_s(-eps)?;
        let xp = nc.x_of_s(eps)?;
        let vm = nc.v_derivatives(xm, hermite_n);
        let vp = nc.v_derivatives(xp, hermite_n);
        for k in 0..hermite_n {
            let scale = eps.powi(k as i32);
            minus.push(vm[k] * scale);
            plus.push(vp[k] * scale);
        }
        let fit = hermite_interpolant(&minus, &plus)?;
        let pf = partial_fraction(&fit.coeffs, n, theta);
        let r = nc.radius;
        let mut breaks = graded_breakpoints(-r, r, &[xm, 0.0, xp], 0.25 * eps.min(r), 1.5, r / 8.0);
        breaks.push(anchor);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut me = Self { nc, chat, eps, pf, fit, rem: Cumulative::new(|_| Complex64::new(0.0, 0.0), vec![anchor, anchor + 1.0], anchor) };
        let rem = Cumulative::new(|x| me.integrand(x), breaks, anchor);
        me.rem = rem;
        Ok(me)
    }

    /// `eps^{-1} (1 - P(tau) s'(x)) / (tau^n - e^{i theta})^2`.
    fn integrand(&self, x: f64) -> Complex64 {
        let (s, ds) = self.nc.s_and_ds(x);
        let tau = s / self.eps;
        let d = (self.nc.u_norm(x) - self.chat) / self.chat.norm();
        (1.0 - self.fit.eval(tau) * ds) / (d * d * self.eps)
    }

    fn w(&self, x: f64) -> Complex64 {
        self.nc.u_norm(x) - self.chat
    }

    fn remainder(&self, x: f64) -> Complex64 {
        self.rem.eval(|z| self.integrand(z), x)
    }

    /// `J(tau(x)) + R(x)` on the requested logarithm.
    fn primitive(&self, x: f64, branch: LogBranch) -> Result<Complex64> {
        let tau = self.nc.s(x) / self.eps;
        let j = self.pf.primitive(Complex64::new(tau, 0.0), self.chat.norm().sqrt(), branch)?;
        Ok(j + self.remainder(x))
    }

    /// `(w (J + R), (w'/a)(J + R) + |c^|^{2-1/n} / w)`.
    fn branch_value(&self, x: f64, branch: LogBranch) -> Result<(Complex64, Complex64)> {
        let w = self.w(x);
        if w.norm() == 0.0 {
            return Err(RayleighError::Pole { y: self.nc.cp.y0 + x, denominator: 0.0 });
        }
        let i = self.primitive(x, branch)?;
        let n = self.nc.order() as f64;
        let k = self.chat.norm().powf(2.0 - 1.0 / n);
        Ok((w * i, self.nc.du_norm(x) * i + k / w))
    }
}

/// `L_j(w) = w^j / j! (log w - H_j)`.
fn l_fun(j: usize, w: Complex64) -> Complex64 {
    let h: f64 = (1..=j).map(|k| 1.0 / k as f64).sum();
    w.powi(j as i32) / crate::series::factorial(j) * (w.ln() - h)
}

/// Order-one construction by repeated integration by parts in `s = (U - c0)/a`.
struct Ibp {
    nc: NormalCoordinate,
    chat: Complex64,
    m: usize,
    rem: Cumulative,
}

impl Ibp {
    fn build(nc: NormalCoordinate, chat: Complex64, m: usize, anchor: f64) -> Result<Self> {
        let r = nc.radius;
        let mut focus = vec![0.0];
        if let Ok(xc) = nc.x_of_s(chat.re) {
            focus.push(xc);
        }
        let mut breaks = graded_breakpoints(-r, r, &focus, (0.25 * chat.norm()).clamp(1e-12, r / 8.0), 1.5, r / 8.0);
        breaks.push(anchor);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut me = Self { nc, chat, m, rem: Cumulative::new(|_| Complex64::new(0.0, 0.0), vec![anchor, anchor + 1.0], anchor) };
        let rem = Cumulative::new(|x| me.integrand(x), breaks, anchor);
        me.rem = rem;
        Ok(me)
    }

    /// `(-1)^M V^(M+1)(s) L_{M-1}(s - c^) s'`.
    fn integrand(&self, x: f64) -> Complex64 {
        let (s, ds) = self.nc.s_and_ds(x);
        let v = self.nc.v_derivatives(x, self.m + 2);
        let sign = if self.m.is_multiple_of(2) { 1.0 } else { -1.0 };
        l_fun(self.m - 1, s - self.chat) * (sign * v[self.m + 1] * ds)
    }

    /// `-V/(s - c^) + sum_{j<M} (-1)^j V^(j+1) L_j(s - c^) + remainder`.
    fn integral(&self, x: f64) -> Complex64 {
        let s = self.nc.s(x);
        let w = s - self.chat;
        let v = self.nc.v_derivatives(x, self.m + 1);
        let mut out = -v[0] / w;
        for j in 0..self.m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out += l_fun(j, w) * (sign * v[j + 1]);
        }
        out + self.rem.eval(|z| self.integrand(z), x)
    }
}

/// Both local solutions with their exact Wronskian.
#[derive(Debug, Clone)]
pub struct LocalPair {
    pub psi1: SolutionBranch,
    pub psi2: SolutionBranch,
    /// `psi1 psi2' - psi1' psi2`.
    pub wronskian: Complex64,
    pub cp: CriticalPoint,
    pub c: Complex64,
    /// `(c - c0) / a`.
    pub chat: Complex64,
    pub a: f64,
    pub zeta: ZetaWeight,
    /// Jump constant of the two determinations (orders >= 2).
    pub gamma: Option<Complex64>,
    pub normalization: Normalization,
}

fn normalized_c(nc: &NormalCoordinate, c: Complex64) -> Result<Complex64> {
    let chat = (c - nc.cp.c0) / nc.a;
    if chat.norm() == 0.0 {
        return Err(RayleighError::ZeroSpectralParameter);
    }
    Ok(chat)
}

/// `psi_1`, `psi_2` near the critical point `cp` for spectral parameter `c`.
pub fn local_pair_alpha0(p: &ShearProfile, cp: CriticalPoint, c: Complex64, opts: &LocalOptions) -> Result<LocalPair> {
    let nc = NormalCoordinate::new(p, cp, opts.radius)?;
    let chat = normalized_c(&nc, c)?;
    let n = cp.order;
    let a = nc.a;
    let k = chat.norm().powf(2.0 - 1.0 / n as f64);
    let scale = match opts.normalization {
        Normalization::Zeta => 1.0,
        Normalization::Raw => 1.0 / (a * k),
    };
    let range = (cp.y0 - opts.radius, cp.y0 + opts.radius);
    let y0 = cp.y0;
    let meta = |m: Method| {
        let mut b = BranchMeta::new(c, 0.0, m).at(cp).note("anchor term dropped").note("log rescaled by |c|^{1/2}");
        b.normalization = scale;
        b
    };
    let (psi1, psi2, wronskian, gamma) = if n == 1 {
        let ibp = Arc::new(Ibp::build(nc, chat, opts.ibp_terms.max(1), opts.anchor())?);
        let psi1 = psi_smooth(p, c).restricted(range);
        let cn = chat.norm();
        let psi2 = SolutionBranch::from_fn(
            move |y| {
                let x = y - y0;
                let (s, ds) = ibp.nc.s_and_ds(x);
                let w = s - ibp.chat;
                if w.norm() == 0.0 {
                    return Err(RayleighError::Pole { y, denominator: 0.0 });
                }
                let i = ibp.integral(x);
                Ok((w * i * (cn * scale), (i * ds + 1.0 / w) * (cn * scale)))
            },
            LogBranch::StandardLog,
            meta(Method::IntegrationByParts),
            range,
        );
        (psi1, psi2, Complex64::new(a * cn * scale, 0.0), None)
    } else {
        let split = Arc::new(Split::build(nc, chat, opts.hermite_n, opts.anchor())?);
        let gamma = split.pf.gamma();
        let mk = |branch: LogBranch| {
            let sp = split.clone();
            SolutionBranch::from_fn(
                move |y| sp.branch_value(y - y0, branch).map(|(v, d)| (v * scale, d * scale)),
                branch,
                meta(Method::VariationOfConstants),
                range,
            )
        };
        let psi1 = mk(LogBranch::CutOnPositiveReals);
        let psi2 = mk(LogBranch::StandardLog);
        (psi1, psi2, -gamma * k * scale * scale, Some(gamma))
    };
    Ok(LocalPair {
        psi1,
        psi2,
        wronskian,
        cp,
        c,
        chat,
        a,
        zeta: ZetaWeight::new(n, chat.norm()),
        gamma,
        normalization: opts.normalization,
    })
}

/// `int_A^y dz / (U_s(z) - c)^2` through the Hermite split.
pub fn singular_integral_i(
    p: &ShearProfile,
    cp: CriticalPoint,
    c: Complex64,
    y: f64,
    anchor: f64,
    hermite_n: usize,
) -> Result<Complex64> {
    let (x, xa) = (y - cp.y0, anchor - cp.y0);
    let radius = 1.001 * x.abs().max(xa.abs());
    let nc = NormalCoordinate::new(p, cp, radius)?;
    let chat = normalized_c(&nc, c)?;
    let a = nc.a;
    let split = Split::build(nc, chat, hermite_n, xa)?;
    let eps = split.eps;
    let ja = split.primitive(xa, LogBranch::StandardLog)?;
    let jy = split.primitive(x, LogBranch::StandardLog)?;
    Ok((jy - ja) * (eps / (a * a * chat.norm_sqr())))
}

/// Residue `-U''/U'^3` of `1/(U_s - c)^2` at a simple root `y_c`.
///
/// Continuing a solution above rather than below `y_c` changes it by
/// `2 pi i` times this residue times `W (U_s - c)`.
pub fn order_one_jump_coefficient(p: &ShearProfile, y_c: f64) -> f64 {
    let (_, u1, u2) = p.triple(y_c);
    -u2 / (u1 * u1 * u1)
}
