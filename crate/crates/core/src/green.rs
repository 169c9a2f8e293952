//! Half-line Green function of the Rayleigh operator, the forced problem and the adjoint identity.

use std::sync::Arc;

use num_complex::Complex64;

use crate::branch::{BranchMeta, LogBranch, Method, SolutionBranch};
use crate::error::{RayleighError, Result};
use crate::global::{global_pair, GlobalPair};
use crate::grid::{NodeIntegral, PanelGrid};
use crate::profiles::{find_critical_points, ShearProfile};

type C = Complex64;

/// Panel width of the quadrature mesh on `[0, y_max]`.
const PANEL_WIDTH: f64 = 0.25;

/// Green kernel built on a global pair.
///
/// `wronskian` is `W[psi_-, psi_+] = psi_-' psi_+ - psi_- psi_+'`, the sign for which
/// `Ray G(x, .) = delta_x`.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub pair: GlobalPair,
    pub wronskian: C,
    /// `psi_+(0) / psi_-(0) / W`.
    pub boundary_factor: C,
    p: ShearProfile,
    grid: Arc<PanelGrid>,
    minus: Vec<(C, C)>,
    plus: Vec<(C, C)>,
    weight: Vec<C>,
}

impl GreenKernel {
    pub fn new(p: &ShearProfile, alpha: f64, c: C, y_max: Option<f64>) -> Result<Self> {
        Self::from_pair(p, global_pair(p, alpha, c, y_max)?)
    }

    pub fn from_pair(p: &ShearProfile, pair: GlobalPair) -> Result<Self> {
        let c = pair.c;
        if c.im == 0.0 {
            if let Some(cp) = find_critical_points(p, c, (0.0, pair.y_max))?.first() {
                return Err(RayleighError::RealCriticalLayer { y: cp.y0 });
            }
        }
        let m = (pair.y_max / PANEL_WIDTH).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=m).map(|k| pair.y_max * k as f64 / m as f64).collect();
        let grid = PanelGrid::new(breaks);
        let minus = grid.nodes.iter().map(|&y| pair.psi_minus.eval(y)).collect::<Result<Vec<_>>>()?;
        let plus = grid.nodes.iter().map(|&y| pair.psi_plus.eval(y)).collect::<Result<Vec<_>>>()?;
        let weight = grid.nodes.iter().map(|&y| 1.0 / (p.d(y, 0) - c)).collect();

        let (m0, _) = pair.psi_minus.eval(0.0)?;
        let (p0, _) = pair.psi_plus.eval(0.0)?;
        let norm = minus.iter().map(|v| v.0.norm()).fold(m0.norm(), f64::max);
        if m0.norm() < 1e-8 * norm {
            return Err(RayleighError::NearEigenvalue { value: m0.norm(), norm });
        }
        let wronskian = -pair.wronskian;
        Ok(Self {
            boundary_factor: p0 / m0 / wronskian,
            wronskian,
            p: p.clone(),
            grid: Arc::new(grid),
            minus,
            plus,
            weight,
            pair,
        })
    }

    pub fn y_max(&self) -> f64 {
        self.pair.y_max
    }

    pub fn profile(&self) -> &ShearProfile {
        &self.p
    }

    fn check(&self, y: f64) -> Result<()> {
        if !(0.0..=self.pair.y_max).contains(&y) {
            return Err(RayleighError::OutsideDomain { y, domain: format!("[0, {}]", self.pair.y_max) });
        }
        Ok(())
    }
}

/// `G_int(x, y)`.
pub fn interior_green(k: &GreenKernel, x: f64, y: f64) -> Result<C> {
    k.check(x)?;
    k.check(y)?;
    let w = k.p.d(x, 0) - k.pair.c;
    if w == C::new(0.0, 0.0) {
        return Err(RayleighError::RealCriticalLayer { y: x });
    }
    let (a, b) = if x < y {
        (k.pair.psi_plus.value(x)?, k.pair.psi_minus.value(y)?)
    } else {
        (k.pair.psi_minus.value(x)?, k.pair.psi_plus.value(y)?)
    };
    Ok(a * b / (w * k.wronskian))
}

/// `G_b(x, y)`, chosen so that `G_int(x, 0) + G_b(x, 0) = 0`.
pub fn boundary_green(k: &GreenKernel, x: f64, y: f64) -> Result<C> {
    k.check(x)?;
    k.check(y)?;
    let w = k.p.d(x, 0) - k.pair.c;
    Ok(-k.boundary_factor * k.pair.psi_minus.value(x)? * k.pair.psi_minus.value(y)? / w)
}

/// Full kernel with `G(x, 0) = 0`.
pub fn total_green(k: &GreenKernel, x: f64, y: f64) -> Result<C> {
    Ok(interior_green(k, x, y)? + boundary_green(k, x, y)?)
}

/// Solution of `Ray(psi) = f` with `psi(0) = 0` and decay at infinity.
///
/// The integrals are cut at `y_max`; the note on the branch meta records the tail bound
/// `sup |f| |psi_-(y_max)| / (alpha |W| min |U - c|)`.
pub fn solve_forced<F: Fn(f64) -> C>(k: &GreenKernel, f: F) -> Result<SolutionBranch> {
    let fv: Vec<C> = k.grid.nodes.iter().map(|&y| f(y)).collect();
    let hp: Vec<C> = (0..fv.len()).map(|i| k.plus[i].0 * k.weight[i] * fv[i]).collect();
    let hm: Vec<C> = (0..fv.len()).map(|i| k.minus[i].0 * k.weight[i] * fv[i]).collect();
    let ip = NodeIntegral::new(&k.grid, hp);
    let im = NodeIntegral::new(&k.grid, hm);
    let boundary = k.boundary_factor * im.total();

    let f_max = fv.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let w_min = k.weight.iter().map(|w| 1.0 / w.norm()).fold(f64::INFINITY, f64::min);
    let tail = f_max * k.pair.psi_minus.value(k.y_max())?.norm()
        / (k.pair.alpha * k.wronskian.norm() * w_min);

    let (minus, plus, wr) = (k.pair.psi_minus.clone(), k.pair.psi_plus.clone(), k.wronskian);
    let eval = move |y: f64| -> Result<(C, C)> {
        let (vm, dm) = minus.eval(y)?;
        let (vp, dp) = plus.eval(y)?;
        let a = ip.at(y);
        let b = im.tail(y);
        let v = (vm * a + vp * b) / wr - boundary * vm;
        let d = (dm * a + dp * b) / wr - boundary * dm;
        Ok((v, d))
    };
    let meta = BranchMeta::new(k.pair.c, k.pair.alpha, Method::Forced).note(format!("tail bound {tail:.3e}"));
    Ok(SolutionBranch::from_fn(eval, LogBranch::None, meta, (0.0, k.y_max())))
}

/// Seven-point central first and second differences.
fn differences<F: Fn(f64) -> C>(g: &F, y: f64, h: f64) -> (C, C) {
    const D1: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    const D2: [f64; 3] = [3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
    let g0 = g(y);
    let mut d1 = C::new(0.0, 0.0);
    let mut d2 = g0 * (-49.0 / 18.0);
    for j in 0..3 {
        let s = (j + 1) as f64 * h;
        let (gp, gm) = (g(y + s), g(y - s));
        d1 += (gp - gm) * D1[j];
        d2 += (gp + gm) * D2[j];
    }
    (d1 / h, d2 / (h * h))
}

/// `max |Ray^t(phi) - Ray((U - c) phi) / (U - c)|` over `grid`.
///
/// The left side differentiates `phi` and expands the product with exact profile
/// derivatives; the right side differentiates `(U - c) phi` directly. The step is the
/// smallest gap of `grid` (or 0.1 for a single point).
pub fn adjoint_conjugation_residual<F: Fn(f64) -> C>(p: &ShearProfile, alpha: f64, c: C, phi: F, grid: &[f64]) -> Result<f64> {
    let h = grid
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let h = if h.is_finite() { h } else { 0.1 };
    let a2 = alpha * alpha;
    let g = |y: f64| (p.d(y, 0) - c) * phi(y);
    let mut worst = 0.0f64;
    for &y in grid {
        let (u, u1, u2) = (p.derivative(y, 0)? - c, p.derivative(y, 1)?, p.derivative(y, 2)?);
        if u.norm() == 0.0 {
            return Err(RayleighError::RealCriticalLayer { y });
        }
        let f0 = phi(y);
        let (f1, f2) = differences(&phi, y, h);
        let adj = u * f2 + 2.0 * u1 * f1 + u2 * f0 - a2 * u * f0 - u2 * f0;
        let (_, g2) = differences(&g, y, h);
        let ray = u * (g2 - a2 * g(y)) - u2 * g(y);
        worst = worst.max((adj - ray / u).norm());
    }
    Ok(worst)
}
