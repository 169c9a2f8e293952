//! Regular perturbation in `alpha^2` around the local pair.
//!
//! `phi = seed + alpha^2 G phi`, where `G` inverts `d^2 - U''/(U - c)` on `[y0 - sigma, y0 + sigma]`
//! with the kernel built from `psi_1`, `psi_2`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::branch::{BranchMeta, Method, SolutionBranch};
use crate::error::{RayleighError, Result};
use crate::grid::{graded_breakpoints, NodeIntegral, PanelGrid};
use crate::local::{local_pair_alpha0, LocalOptions, LocalPair, ZetaWeight};
use crate::profiles::{CriticalPoint, ShearProfile};

type C = Complex64;

/// Kernel data on `[y0 - sigma, y0 + sigma]`.
#[derive(Debug, Clone)]
pub struct LocalGreen {
    pub psi1: SolutionBranch,
    pub psi2: SolutionBranch,
    pub wronskian: C,
    pub sigma: f64,
    pub y0: f64,
    pub zeta: ZetaWeight,
    grid: PanelGrid,
    p1: Vec<(C, C)>,
    p2: Vec<(C, C)>,
}

/// Which side the weight grows on: `zeta(y)` for `psi_1`, `zeta(-y)` for `psi_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn weight(self, z: &ZetaWeight, x: f64) -> f64 {
        match self {
            Side::Right => z.value(x),
            Side::Left => z.value(-x),
        }
    }
}

impl LocalGreen {
    pub fn new(pair: &LocalPair, sigma: f64) -> Result<Self> {
        let y0 = pair.cp.y0;
        let (lo, hi) = (y0 - sigma, y0 + sigma);
        if !(pair.psi1.contains(lo) && pair.psi1.contains(hi)) {
            return Err(RayleighError::OutsideValidity { y: hi, radius: sigma });
        }
        let eps = pair.zeta.c_abs.powf(1.0 / pair.cp.order as f64);
        let mut focus = vec![y0, y0 - eps, y0 + eps];
        if pair.cp.order == 1 {
            focus.push(y0 + pair.chat.re);
        }
        let breaks = graded_breakpoints(lo, hi, &focus, (eps / 4.0).min(sigma / 4.0), 1.5, sigma / 4.0);
        let grid = PanelGrid::new(breaks);
        let p1 = grid.nodes.iter().map(|&y| pair.psi1.eval(y)).collect::<Result<Vec<_>>>()?;
        let p2 = grid.nodes.iter().map(|&y| pair.psi2.eval(y)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            psi1: pair.psi1.clone(),
            psi2: pair.psi2.clone(),
            wronskian: pair.wronskian,
            sigma,
            y0,
            zeta: pair.zeta,
            grid,
            p1,
            p2,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn range(&self) -> (f64, f64) {
        (self.y0 - self.sigma, self.y0 + self.sigma)
    }

    /// `G f` at the nodes, from node values of `f`.
    pub fn apply_nodes(&self, f: &[C]) -> Vec<C> {
        self.apply_nodes_with_deriv(f).into_iter().map(|(v, _)| v).collect()
    }

    fn apply_nodes_with_deriv(&self, f: &[C]) -> Vec<(C, C)> {
        let h1: Vec<C> = self.p1.iter().zip(f).map(|(p, v)| p.0 * v).collect();
        let h2: Vec<C> = self.p2.iter().zip(f).map(|(p, v)| p.0 * v).collect();
        let c1 = self.grid.cumulative(&h1);
        let c2 = self.grid.cumulative_from_right(&h2);
        let w = self.wronskian;
        (0..f.len())
            .map(|i| {
                let (a, b) = (c1[i], c2[i]);
                ((self.p2[i].0 * a + self.p1[i].0 * b) / w, (self.p2[i].1 * a + self.p1[i].1 * b) / w)
            })
            .collect()
    }

    /// Weighted operator norm `sup_y zeta(y)^{-1} int |G(x, y)| zeta(x) dx` on the nodes.
    pub fn operator_norm(&self, side: Side) -> f64 {
        let z: Vec<f64> = self.grid.nodes.iter().map(|&y| side.weight(&self.zeta, y - self.y0)).collect();
        let a1: Vec<C> = self.p1.iter().zip(&z).map(|(p, w)| C::new(p.0.norm() * w, 0.0)).collect();
        let a2: Vec<C> = self.p2.iter().zip(&z).map(|(p, w)| C::new(p.0.norm() * w, 0.0)).collect();
        let c1 = self.grid.cumulative(&a1);
        let c2 = self.grid.cumulative_from_right(&a2);
        let w = self.wronskian.norm();
        (0..z.len())
            .map(|i| (self.p2[i].0.norm() * c1[i].re + self.p1[i].0.norm() * c2[i].re) / (w * z[i]))
            .fold(0.0, f64::max)
    }
}

/// `G_0(x, y)`: `psi1(x) psi2(y) / W` for `x < y`, `psi1(y) psi2(x) / W` otherwise.
pub fn green_zero(g: &LocalGreen, x: f64, y: f64) -> Result<C> {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    Ok(g.psi1.value(lo)? * g.psi2.value(hi)? / g.wronskian)
}

/// `G f` as an evaluable function with derivative.
#[derive(Debug, Clone)]
pub struct GreenImage {
    psi1: SolutionBranch,
    psi2: SolutionBranch,
    w: C,
    c1: NodeIntegral,
    c2: NodeIntegral,
}

impl GreenImage {
    fn new(g: &LocalGreen, f: &[C]) -> Self {
        let h1: Vec<C> = g.p1.iter().zip(f).map(|(p, v)| p.0 * v).collect();
        let h2: Vec<C> = g.p2.iter().zip(f).map(|(p, v)| p.0 * v).collect();
        Self {
            psi1: g.psi1.clone(),
            psi2: g.psi2.clone(),
            w: g.wronskian,
            c1: NodeIntegral::new(&g.grid, h1),
            c2: NodeIntegral::new(&g.grid, h2),
        }
    }

    pub fn eval(&self, y: f64) -> Result<(C, C)> {
        let (v1, d1) = self.psi1.eval(y)?;
        let (v2, d2) = self.psi2.eval(y)?;
        let a = self.c1.at(y);
        let b = self.c2.tail(y);
        Ok(((v2 * a + v1 * b) / self.w, (d2 * a + d1 * b) / self.w))
    }
}

/// `G f`, with `f` sampled on the kernel nodes.
pub fn apply_green<F: Fn(f64) -> C>(g: &LocalGreen, f: F) -> GreenImage {
    let vals: Vec<C> = g.grid.nodes.iter().map(|&y| f(y)).collect();
    GreenImage::new(g, &vals)
}

/// Grid sup of `|f| / zeta` on `[y0 - sigma, y0 + sigma]`, refined dyadically toward `y0`.
pub fn zeta_norm<F: Fn(f64) -> C>(f: F, zeta: &ZetaWeight, y0: f64, sigma: f64, side: Side) -> f64 {
    let floor = 1e-3 * zeta.c_abs.powf(1.0 / zeta.n as f64);
    let mut xs: Vec<f64> = (0..=200).map(|i| -sigma + 2.0 * sigma * i as f64 / 200.0).collect();
    let mut d = sigma;
    while d > floor {
        xs.push(d);
        xs.push(-d);
        d *= 0.5;
    }
    xs.push(0.0);
    xs.iter()
        .map(|&x| f(y0 + x).norm() / side.weight(zeta, x))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct IterationLog {
    pub iterations: usize,
    /// Weighted size of each increment.
    pub increments: Vec<f64>,
    pub contraction: f64,
}

/// Solve `phi = seed + alpha^2 G phi` by iteration.
pub fn fixed_point_solution(
    g: &LocalGreen,
    seed: &SolutionBranch,
    side: Side,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(SolutionBranch, IterationLog)> {
    let a2 = alpha * alpha;
    if alpha == 0.0 {
        return Ok((seed.clone(), IterationLog { iterations: 0, increments: vec![], contraction: 0.0 }));
    }
    let contraction = a2 * g.operator_norm(side);
    if contraction >= 1.0 {
        return Err(RayleighError::NonContraction { factor: contraction });
    }
    let s0: Vec<C> = g.grid.nodes.iter().map(|&y| seed.value(y)).collect::<Result<_>>()?;
    let z: Vec<f64> = g.grid.nodes.iter().map(|&y| side.weight(&g.zeta, y - g.y0)).collect();
    let mut phi = s0.clone();
    let mut increments = Vec::new();
    let mut done = false;
    for _ in 0..max_iter {
        let gp = g.apply_nodes(&phi);
        let next: Vec<C> = s0.iter().zip(&gp).map(|(s, v)| s + v * a2).collect();
        let inc = next.iter().zip(&phi).zip(&z).map(|((a, b), w)| (a - b).norm() / w).fold(0.0, f64::max);
        phi = next;
        increments.push(inc);
        if inc <= tol {
            done = true;
            break;
        }
    }
    if !done {
        return Err(RayleighError::MaxIterations { iterations: max_iter, increment: *increments.last().unwrap_or(&f64::NAN) });
    }
    let image = GreenImage::new(g, &phi);
    let seed_c = seed.clone();
    let mut meta = BranchMeta::new(seed.meta.c, alpha, Method::FixedPoint).note(format!("{} iterations", increments.len()));
    meta.critical_point = seed.meta.critical_point;
    meta.normalization = seed.meta.normalization;
    let branch = SolutionBranch::from_fn(
        move |y| {
            let (sv, sd) = seed_c.eval(y)?;
            let (gv, gd) = image.eval(y)?;
            Ok((sv + gv * a2, sd + gd * a2))
        },
        seed.log_branch,
        meta,
        g.range(),
    );
    Ok((branch, IterationLog { iterations: increments.len(), increments, contraction }))
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbOptions {
    /// Initial half-width; halved until `alpha^2 ||G|| < 0.5`.
    pub sigma: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub local: LocalOptions,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self { sigma: 0.2, tol: 1e-10, max_iter: 60, local: LocalOptions::default() }
    }
}

/// `psi_{1,alpha}`, `psi_{2,alpha}` near a critical point.
#[derive(Debug, Clone)]
pub struct PerturbedPair {
    pub psi1: SolutionBranch,
    pub psi2: SolutionBranch,
    pub sigma: f64,
    pub base: Arc<LocalPair>,
    pub logs: (IterationLog, IterationLog),
}

/// Shrink `sigma` until the kernel contracts, then iterate both seeds.
pub fn local_pair_alpha(
    p: &ShearProfile,
    cp: CriticalPoint,
    c: C,
    alpha: f64,
    opts: &PerturbOptions,
) -> Result<PerturbedPair> {
    let local = opts.local.with_radius(opts.local.radius.max(opts.sigma));
    let base = Arc::new(local_pair_alpha0(p, cp, c, &local)?);
    let mut sigma = opts.sigma;
    let g = loop {
        let g = LocalGreen::new(&base, sigma)?;
        let k = alpha * alpha * g.operator_norm(Side::Right).max(g.operator_norm(Side::Left));
        if k < 0.5 {
            break g;
        }
        sigma *= 0.5;
        if sigma < 1e-6 * opts.sigma {
            return Err(RayleighError::NonContraction { factor: k });
        }
    };
    let (psi1, l1) = fixed_point_solution(&g, &base.psi1, Side::Right, alpha, opts.tol, opts.max_iter)?;
    let (psi2, l2) = fixed_point_solution(&g, &base.psi2, Side::Left, alpha, opts.tol, opts.max_iter)?;
    Ok(PerturbedPair { psi1, psi2, sigma, base, logs: (l1, l2) })
}
