//! WKBJ branches, regime classification in `alpha |c|^{1/n}`, and the matched decaying solution.

use std::sync::Arc;

use num_complex::Complex64;

use crate::branch::{match_coefficients, BranchMeta, LogBranch, Method, SolutionBranch};
use crate::error::{RayleighError, Result};
use crate::grid::{graded_breakpoints, NodeIntegral, PanelGrid};
use crate::local::LocalOptions;
use crate::oracle::ode::{self, State};
use crate::oracle::OdeOptions;
use crate::perturb::{local_pair_alpha, PerturbOptions, PerturbedPair};
use crate::profiles::{find_critical_points, CriticalPoint, ShearProfile};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Largest admissible `|K'| / |K|^{3/2}`.
    pub rho: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    /// Small regime when `alpha |c|^{1/n} <= sigma`.
    pub sigma: f64,
    /// Large regime when `alpha |c|^{1/n} >= sigma_prime`.
    pub sigma_prime: f64,
    /// Half-width of the assembled solution.
    pub theta: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { rho: 0.1, sigma0: 0.5, sigma1: 10.0, sigma: 0.1, sigma_prime: 10.0, theta: 0.3 }
    }
}

/// `(K, K')` with `K = alpha^2 + U''/(U - c)`.
pub fn k_and_derivative(p: &ShearProfile, c: C, alpha: f64, y: f64) -> (C, C) {
    let (u, u1, u2) = (p.d(y, 0), p.d(y, 1), p.d(y, 2));
    let u3 = if p.max_order() >= 3 { p.d(y, 3) } else { 0.0 };
    let w = u - c;
    (alpha * alpha + u2 / w, u3 / w - u2 * u1 / (w * w))
}

/// `|K'| / |K|^{3/2}`; infinite at a turning point.
pub fn wkbj_condition(p: &ShearProfile, c: C, alpha: f64, y: f64) -> f64 {
    let (k, dk) = k_and_derivative(p, c, alpha, y);
    if k.norm() == 0.0 {
        return f64::INFINITY;
    }
    dk.norm() / k.norm().powf(1.5)
}

fn nearest_branch(principal: C, guess: C) -> C {
    let tau = 2.0 * std::f64::consts::PI;
    let k = ((guess.im - principal.im) / tau).round();
    C::new(principal.re, principal.im + k * tau)
}

/// `K`, a continuous `log K` and `int sqrt K` on a range.
#[derive(Debug, Clone)]
pub struct PhaseData {
    p: ShearProfile,
    c: C,
    alpha: f64,
    pub y0: f64,
    pub range: (f64, f64),
    grid: PanelGrid,
    log_k: Vec<C>,
    log_k0: C,
    phase: NodeIntegral,
    phase0: C,
}

impl PhaseData {
    pub fn new(p: &ShearProfile, c: C, alpha: f64, y0: f64, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(hi > lo) || y0 < lo || y0 > hi {
            return Err(RayleighError::InvalidArgument(format!("reference {y0} outside [{lo}, {hi}]")));
        }
        let len = hi - lo;
        let grid = PanelGrid::new(graded_breakpoints(lo, hi, &[lo, hi], 1e-3 * len, 1.5, len / 32.0));
        let kv: Vec<C> = grid.nodes.iter().map(|&y| k_and_derivative(p, c, alpha, y).0).collect();
        if let Some(i) = kv.iter().position(|k| k.norm() == 0.0) {
            return Err(RayleighError::WkbjInvalid { y: grid.nodes[i], ratio: f64::INFINITY, threshold: 0.0 });
        }
        let log_k0 = k_and_derivative(p, c, alpha, y0).0.ln();
        let mut log_k: Vec<C> = kv.iter().map(|k| k.ln()).collect();
        let split = grid.nodes.partition_point(|&y| y < y0);
        let mut prev = log_k0;
        for v in log_k.iter_mut().skip(split) {
            *v = nearest_branch(*v, prev);
            prev = *v;
        }
        prev = log_k0;
        for v in log_k[..split].iter_mut().rev() {
            *v = nearest_branch(*v, prev);
            prev = *v;
        }
        let sqrt_k: Vec<C> = log_k.iter().map(|l| (l * 0.5).exp()).collect();
        let phase = NodeIntegral::new(&grid, sqrt_k);
        let phase0 = phase.at(y0);
        Ok(Self { p: p.clone(), c, alpha, y0, range, grid, log_k, log_k0, phase, phase0 })
    }

    pub fn k(&self, y: f64) -> C {
        k_and_derivative(&self.p, self.c, self.alpha, y).0
    }

    /// `log K` on the branch continuous from the reference point.
    pub fn log_k(&self, y: f64) -> C {
        nearest_branch(self.k(y).ln(), self.grid.interpolate(&self.log_k, y))
    }

    pub fn sqrt_k(&self, y: f64) -> C {
        (self.log_k(y) * 0.5).exp()
    }

    /// `int_{y0}^{y} sqrt K`.
    pub fn phase_integral(&self, y: f64) -> C {
        self.phase.at(y) - self.phase0
    }

    /// `K^{1/4}(y0) / K^{1/4}(y)`.
    pub fn amplitude(&self, y: f64) -> C {
        ((self.log_k0 - self.log_k(y)) * 0.25).exp()
    }

    /// Largest jump of `arg sqrt K` between adjacent nodes.
    pub fn max_phase_jump(&self) -> f64 {
        self.log_k.windows(2).map(|w| 0.5 * (w[1].im - w[0].im).abs()).fold(0.0, f64::max)
    }
}

/// Leading-order WKBJ solution `(K(y0)/K(y))^{1/4} exp(sign int_{y0}^y sqrt K)` on `range`.
pub fn wkbj_branch(p: &ShearProfile, c: C, alpha: f64, y0: f64, sign: f64, range: (f64, f64), rho: f64) -> Result<SolutionBranch> {
    let ph = PhaseData::new(p, c, alpha, y0, range)?;
    for &y in ph.grid.nodes.iter().chain([range.0, range.1].iter()) {
        let r = wkbj_condition(p, c, alpha, y);
        if !(r <= rho) {
            return Err(RayleighError::WkbjInvalid { y, ratio: r, threshold: rho });
        }
    }
    let ph = Arc::new(ph);
    let s = sign.signum();
    let meta = BranchMeta::new(c, alpha, Method::Wkbj).note(if s > 0.0 { "psi_+" } else { "psi_-" });
    Ok(SolutionBranch::from_fn(
        move |y| {
            let (k, dk) = k_and_derivative(&ph.p, ph.c, ph.alpha, y);
            let v = ph.amplitude(y) * (ph.phase_integral(y) * s).exp();
            Ok((v, v * (ph.sqrt_k(y) * s - dk / (k * 4.0))))
        },
        LogBranch::None,
        meta,
        range,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeTag {
    Small,
    Middle,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub tag: RegimeTag,
    /// `|alpha| |c|^{1/n}`.
    pub x: f64,
    /// `sigma0 / |alpha|`.
    pub y0: f64,
    /// `|c|^{1/n} + sigma1 / |alpha|`.
    pub y1: f64,
    pub thresholds: Thresholds,
}

pub fn classify_regime(alpha: f64, c_abs: f64, n: usize, th: &Thresholds) -> Regime {
    let eps = c_abs.powf(1.0 / n as f64);
    let a = alpha.abs();
    let x = a * eps;
    let tag = if x <= th.sigma {
        RegimeTag::Small
    } else if x < th.sigma_prime {
        RegimeTag::Middle
    } else {
        RegimeTag::Large
    };
    Regime { tag, x, y0: th.sigma0 / a, y1: eps + th.sigma1 / a, thresholds: *th }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Wkbj,
    Transport,
    Local,
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub kind: PieceKind,
    pub branch: SolutionBranch,
}

/// The decaying solution on `[y0 - theta, y0 + theta]`, assembled from right to left.
#[derive(Debug, Clone)]
pub struct MatchedSolution {
    pub regime: Regime,
    /// Ordered left to right.
    pub pieces: Vec<Piece>,
    pub branch: SolutionBranch,
}

impl MatchedSolution {
    pub fn matching_points(&self) -> Vec<f64> {
        self.pieces.windows(2).map(|w| w[0].hi).collect()
    }

    /// Relative value and derivative jumps at each matching point.
    pub fn jumps(&self) -> Result<Vec<(f64, f64)>> {
        self.pieces
            .windows(2)
            .map(|w| {
                let y = w[0].hi;
                let (a, da) = w[0].branch.eval(y)?;
                let (b, db) = w[1].branch.eval(y)?;
                Ok(((a - b).norm() / b.norm(), (da - db).norm() / db.norm()))
            })
            .collect()
    }
}

/// Integrate the rescaled equation `phi_zz = (1 + U''/(alpha^2 (U - c))) phi`, `z = alpha y`, from `hi` down to `lo`.
fn transport(p: &ShearProfile, c: C, alpha: f64, lo: f64, hi: f64, start: (C, C)) -> Result<SolutionBranch> {
    let pp = p.clone();
    let a2 = alpha * alpha;
    let rhs = move |z: f64, s: &State<2>| -> Result<State<2>> {
        let y = z / alpha;
        let w = pp.d(y, 0) - c;
        if w.norm() == 0.0 {
            return Err(RayleighError::Pole { y, denominator: 0.0 });
        }
        Ok([s[1], s[0] * (1.0 + pp.d(y, 2) / (w * a2))])
    };
    let traj = ode::solve(&rhs, alpha * hi, [start.0, start.1 / alpha], alpha * lo, &OdeOptions::tight())?;
    let data = Arc::new((traj, rhs));
    Ok(SolutionBranch::from_fn(
        move |y| {
            let s = data.0.eval(&data.1, alpha * y)?;
            Ok((s[0], s[1] * alpha))
        },
        LogBranch::None,
        BranchMeta::new(c, alpha, Method::Integrated).note("rescaled transport"),
        (lo, hi),
    ))
}

/// `a psi_+ + b psi_-` on `[lo, hi]` matching `target` at `hi`.
fn wkbj_combination(p: &ShearProfile, c: C, alpha: f64, lo: f64, hi: f64, target: (C, C), rho: f64) -> Result<SolutionBranch> {
    let plus = wkbj_branch(p, c, alpha, hi, 1.0, (lo, hi), rho)?;
    let minus = wkbj_branch(p, c, alpha, hi, -1.0, (lo, hi), rho)?;
    let (a, b) = match_coefficients(&plus, &minus, hi, target.0, target.1)?;
    Ok(plus.combine(a, &minus, b))
}

fn local_window(p: &ShearProfile, cp: CriticalPoint, c: C, alpha: f64, half_width: f64) -> Result<PerturbedPair> {
    let local = LocalOptions::default().with_radius(half_width);
    let opts = PerturbOptions { sigma: half_width, local, ..PerturbOptions::default() };
    local_pair_alpha(p, cp, c, alpha, &opts)
}

/// `a psi_1 + b psi_2` on the local window, matching `target` at its right end.
fn local_combination(pair: &PerturbedPair, target: (C, C)) -> Result<(f64, f64, SolutionBranch)> {
    let y0 = pair.base.cp.y0;
    let (lo, hi) = (y0 - pair.sigma, y0 + pair.sigma);
    let (a, b) = match_coefficients(&pair.psi1, &pair.psi2, hi, target.0, target.1)?;
    Ok((lo, hi, pair.psi1.combine(a, &pair.psi2, b).restricted((lo, hi))))
}

fn assemble(regime: Regime, mut pieces: Vec<Piece>, cp: CriticalPoint, c: C, alpha: f64) -> MatchedSolution {
    pieces.reverse();
    let lookup: Vec<(f64, f64, SolutionBranch)> = pieces.iter().map(|p| (p.lo, p.hi, p.branch.clone())).collect();
    let range = (pieces[0].lo, pieces[pieces.len() - 1].hi);
    let branch = SolutionBranch::from_fn(
        move |y| {
            let i = lookup.partition_point(|(_, hi, _)| *hi < y).min(lookup.len() - 1);
            lookup[i].2.eval(y)
        },
        LogBranch::None,
        BranchMeta::new(c, alpha, Method::Matched).at(cp),
        range,
    );
    MatchedSolution { regime, pieces, branch }
}

/// The decaying WKBJ solution continued through the critical zone at `cp`.
pub fn matched_minus(p: &ShearProfile, cp: CriticalPoint, c: C, alpha: f64, th: &Thresholds) -> Result<MatchedSolution> {
    let alpha = alpha.abs();
    if alpha == 0.0 {
        return Err(RayleighError::InvalidArgument("WKBJ needs alpha != 0".into()));
    }
    let n = cp.order;
    let c_abs = (c - cp.c0).norm();
    let regime = classify_regime(alpha, c_abs, n, th);
    let yc = cp.y0;
    let top = yc + th.theta;
    let bottom = yc - th.theta;
    let mut pieces: Vec<Piece> = Vec::new();
    match regime.tag {
        RegimeTag::Small | RegimeTag::Middle => {
            if regime.y1 >= th.theta {
                return Err(RayleighError::OverlapFailure(format!(
                    "|c|^(1/n) + sigma1/|alpha| = {:.4e} must be below theta = {:.4e}",
                    regime.y1, th.theta
                )));
            }
            let (y1r, y1l) = (yc + regime.y1, yc - regime.y1);
            let right = wkbj_branch(p, c, alpha, y1r, -1.0, (y1r, top), th.rho)?;
            let start = right.eval(y1r)?;
            pieces.push(Piece { lo: y1r, hi: top, kind: PieceKind::Wkbj, branch: right });
            let left_start = if regime.tag == RegimeTag::Small {
                let pair = local_window(p, cp, c, alpha, regime.y0)?;
                let tr = transport(p, c, alpha, yc + pair.sigma, y1r, start)?;
                let (lo, hi, local) = local_combination(&pair, tr.eval(yc + pair.sigma)?)?;
                pieces.push(Piece { lo: hi, hi: y1r, kind: PieceKind::Transport, branch: tr });
                pieces.push(Piece { lo, hi, kind: PieceKind::Local, branch: local.clone() });
                let tr = transport(p, c, alpha, y1l, lo, local.eval(lo)?)?;
                let out = tr.eval(y1l)?;
                pieces.push(Piece { lo: y1l, hi: lo, kind: PieceKind::Transport, branch: tr });
                out
            } else {
                if c.im == 0.0 {
                    return Err(RayleighError::RealCriticalLayer { y: yc });
                }
                let tr = transport(p, c, alpha, y1l, y1r, start)?;
                let out = tr.eval(y1l)?;
                pieces.push(Piece { lo: y1l, hi: y1r, kind: PieceKind::Transport, branch: tr });
                out
            };
            let left = wkbj_combination(p, c, alpha, bottom, y1l, left_start, th.rho)?;
            pieces.push(Piece { lo: bottom, hi: y1l, kind: PieceKind::Wkbj, branch: left });
        }
        RegimeTag::Large => {
            let x = regime.x;
            let outer = th.sigma1 * x.powf(-1.5);
            let inner = th.sigma0 / x;
            if outer > inner {
                return Err(RayleighError::OverlapFailure(format!(
                    "sigma1 |alpha c^(1/n)|^(-3/2) = {outer:.4e} exceeds sigma0 |alpha c^(1/n)|^(-1) = {inner:.4e}"
                )));
            }
            let mut roots: Vec<CriticalPoint> = find_critical_points(p, C::new(c.re, 0.0), (bottom, top))?;
            roots.retain(|r| r.y0 - bottom > th.sigma0 / alpha && top - r.y0 > th.sigma0 / alpha);
            roots.reverse();
            let mut hi = top;
            let mut state: Option<(C, C)> = None;
            for r in roots.iter() {
                let inner = th.sigma0 / alpha;
                let pair = local_window(p, CriticalPoint::new(r.y0, c.re, 1), c, alpha, inner)?;
                let edge = r.y0 + inner;
                let w = match state {
                    None => wkbj_branch(p, c, alpha, edge, -1.0, (edge, hi), th.rho)?,
                    Some(s) => wkbj_combination(p, c, alpha, edge, hi, s, th.rho)?,
                };
                let mut target = w.eval(edge)?;
                pieces.push(Piece { lo: edge, hi, kind: PieceKind::Wkbj, branch: w });
                // Contraction may force a window narrower than the WKBJ edge: bridge by transport.
                let bridge = pair.sigma < inner;
                if bridge {
                    let tr = transport(p, c, alpha, r.y0 + pair.sigma, edge, target)?;
                    target = tr.eval(r.y0 + pair.sigma)?;
                    pieces.push(Piece { lo: r.y0 + pair.sigma, hi: edge, kind: PieceKind::Transport, branch: tr });
                }
                let (lo, lhi, local) = local_combination(&pair, target)?;
                pieces.push(Piece { lo, hi: lhi, kind: PieceKind::Local, branch: local.clone() });
                let mut s = local.eval(lo)?;
                hi = lo;
                if bridge {
                    let tr = transport(p, c, alpha, r.y0 - inner, lo, s)?;
                    s = tr.eval(r.y0 - inner)?;
                    hi = r.y0 - inner;
                    pieces.push(Piece { lo: hi, hi: lo, kind: PieceKind::Transport, branch: tr });
                }
                state = Some(s);
            }
            let last = match state {
                None => wkbj_branch(p, c, alpha, bottom, -1.0, (bottom, hi), th.rho)?,
                Some(s) => wkbj_combination(p, c, alpha, bottom, hi, s, th.rho)?,
            };
            pieces.push(Piece { lo: bottom, hi, kind: PieceKind::Wkbj, branch: last });
        }
    }
    Ok(assemble(regime, pieces, cp, c, alpha))
}
