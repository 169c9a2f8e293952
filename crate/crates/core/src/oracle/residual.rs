//! Pointwise residual of the Rayleigh operator applied to a branch.

use num_complex::Complex64;

use crate::branch::SolutionBranch;
use crate::error::Result;
use crate::profiles::ShearProfile;

/// Default finite-difference step for `psi''`.
pub const RESIDUAL_STEP: f64 = 1e-3;

/// `psi''(y)` from a fourth-order difference of `psi'`, one-sided near range ends.
pub fn second_derivative(branch: &SolutionBranch, y: f64, h: f64) -> Result<Complex64> {
    let (lo, hi) = branch.range;
    let d = |x: f64| branch.deriv(x);
    if y - 2.0 * h >= lo && y + 2.0 * h <= hi {
        return Ok((-d(y + 2.0 * h)? + d(y + h)? * 8.0 - d(y - h)? * 8.0 + d(y - 2.0 * h)?) / (12.0 * h));
    }
    let s = if y + 4.0 * h <= hi { h } else { -h };
    let f: Vec<Complex64> = (0..5).map(|k| d(y + s * k as f64)).collect::<Result<_>>()?;
    Ok((f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) / (12.0 * s))
}

/// `(|Ray psi|, |U - c| (|psi''| + alpha^2 |psi|) + |U'' psi|)` at one point.
pub fn residual_terms(
    branch: &SolutionBranch,
    p: &ShearProfile,
    alpha: f64,
    c: Complex64,
    y: f64,
    h: f64,
) -> Result<(f64, f64)> {
    let psi = branch.value(y)?;
    let psi2 = second_derivative(branch, y, h)?;
    let (u, _, upp) = p.triple(y);
    let w = u - c;
    let a2 = alpha * alpha;
    let ray = w * (psi2 - psi * a2) - psi * upp;
    let scale = w.norm() * (psi2.norm() + a2 * psi.norm()) + (upp * psi).norm();
    Ok((ray.norm(), scale))
}

/// Max over `grid` of `|Ray psi| / scale`.
///
/// The difference step is `min(1e-3, 0.05 * range, 0.003 * |c - c0|^{1/n})`,
/// the last term when the branch records a critical point.
///
/// `scale` is the pointwise size of the terms of the operator, floored at
/// `1e-6` times its largest value on the grid so that isolated points where
/// every term vanishes do not dominate.
pub fn rayleigh_residual(
    branch: &SolutionBranch,
    p: &ShearProfile,
    alpha: f64,
    c: Complex64,
    grid: &[f64],
) -> Result<f64> {
    let span = branch.range.1 - branch.range.0;
    let mut h = RESIDUAL_STEP.min(0.05 * span);
    if alpha != 0.0 {
        // Resolve the oscillation or decay scale 1/alpha.
        h = h.min(0.02 / alpha.abs());
    }
    if let Some(cp) = branch.meta.critical_point {
        let local = (branch.meta.c - cp.c0).norm().powf(1.0 / cp.order as f64);
        h = h.min(0.003 * local);
    }
    rayleigh_residual_with_step(branch, p, alpha, c, grid, h)
}

pub fn rayleigh_residual_with_step(
    branch: &SolutionBranch,
    p: &ShearProfile,
    alpha: f64,
    c: Complex64,
    grid: &[f64],
    h: f64,
) -> Result<f64> {
    let terms: Vec<(f64, f64)> =
        grid.iter().map(|&y| residual_terms(branch, p, alpha, c, y, h)).collect::<Result<_>>()?;
    let floor = 1e-6 * terms.iter().fold(0.0f64, |m, t| m.max(t.1));
    let mut worst: f64 = 0.0;
    for (r, s) in terms {
        let s = s.max(floor);
        worst = worst.max(if s == 0.0 { r } else { r / s });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{BranchMeta, LogBranch, Method};

    fn exp_branch(alpha: f64, k: f64) -> SolutionBranch {
        let meta = BranchMeta::new(Complex64::new(0.0, 1.0), alpha, Method::Smooth);
        SolutionBranch::from_fn(
            move |y| {
                let e = Complex64::new((k * y).exp(), 0.0);
                Ok((e, e * k))
            },
            LogBranch::None,
            meta,
            (-1.0, 1.0),
        )
    }

    #[test]
    fn exact_solution_of_free_case() {
        let p = ShearProfile::zero();
        let c = Complex64::new(0.0, 1.0);
        let grid: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let r = rayleigh_residual(&exp_branch(0.8, 0.8), &p, 0.8, c, &grid).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn wrong_solution_is_detected() {
        let p = ShearProfile::zero();
        let c = Complex64::new(0.0, 1.0);
        let r = rayleigh_residual(&exp_branch(0.8, 0.5), &p, 0.8, c, &[0.0, 0.5]).unwrap();
        assert!(r > 0.1);
    }

    #[test]
    fn difference_converges_at_fourth_order() {
        let b = exp_branch(1.0, 3.0);
        let exact = 9.0f64;
        let e1 = (second_derivative(&b, 0.0, 1e-2).unwrap().re - exact).abs();
        let e2 = (second_derivative(&b, 0.0, 5e-3).unwrap().re - exact).abs();
        let ratio = e1 / e2;
        assert!(ratio > 8.0 && ratio < 32.0, "{ratio}");
        // One-sided stencil at the range end.
        let e = (second_derivative(&b, 1.0, 1e-3).unwrap().re - 9.0 * 3.0f64.exp()).abs();
        assert!(e < 1e-6 * 9.0 * 3.0f64.exp());
    }

    #[test]
    fn smooth_solution_at_zero_wavenumber() {
        // U - c solves the alpha = 0 equation exactly.
        let p = ShearProfile::polynomial(vec![0.0, 1.0, 0.0, 1.0], crate::profiles::Domain::Line);
        let c = Complex64::new(0.1, 0.01);
        let pc = p.clone();
        let meta = BranchMeta::new(c, 0.0, Method::Smooth);
        let b = SolutionBranch::from_fn(
            move |y| Ok((pc.value(y) - c, Complex64::new(pc.d(y, 1), 0.0))),
            LogBranch::None,
            meta,
            (-1.0, 1.0),
        );
        let grid: Vec<f64> = (0..=10).map(|i| -0.9 + 0.18 * i as f64).collect();
        let r = rayleigh_residual(&b, &p, 0.0, c, &grid).unwrap();
        assert!(r < 1e-10, "{r}");
    }
}
