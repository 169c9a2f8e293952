use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::branch::{wronskian, SolutionBranch};
use crate::local::{local_pair_alpha0, LocalOptions};
use crate::oracle::contour::{default_side, detour_path, detour_radius, integrate_contour, ContourOptions};
use crate::perturb::{local_pair_alpha, PerturbOptions};
use crate::profiles::CriticalPoint;

fn pair_branches(n: usize, c: Complex64, alpha: f64) -> Result<(SolutionBranch, SolutionBranch)> {
    let p = power_profile(n);
    let cp = CriticalPoint::new(0.0, 0.0, n);
    if alpha == 0.0 {
        let pair = local_pair_alpha0(&p, cp, c, &LocalOptions::default())?;
        Ok((pair.psi1, pair.psi2))
    } else {
        let pair = local_pair_alpha(&p, cp, c, alpha, &PerturbOptions::default())?;
        Ok((pair.psi1, pair.psi2))
    }
}

/// Side of the axis with no zero of `y^n - c` inside the detour disc, preferring the default side.
fn free_side(n: usize, c: Complex64) -> Option<f64> {
    let roots: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(c.norm().powf(1.0 / n as f64), (c.arg() + 2.0 * PI * k as f64) / n as f64)).collect();
    let d = default_side(c);
    [d, -d].into_iter().find(|&s| roots.iter().all(|z| z.im * s <= 0.0))
}

/// Sup over `pts` of `|b - o|`, divided by the sup of `|o|`.
fn sup_relative(b: &SolutionBranch, o: impl Fn(f64) -> Result<Complex64>, pts: &[f64]) -> Result<f64> {
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for &y in pts {
        let ov = o(y)?;
        err = err.max((b.value(y)? - ov).norm());
        scale = scale.max(ov.norm());
    }
    Ok(err / scale)
}

/// Local branches against contour integration started from their own data at `y = y*`.
pub(super) fn oracle_verify(cfg: &StudyConfig) -> Result<StudyReport> {
    let ns = cfg.orders(&[1, 2, 3])?;
    let alphas = cfg.grid.alpha.clone().unwrap_or_else(|| vec![0.0, 0.3]);
    let mags = cfg.grid.c_abs.clone().unwrap_or_else(|| vec![1e-3]);
    let arg = cfg.grid.c_arg.unwrap_or_else(default_arg);
    let y_end = cfg.grid.y_probe.unwrap_or(0.2);
    let mut table = Table::new(vec![
        col("n", "critical point order"),
        col("alpha", "wavenumber"),
        col("c_abs", "|c|"),
        col("c_arg", "arg c"),
        col("branch", "1 or 2"),
        col("real_path_err", "sup |psi - oracle| / sup |oracle| on [-y*, y*], oracle on the real axis"),
        col("detour_side", "detour side (+1 above, -1 below, 0 when both sides hold zeros)"),
        col("detour_err", "same error on the real legs of the detoured path (0 when no detour)"),
    ]);
    let mut tuples = Vec::new();
    for &n in &ns {
        for &a in &alphas {
            for &m in &mags {
                tuples.push((n, a, m));
            }
        }
    }
    let pts = linspace(-y_end, y_end, 80);
    let opts = ContourOptions { estimate_error: false, ..ContourOptions::tight() };
    let rows = par_map(&tuples, |&(n, alpha, m)| {
        let c = Complex64::from_polar(m, arg);
        let p = power_profile(n);
        let (b1, b2) = pair_branches(n, c, alpha)?;
        let mut out = Vec::new();
        for (k, b) in [(1.0, &b1), (2.0, &b2)] {
            let init = b.eval(y_end)?;
            let real = [Complex64::new(y_end, 0.0), Complex64::new(-y_end, 0.0)];
            let sol = integrate_contour(&p, alpha, c, &real, init, &opts)?;
            let e_real = sup_relative(b, |y| Ok(sol.at_real(y)?.0), &pts)?;
            let (side, e_det) = match free_side(n, c) {
                Some(s) => {
                    let r = detour_radius(c, n);
                    let mut path = detour_path(-y_end, y_end, &[0.0], r, s, 64)?;
                    path.reverse();
                    let det = integrate_contour(&p, alpha, c, &path, init, &opts)?;
                    let on_legs: Vec<f64> = pts.iter().copied().filter(|y| y.abs() >= r).collect();
                    (s, sup_relative(b, |y| Ok(det.at_real(y)?.0), &on_legs)?)
                }
                None => (0.0, 0.0),
            };
            out.push(vec![n as f64, alpha, m, arg, k, e_real, side, e_det]);
        }
        Ok(out)
    })?;
    table.rows = rows.into_iter().flatten().collect();
    let worst = table.rows.iter().map(|r| r[5].max(r[7])).fold(0.0, f64::max);
    let mut rep = StudyReport::new(StudyKind::OracleVerify, table);
    rep.values.insert("max_relative_error".into(), worst);
    rep.checks.push(Check::at_most("A1", "max relative error against the contour oracle", worst, 1e-4));
    Ok(rep)
}

/// Wronskian exponent and localisation of `psi_1`.
pub(super) fn local_scaling(cfg: &StudyConfig) -> Result<StudyReport> {
    let ns = cfg.orders(&[2, 3])?;
    let mags = cfg.grid.c_abs.clone().unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4]);
    let arg = cfg.grid.c_arg.unwrap_or_else(default_arg);
    let y = cfg.grid.y_probe.unwrap_or(0.05);
    let mut table = Table::new(vec![
        col("n", "critical point order"),
        col("c_abs", "|c|"),
        col("c_arg", "arg c"),
        col("wronskian_abs", "|W| of the zeta-normalised pair"),
        col("psi1_left", "|c|^{2-1/n} |psi_1(-y*)| (zeta normalisation)"),
        col("psi1_right", "|c|^{2-1/n} |psi_1(+y*)| (zeta normalisation)"),
    ]);
    // Wronskian rows at `arg`; localisation rows at arg pi/2 for n = 2.
    let mut tuples: Vec<(usize, f64, f64)> = Vec::new();
    for &n in &ns {
        for &m in &mags {
            tuples.push((n, m, arg));
        }
    }
    let loc_arg = PI / 2.0;
    if ns.contains(&2) && arg != loc_arg {
        for &m in &mags {
            tuples.push((2, m, loc_arg));
        }
    }
    table.rows = par_map(&tuples, |&(n, m, a)| {
        let c = Complex64::from_polar(m, a);
        let pair = local_pair_alpha0(&power_profile(n), CriticalPoint::new(0.0, 0.0, n), c, &LocalOptions::default())?;
        let w = wronskian(&pair.psi1, &pair.psi2, y)?;
        Ok(vec![n as f64, m, a, w.norm(), pair.psi1.value(-y)?.norm(), pair.psi1.value(y)?.norm()])
    })?;
    let mut rep = StudyReport::new(StudyKind::LocalScaling, table);
    for &n in &ns {
        let rows: Vec<&Vec<f64>> = rep.table.rows.iter().filter(|r| r[0] == n as f64 && r[2] == arg).collect();
        if rows.len() < 2 {
            continue;
        }
        let xs: Vec<f64> = rows.iter().map(|r| r[1].ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r[3].ln()).collect();
        let slope = fit_slope(&xs, &ys);
        let expect = 2.0 - 1.0 / n as f64;
        rep.values.insert(format!("wronskian_slope_n{n}"), slope);
        rep.checks.push(Check::within(&format!("A2a.n{n}"), "log|W| vs log|c| slope", slope, expect - 0.1, expect + 0.1));
    }
    // Per-decade ratios, sorted by decreasing |c|.
    let decade = |a: f64, rows: &[Vec<f64>]| -> Vec<(f64, f64)> {
        let mut r: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == 2.0 && r[2] == a).collect();
        r.sort_by(|x, y| y[1].total_cmp(&x[1]));
        r.windows(2)
            .filter(|w| ((w[0][1] / w[1][1]).log10() - 1.0).abs() < 1e-9)
            .map(|w| (w[0][4] / w[1][4], w[0][5] / w[1][5]))
            .collect()
    };
    let rows = rep.table.rows.clone();
    let main = decade(loc_arg, &rows);
    if !main.is_empty() {
        let left = main.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let right = main.iter().map(|r| r.1.max(1.0 / r.1)).fold(0.0, f64::max);
        rep.checks.push(Check::new("A2b.left", "min per-decade decrease of |psi_1(-y*)|, n = 2, arg c = pi/2", left, ">= 10".into(), left >= 10.0));
        rep.checks.push(Check::at_most("A2b.right", "max per-decade variation of |psi_1(+y*)|, n = 2, arg c = pi/2", right, 3.0));
    }
    for (k, (l, r)) in decade(arg, &rows).into_iter().enumerate() {
        rep.values.insert(format!("info_left_ratio_decade{k}_arg"), l);
        rep.values.insert(format!("info_right_ratio_decade{k}_arg"), r);
    }
    Ok(rep)
}
