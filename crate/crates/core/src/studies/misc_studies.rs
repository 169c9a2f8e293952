use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::green::{adjoint_conjugation_residual, solve_forced, GreenKernel};
use crate::local::{bounded_ratio, partial_fraction, root_sum, root_sum_float};
use crate::profiles::CriticalPoint;
use crate::wkbj::{matched_minus, Thresholds};

/// Manufactured solution, boundary value and linearity of the forced solver.
pub(super) fn green_residual(cfg: &StudyConfig) -> Result<StudyReport> {
    let p = cfg.profile_or("exp_decay")?;
    let c = cfg.c_or(0.3, 0.2);
    let alphas = cfg.grid.alpha.clone().unwrap_or_else(|| vec![0.5]);
    let mut cols = vec![col("alpha", "wavenumber"), col("y", "position")];
    cols.extend(complex_cols("psi", "solve_forced(Ray(phi))"));
    cols.push(col("phi", "manufactured solution y e^{-y}"));
    cols.push(col("error", "|psi - phi|"));
    let mut table = Table::new(cols);
    let ys = linspace(0.0, 20.0, 80);
    let per = par_map(&alphas, |&alpha| {
        let k = GreenKernel::new(&p, alpha, c, None)?;
        let phi = |y: f64| y * (-y).exp();
        let f = |y: f64| {
            let e = (-y).exp();
            let (v, d2) = (y * e, (y - 2.0) * e);
            (p.d(y, 0) - c) * (d2 - alpha * alpha * v) - p.d(y, 2) * v
        };
        let s = solve_forced(&k, f)?;
        let mut rows = Vec::new();
        let mut boundary = s.value(0.0)?.norm();
        for &y in ys.iter().filter(|&&y| y <= k.y_max()) {
            let v = s.value(y)?;
            rows.push(vec![alpha, y, v.re, v.im, phi(y), (v - phi(y)).norm()]);
        }
        // Random Gaussian forcings for the boundary value and linearity.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut forcings = Vec::new();
        for _ in 0..10 {
            let (y0, w) = (rng.random_range(0.5..6.0), rng.random_range(0.3..2.0));
            let a = cplx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let g = move |y: f64| a * (-((y - y0) / w).powi(2)).exp();
            boundary = boundary.max(solve_forced(&k, g)?.value(0.0)?.norm());
            forcings.push(g);
        }
        let (a, b) = (cplx(0.7, -1.3), cplx(2.1, 0.4));
        let (f0, f1) = (forcings[0], forcings[1]);
        let (s0, s1) = (solve_forced(&k, f0)?, solve_forced(&k, f1)?);
        let sl = solve_forced(&k, |y| a * f0(y) + b * f1(y))?;
        let mut lin = 0.0f64;
        for y in linspace(0.0, k.y_max(), 200) {
            let expect = a * s0.value(y)? + b * s1.value(y)?;
            lin = lin.max((sl.value(y)? - expect).norm() / expect.norm().max(1.0));
        }
        Ok((rows, boundary, lin))
    })?;
    let (mut boundary, mut lin) = (0.0f64, 0.0f64);
    for (rows, b, l) in per {
        table.rows.extend(rows);
        boundary = boundary.max(b);
        lin = lin.max(l);
    }
    let err = table.rows.iter().map(|r| r[5]).fold(0.0, f64::max);
    let scale = table.rows.iter().map(|r| r[4].abs()).fold(0.0, f64::max);
    let rel = err / scale;
    let mut rep = StudyReport::new(StudyKind::GreenResidual, table);
    rep.values.insert("manufactured_relative_error".into(), rel);
    rep.values.insert("boundary_value".into(), boundary);
    rep.values.insert("linearity_error".into(), lin);
    rep.checks.push(Check::at_most("A5.manufactured", "sup |psi - phi| / sup |phi|", rel, 1e-6));
    rep.checks.push(Check::at_most("A5.boundary", "max |psi(0)| over 11 forcings", boundary, 1e-10));
    rep.checks.push(Check::at_most("A5.linearity", "sup |S(af + bg) - aS(f) - bS(g)| / max(1, sup |aS(f) + bS(g)|)", lin, 1e-8));
    Ok(rep)
}

/// Small-regime amplification `|psi_-(-y0)| / |psi_-(y0)|` against `x = alpha |c|^{1/n}`.
pub(super) fn amplification(cfg: &StudyConfig) -> Result<StudyReport> {
    let ns = cfg.orders(&[2])?;
    let mags = cfg.grid.c_abs.clone().unwrap_or_else(|| vec![1e-6, 1e-5, 1e-4]);
    let alphas = cfg.grid.alpha.clone().unwrap_or_else(|| vec![1.0]);
    let arg = cfg.grid.c_arg.unwrap_or_else(default_arg);
    let th = Thresholds { theta: cfg.grid.theta.unwrap_or(12.0), ..Thresholds::default() };
    let mut table = Table::new(vec![
        col("n", "critical point order"),
        col("alpha", "wavenumber"),
        col("c_abs", "|c|"),
        col("x", "alpha |c|^{1/n}"),
        col("amplification", "|psi_-(-y0)| / |psi_-(y0)|, y0 = sigma0 / alpha"),
    ]);
    let mut tuples = Vec::new();
    for &n in &ns {
        for &a in &alphas {
            for &m in &mags {
                tuples.push((n, a, m));
            }
        }
    }
    table.rows = par_map(&tuples, |&(n, alpha, m)| {
        let c = num_complex::Complex64::from_polar(m, arg);
        let s = matched_minus(&power_profile(n), CriticalPoint::new(0.0, 0.0, n), c, alpha, &th)?;
        let y0 = s.regime.y0;
        let amp = s.branch.value(-y0)?.norm() / s.branch.value(y0)?.norm();
        Ok(vec![n as f64, alpha, m, s.regime.x, amp])
    })?;
    let mut rep = StudyReport::new(StudyKind::Amplification, table);
    for &n in &ns {
        let rows: Vec<&Vec<f64>> = rep.table.rows.iter().filter(|r| r[0] == n as f64).collect();
        if rows.len() < 2 {
            continue;
        }
        let xs: Vec<f64> = rows.iter().map(|r| r[3].ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r[4].ln()).collect();
        let slope = fit_slope(&xs, &ys);
        let expect = -(2.0 * n as f64 - 1.0);
        rep.values.insert(format!("slope_n{n}"), slope);
        rep.checks.push(Check::within(&format!("A7.n{n}"), "log-log slope of the amplification", slope, expect - 0.3, expect + 0.3));
    }
    Ok(rep)
}

fn bounded_ratio_sup(n: usize, m: usize) -> f64 {
    let mut s: f64 = 0.0;
    for it in 0..=24 {
        let theta = 2.0 * PI * it as f64 / 24.0;
        for t in linspace(-10.0, 10.0, m) {
            s = s.max(bounded_ratio(t, theta, n));
        }
        for k in 1..=m / 10 {
            let d = 1e-1 * k as f64 / (m / 10) as f64;
            for t in [1.0 - d, 1.0 + d, -1.0 - d, -1.0 + d] {
                s = s.max(bounded_ratio(t, theta, n));
            }
        }
    }
    s
}

/// Roots-of-unity sums, partial fractions, the adjoint identity and the bounded ratio.
pub(super) fn identities(cfg: &StudyConfig) -> Result<StudyReport> {
    let mut table = Table::new(vec![
        col("group", "1 root_sum, 2 partial-fraction reconstruction, 3 adjoint conjugation, 4 bounded_ratio"),
        col("n", "order"),
        col("parameter", "p for group 1, sample index for 2, case for 3, 0 for 4"),
        col("error", "absolute error (1), relative error (2), residual (3), relative change of the sup under 4x refinement (4)"),
    ]);
    for n in 1..=8u32 {
        for p in -40..=40i64 {
            let f = root_sum_float(n, p);
            table.rows.push(vec![1.0, n as f64, p as f64, (f - root_sum(n, p) as f64).norm()]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..50 {
        let deg = rng.random_range(1..10);
        let coeffs: Vec<f64> = (0..deg).map(|_| rng.random_range(-2.0..2.0)).collect();
        let n = rng.random_range(1..=4usize);
        let theta = rng.random_range(-3.1..3.1);
        let pf = partial_fraction(&coeffs, n, theta);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let t = cplx(rng.random_range(-3.0..3.0), 0.0);
            let d = t.powu(n as u32) - num_complex::Complex64::from_polar(1.0, theta);
            if d.norm() <= 1e-2 {
                continue;
            }
            let pv = coeffs.iter().rev().fold(cplx(0.0, 0.0), |acc, &c| acc * t + c);
            let exact = pv / (d * d);
            worst = worst.max((pf.reconstruct(t) - exact).norm() / exact.norm().max(1.0));
        }
        table.rows.push(vec![2.0, n as f64, i as f64, worst]);
    }
    let c = cplx(0.3, 0.2);
    let sin = |y: f64| cplx(y.sin(), 0.0);
    let r1 = adjoint_conjugation_residual(&ShearProfile::exp_decay(), 0.5, c, sin, &linspace(0.5, 5.0, 90))?;
    let poly = line_poly(vec![1.0, 1.0, -1.0]);
    let r2 = adjoint_conjugation_residual(&poly, 0.7, c, |y| cplx(y * y, y), &linspace(-1.0, 1.0, 20))?;
    let r3 = adjoint_conjugation_residual(&poly, 0.7, c, |y| cplx(y.cos(), (2.0 * y).sin()), &linspace(-1.0, 1.0, 80))?;
    table.rows.push(vec![3.0, 0.0, 1.0, r1]);
    table.rows.push(vec![3.0, 0.0, 2.0, r2]);
    table.rows.push(vec![3.0, 0.0, 3.0, r3]);
    let sups = par_map(&[2usize, 3, 4, 5, 6], |&n| Ok((n, bounded_ratio_sup(n, 2000), bounded_ratio_sup(n, 8000))))?;
    for (n, a, b) in sups {
        table.rows.push(vec![4.0, n as f64, 0.0, (b / a - 1.0).abs()]);
    }
    let group_max = |g: f64, t: &Table| t.rows.iter().filter(|r| r[0] == g).map(|r| r[3]).fold(0.0, f64::max);
    let (e1, e2, e3, e4) = (group_max(1.0, &table), group_max(2.0, &table), group_max(3.0, &table), group_max(4.0, &table));
    let mut rep = StudyReport::new(StudyKind::Identities, table);
    rep.checks.push(Check::at_most("A8.root_sum", "max |float sum - root_sum|, n <= 8, |p| <= 40", e1, 1e-9));
    rep.checks.push(Check::at_most("A8.partial_fraction", "max relative reconstruction error, 50 samples", e2, 1e-10));
    rep.checks.push(Check::at_most("A8.adjoint", "max adjoint conjugation residual", e3, 1e-7));
    rep.checks.push(Check::at_most("A8.bounded_ratio", "max relative change of the sup under 4x refinement", e4, 0.05));
    Ok(rep)
}
