use std::f64::consts::PI;

use num_complex::Complex64;
use rayleigh::oracle::rayleigh_residual;
use rayleigh::profiles::{CriticalPoint, Domain, ShearProfile};
use rayleigh::wkbj::*;
use rayleigh::RayleighError;

fn grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
}

fn origin(n: usize) -> CriticalPoint {
    CriticalPoint::new(0.0, 0.0, n)
}

#[test]
fn condition_examples() {
    let c = Complex64::new(0.3, 0.2);
    assert!(wkbj_condition(&ShearProfile::exp_decay(), c, 2.0, 5.0) < 1e-2);
    let ci = Complex64::new(0.0, 1e-3);
    let r = wkbj_condition(&ShearProfile::power(2), ci, 1.0, 1e-2);
    // Closed form for U = y^2: K = 1 + 2/(y^2 - c), K' = -4y/(y^2 - c)^2.
    let w = Complex64::new(1e-4, 0.0) - ci;
    let exact = (-4e-2 / (w * w)).norm() / (1.0 + 2.0 / w).norm().powf(1.5);
    assert!((r - exact).abs() < 1e-12 * exact && r > 0.1, "{r}");
    let flat = ShearProfile::polynomial(vec![0.7], Domain::Line);
    assert_eq!(wkbj_condition(&flat, c, 1.5, 0.2), 0.0);
}

#[test]
fn constant_coefficient_branch_is_exact() {
    let p = ShearProfile::zero();
    let alpha = 1.7;
    let b = wkbj_branch(&p, Complex64::new(0.1, 0.4), alpha, 0.5, -1.0, (0.0, 3.0), 0.1).unwrap();
    assert_eq!(b.value(0.5).unwrap(), Complex64::new(1.0, 0.0));
    for y in [0.0, 1.3, 3.0] {
        let (v, d) = b.eval(y).unwrap();
        let e = (-alpha * (y - 0.5)).exp();
        assert!((v - e).norm() < 1e-13 * e.max(1.0));
        assert!((d + alpha * e).norm() < 1e-12 * e.max(1.0));
    }
}

#[test]
fn normalised_at_reference_point() {
    let p = ShearProfile::exp_decay();
    let b = wkbj_branch(&p, Complex64::new(0.3, 0.2), 4.0, 3.3, 1.0, (2.0, 6.0), 0.1).unwrap();
    assert!((b.value(3.3).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn residual_decays_with_alpha() {
    // Leading order only: the relative residual is K''/K^2 sized, so it falls like alpha^-4.
    let p = ShearProfile::exp_decay();
    let c = Complex64::new(0.3, 0.2);
    let res = |a: f64| {
        let b = wkbj_branch(&p, c, a, 2.0, -1.0, (2.0, 6.0), 0.1).unwrap();
        rayleigh_residual(&b, &p, a, c, &grid(2.0, 6.0, 80)).unwrap()
    };
    let (r4, r8) = (res(4.0), res(8.0));
    let ratio = r4 / r8;
    assert!(ratio > 16.0 / 1.5 && ratio < 16.0 * 1.5, "{r4} {r8}");
}

#[test]
fn measured_envelope_constant_is_stable() {
    let p = ShearProfile::exp_decay();
    let c = Complex64::new(0.3, 0.2);
    let consts: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&a| {
            let ph = PhaseData::new(&p, c, a, 3.0, (3.0, 8.0)).unwrap();
            assert!(ph.max_phase_jump() < PI / 2.0);
            let b = wkbj_branch(&p, c, a, 3.0, -1.0, (3.0, 8.0), 0.5).unwrap();
            grid(3.0, 8.0, 50)
                .iter()
                .map(|&y| b.value(y).unwrap().norm() / (-ph.phase_integral(y).re).exp())
                .fold(0.0, f64::max)
        })
        .collect();
    let (lo, hi) = consts.iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo < 2.0, "{consts:?}");
}

#[test]
fn invalid_range_is_refused() {
    let p = ShearProfile::power(2);
    let r = wkbj_branch(&p, Complex64::new(0.0, 1e-3), 1.0, 0.01, -1.0, (0.01, 0.2), 0.1);
    assert!(matches!(r, Err(RayleighError::WkbjInvalid { .. })));
}

#[test]
fn regime_examples() {
    let th = Thresholds::default();
    assert_eq!(classify_regime(0.1, 1e-4, 2, &th).tag, RegimeTag::Small);
    assert_eq!(classify_regime(1e4, 1e-2, 2, &th).tag, RegimeTag::Large);
    assert_eq!(classify_regime(10.0, 1e-2, 2, &th).tag, RegimeTag::Middle);
    let r = classify_regime(2.0, 1e-4, 2, &th);
    assert!((r.y0 - 0.25).abs() < 1e-15 && (r.y1 - (0.01 + 5.0)).abs() < 1e-14);
    // Tags only change at the thresholds.
    let mut last = RegimeTag::Small;
    let mut changes = Vec::new();
    for k in 0..400 {
        let x = 10f64.powf(-3.0 + 5.0 * k as f64 / 399.0);
        let t = classify_regime(x, 1.0, 1, &th).tag;
        if t != last {
            changes.push(x);
            last = t;
        }
    }
    assert_eq!(changes.len(), 2);
    assert!(changes[0] > th.sigma && changes[0] < th.sigma * 1.05);
    assert!(changes[1] >= th.sigma_prime && changes[1] < th.sigma_prime * 1.05);
}

#[test]
fn small_regime_full_range_residual() {
    let p = ShearProfile::power(2);
    let c = Complex64::from_polar(1e-3, PI / 4.0);
    let th = Thresholds { sigma1: 25.0, theta: 60.0, ..Thresholds::default() };
    let m = matched_minus(&p, origin(2), c, 0.5, &th).unwrap();
    assert_eq!(m.regime.tag, RegimeTag::Small);
    for (dv, dd) in m.jumps().unwrap() {
        assert!(dv <= 1e-10 && dd <= 1e-10);
    }
    let pts = grid(-59.9, 59.9, 601);
    // Per-piece windows keep the normalisation floor local.
    for w in m.pieces.iter() {
        let g: Vec<f64> = pts.iter().copied().filter(|&y| y > w.lo && y < w.hi).collect();
        if g.len() > 1 {
            let r = rayleigh_residual(&m.branch, &p, 0.5, c, &g).unwrap();
            assert!(r <= 1e-5, "{:?} residual {r}", w.kind);
        }
    }
}

#[test]
fn small_regime_amplification_slope() {
    let p = ShearProfile::power(2);
    let th = Thresholds { theta: 12.0, ..Thresholds::default() };
    let pts: Vec<(f64, f64)> = [1e-6, 1e-5, 1e-4]
        .iter()
        .map(|&m| {
            let c = Complex64::from_polar(m, PI / 4.0);
            let s = matched_minus(&p, origin(2), c, 1.0, &th).unwrap();
            let y0 = s.regime.y0;
            let amp = s.branch.value(-y0).unwrap().norm() / s.branch.value(y0).unwrap().norm();
            (s.regime.x.ln(), amp.ln())
        })
        .collect();
    let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
    assert!((slope + 3.0).abs() <= 0.3, "{slope}");
}

#[test]
fn transport_amplification_is_bounded() {
    let p = ShearProfile::power(2);
    let c = Complex64::from_polar(1e-6, PI / 4.0);
    let th = Thresholds { theta: 12.0, ..Thresholds::default() };
    let amps: Vec<f64> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&a| {
            let s = matched_minus(&p, origin(2), c, a, &th).unwrap();
            let t = s.pieces.iter().rev().find(|w| w.kind == PieceKind::Transport).unwrap();
            t.branch.value(t.lo).unwrap().norm() / t.branch.value(t.hi).unwrap().norm()
        })
        .collect();
    for a in &amps {
        assert!(*a < 1e6 && *a / amps[0] < 2.0 && amps[0] / *a < 2.0, "{amps:?}");
    }
}

#[test]
fn middle_and_large_regimes() {
    let p = ShearProfile::power(2);
    let c = Complex64::from_polar(1e-2, PI / 4.0);
    let th = Thresholds::default();
    let m = matched_minus(&p, origin(2), c, 10.0, &Thresholds { theta: 2.0, ..th }).unwrap();
    assert_eq!(m.regime.tag, RegimeTag::Middle);
    assert!(rayleigh_residual(&m.branch, &p, 10.0, c, &grid(-1.99, 1.99, 201)).unwrap() < 1e-3);
    // Default thresholds need x >= 400 to overlap; here x = 100.
    let e = matched_minus(&p, origin(2), c, 1000.0, &th).unwrap_err();
    assert!(matches!(e, RayleighError::OverlapFailure(ref s) if s.contains("sigma1")));
    let m = matched_minus(&p, origin(2), c, 1000.0, &Thresholds { sigma1: 1.0, ..th }).unwrap();
    assert_eq!(m.regime.tag, RegimeTag::Large);
    assert!(m.pieces.iter().any(|w| w.kind == PieceKind::Local));
    for (dv, dd) in m.jumps().unwrap() {
        assert!(dv <= 1e-10 && dd <= 1e-10);
    }
    assert!(rayleigh_residual(&m.branch, &p, 1000.0, c, &grid(-0.299, 0.299, 601)).unwrap() < 1e-6);
}
