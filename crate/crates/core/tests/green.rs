use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayleigh::branch::{BranchMeta, LogBranch, Method, SolutionBranch};
use rayleigh::green::*;
use rayleigh::oracle::residual::second_derivative;
use rayleigh::profiles::{Domain, ShearProfile};
use rayleigh::RayleighError;

type C = Complex64;

fn c0() -> C {
    C::new(0.3, 0.2)
}

fn grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
}

fn kernel() -> GreenKernel {
    GreenKernel::new(&ShearProfile::exp_decay(), 0.5, c0(), None).unwrap()
}

/// `Ray(psi) - f` by central differences.
fn forced_residual<F: Fn(f64) -> C>(b: &SolutionBranch, p: &ShearProfile, alpha: f64, c: C, f: F, pts: &[f64]) -> f64 {
    pts.iter()
        .map(|&y| {
            let psi = b.value(y).unwrap();
            let d2 = second_derivative(b, y, 1e-4).unwrap();
            let ray = (p.value(y) - c) * (d2 - alpha * alpha * psi) - p.derivative(y, 2).unwrap() * psi;
            (ray - f(y)).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn free_kernel_closed_form() {
    let alpha = 0.8;
    let k = GreenKernel::new(&ShearProfile::zero(), alpha, c0(), None).unwrap();
    // The interior part depends on which growing solution is used; the total does not.
    for (x, y) in [(0.5, 1.5), (2.0, 0.3), (1.0, 1.0), (3.0, 7.0)] {
        let g = total_green(&k, x, y).unwrap();
        let e = ((-alpha * (x + y)).exp() - (-alpha * (x - y).abs()).exp()) / (2.0 * alpha * -c0());
        assert!((g - e).norm() < 1e-8 * e.norm(), "{g} {e}");
    }
}

#[test]
fn kernel_decays_and_is_continuous() {
    let k = kernel();
    let a = k.pair.alpha;
    let env: Vec<f64> = grid(4.0, 20.0, 16)
        .iter()
        .map(|&y| interior_green(&k, 1.0, y).unwrap().norm() * (a * (y - 1.0)).exp())
        .collect();
    let (lo, hi) = env.iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo < 2.0, "{env:?}");
    for x in [0.3, 1.2, 5.0] {
        let l = interior_green(&k, x, x - 1e-13).unwrap();
        let r = interior_green(&k, x, x + 1e-13).unwrap();
        assert!((l - r).norm() < 1e-10 * l.norm().max(1.0));
    }
    for x in grid(0.0, 10.0, 20) {
        assert!(total_green(&k, x, 0.0).unwrap().norm() < 1e-12);
    }
    assert!(k.boundary_factor.is_finite());
}

#[test]
fn derivative_jump_matches_local_convention() {
    // (U(x) - c) times the jump of d/dy G_int is 1, the jump of the local kernel.
    let k = kernel();
    for x in [0.4, 2.0, 6.0] {
        let (m, dm) = k.pair.psi_minus.eval(x).unwrap();
        let (p, dp) = k.pair.psi_plus.eval(x).unwrap();
        let jump = (p * dm - m * dp) / k.wronskian;
        assert!((jump - 1.0).norm() < 1e-8);
    }
}

#[test]
fn zero_forcing_gives_zero() {
    let k = kernel();
    let s = solve_forced(&k, |_| C::new(0.0, 0.0)).unwrap();
    for y in [0.0, 1.0, 10.0] {
        assert_eq!(s.value(y).unwrap(), C::new(0.0, 0.0));
    }
}

#[test]
fn manufactured_solution_is_recovered() {
    let (p, alpha, c) = (ShearProfile::exp_decay(), 0.5, c0());
    let k = kernel();
    let phi = |y: f64| y * (-y).exp();
    let f = |y: f64| {
        let e = (-y).exp();
        let (v, d2) = (y * e, (y - 2.0) * e);
        (e - c) * (d2 - alpha * alpha * v) - e * v
    };
    let s = solve_forced(&k, f).unwrap();
    let scale = (-1.0f64).exp();
    for y in grid(0.0, 20.0, 81) {
        assert!((s.value(y).unwrap() - phi(y)).norm() <= 1e-6 * scale, "y={y}");
    }
    assert!(s.value(0.0).unwrap().norm() <= 1e-10);
    assert!(forced_residual(&s, &p, alpha, c, f, &grid(0.2, 15.0, 60)) <= 1e-6);
}

#[test]
fn gaussian_bump_residual() {
    let (p, alpha, c) = (ShearProfile::exp_decay(), 0.5, c0());
    let k = kernel();
    let f = |y: f64| C::new((-(y - 2.0) * (y - 2.0)).exp(), 0.0);
    let s = solve_forced(&k, f).unwrap();
    let r = forced_residual(&s, &p, alpha, c, f, &grid(0.2, 15.0, 75));
    assert!(r <= 1e-6, "{r}");
    let tail = s.value(k.y_max()).unwrap().norm();
    let peak = grid(0.0, 10.0, 100).iter().map(|&y| s.value(y).unwrap().norm()).fold(0.0, f64::max);
    // Past the bump psi follows psi_-, so the cut value is about e^{-alpha (y_max - 2)}.
    assert!(tail <= 1e-4 * peak, "{tail} {peak}");
}

#[test]
fn boundary_value_and_linearity_for_random_forcings() {
    let k = kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sols = Vec::new();
    let mut forcings = Vec::new();
    for _ in 0..10 {
        let (y0, w, a) = (rng.random_range(0.5..6.0), rng.random_range(0.3..2.0), C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let f = move |y: f64| a * (-((y - y0) / w).powi(2)).exp();
        let s = solve_forced(&k, f).unwrap();
        assert!(s.value(0.0).unwrap().norm() <= 1e-10);
        sols.push(s);
        forcings.push(f);
    }
    let (a, b) = (C::new(0.7, -1.3), C::new(2.1, 0.4));
    let (f0, f1) = (forcings[0], forcings[1]);
    let s = solve_forced(&k, |y| a * f0(y) + b * f1(y)).unwrap();
    for y in grid(0.0, 15.0, 31) {
        let lin = a * sols[0].value(y).unwrap() + b * sols[1].value(y).unwrap();
        assert!((s.value(y).unwrap() - lin).norm() <= 1e-8);
    }
}

#[test]
fn near_eigenvalue_is_refused() {
    let mut pair = kernel().pair;
    let meta = BranchMeta::new(c0(), 0.5, Method::Integrated);
    pair.psi_minus = SolutionBranch::from_fn(
        |y: f64| Ok((C::new((-y).exp() * y.sin(), 0.0), C::new((-y).exp() * (y.cos() - y.sin()), 0.0))),
        LogBranch::None,
        meta,
        (0.0, pair.y_max),
    );
    let e = GreenKernel::from_pair(&ShearProfile::exp_decay(), pair).unwrap_err();
    assert!(matches!(e, RayleighError::NearEigenvalue { .. }));
}

#[test]
fn adjoint_identity() {
    let c = c0();
    let poly = ShearProfile::polynomial(vec![1.0, 1.0, -1.0], Domain::Line);
    let r = adjoint_conjugation_residual(&poly, 0.7, c, |y| C::new(y * y, y), &grid(-1.0, 1.0, 20)).unwrap();
    assert!(r <= 1e-8, "{r}");
    let p = ShearProfile::exp_decay();
    let sin = |y: f64| C::new(y.sin(), 0.0);
    let r = adjoint_conjugation_residual(&p, 0.5, c, sin, &grid(0.5, 5.0, 90)).unwrap();
    assert!(r <= 1e-7, "{r}");
    // Sixth-order differencing: halving the step divides the residual by about 64.
    let r1 = adjoint_conjugation_residual(&p, 0.5, c, sin, &grid(1.0, 3.0, 10)).unwrap();
    let r2 = adjoint_conjugation_residual(&p, 0.5, c, sin, &grid(1.0, 3.0, 20)).unwrap();
    assert!((32.0..=128.0).contains(&(r1 / r2)), "{r1} {r2}");
}
