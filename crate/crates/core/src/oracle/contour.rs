//! Integration of the Rayleigh equation along polylines in the complex `y`-plane.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::ode::{self, OdeOptions, State, Trajectory};
use crate::branch::{BranchMeta, LogBranch, Method, SolutionBranch};
use crate::error::{RayleighError, Result};
use crate::profiles::ShearProfile;

#[derive(Debug, Clone, Copy)]
pub struct ContourOptions {
    pub ode: OdeOptions,
    /// Minimum estimated distance from the path to any zero of `U_s - c`.
    pub clearance: f64,
    /// Re-run with tolerances scaled down by `2^5` and report the difference.
    pub estimate_error: bool,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { ode: OdeOptions::default(), clearance: 0.0, estimate_error: true }
    }
}

impl ContourOptions {
    pub fn tight() -> Self {
        Self { ode: OdeOptions::tight(), ..Self::default() }
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = clearance;
        self
    }
}

struct Rhs {
    p: ShearProfile,
    alpha2: f64,
    c: Complex64,
}

impl Rhs {
    fn coefficient(&self, z: Complex64) -> Result<Complex64> {
        let u = self.p.derivative_complex(z, 0)? - self.c;
        let upp = self.p.derivative_complex(z, 2)?;
        if u.norm() == 0.0 {
            return Err(RayleighError::Pole { y: z.re, denominator: 0.0 });
        }
        Ok(self.alpha2 + upp / u)
    }

    /// Right-hand side in the segment parameter `s`, `y = a + s (b - a)`.
    fn segment(&self, a: Complex64, b: Complex64) -> impl Fn(f64, &State<2>) -> Result<State<2>> + '_ {
        let d = b - a;
        move |s, y| {
            let k = self.coefficient(a + d * s)?;
            Ok([d * y[1], d * k * y[0]])
        }
    }
}

struct Leg {
    a: Complex64,
    b: Complex64,
    traj: Trajectory<2>,
}

/// Solution along a polyline: states at every vertex plus dense evaluation on each leg.
pub struct ContourSolution {
    rhs: Arc<Rhs>,
    legs: Vec<Leg>,
    /// Difference between the run and a run with tolerances divided by 32.
    pub error_estimate: f64,
}

impl ContourSolution {
    pub fn vertices(&self) -> Vec<Complex64> {
        let mut v = vec![self.legs[0].a];
        v.extend(self.legs.iter().map(|l| l.b));
        v
    }

    /// `(value, deriv)` at every vertex.
    pub fn vertex_states(&self) -> Vec<(Complex64, Complex64)> {
        let s0 = self.legs[0].traj.points[0].1;
        let mut out = vec![(s0[0], s0[1])];
        out.extend(self.legs.iter().map(|l| {
            let s = l.traj.final_state();
            (s[0], s[1])
        }));
        out
    }

    pub fn final_state(&self) -> (Complex64, Complex64) {
        *self.vertex_states().last().unwrap()
    }

    /// State at parameter `s` in `[0, 1]` of leg `i`.
    pub fn at(&self, i: usize, s: f64) -> Result<(Complex64, Complex64)> {
        let leg = &self.legs[i];
        let f = self.rhs.segment(leg.a, leg.b);
        let st = leg.traj.eval(&f, s)?;
        Ok((st[0], st[1]))
    }

    /// State at the real point `y`, which must lie on a real leg of the path.
    pub fn at_real(&self, y: f64) -> Result<(Complex64, Complex64)> {
        for (i, leg) in self.legs.iter().enumerate() {
            if leg.a.im != 0.0 || leg.b.im != 0.0 {
                continue;
            }
            let (lo, hi) = (leg.a.re.min(leg.b.re), leg.a.re.max(leg.b.re));
            if y >= lo && y <= hi {
                return self.at(i, (y - leg.a.re) / (leg.b.re - leg.a.re));
            }
        }
        Err(RayleighError::InvalidArgument(format!("y = {y} is not on a real leg of the path")))
    }

    /// View as a branch on the real legs of the path.
    pub fn into_branch(self) -> SolutionBranch {
        let re: Vec<f64> = self.vertices().iter().filter(|v| v.im == 0.0).map(|v| v.re).collect();
        let lo = re.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = re.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let meta = BranchMeta::new(self.rhs.c, self.rhs.alpha2.sqrt(), Method::Integrated)
            .note(format!("contour error estimate {:.3e}", self.error_estimate));
        let me = Arc::new(self);
        SolutionBranch::from_fn(move |y| me.at_real(y), LogBranch::None, meta, (lo, hi))
    }
}

/// Lower estimate of the distance from `z` to the nearest zero of `U_s - c`.
fn root_distance(p: &ShearProfile, c: Complex64, z: Complex64) -> Result<f64> {
    let g = (p.derivative_complex(z, 0)? - c).norm();
    let mut best = f64::INFINITY;
    let mut fact = 1.0;
    for k in 1..=4 {
        fact *= k as f64;
        let dk = p.derivative_complex(z, k)?.norm();
        if dk > 0.0 {
            best = best.min((fact * g / dk).powf(1.0 / k as f64));
        }
    }
    Ok(best)
}

fn check_clearance(p: &ShearProfile, c: Complex64, path: &[Complex64], clearance: f64) -> Result<()> {
    if clearance <= 0.0 {
        return Ok(());
    }
    for w in path.windows(2) {
        let len = (w[1] - w[0]).norm();
        let m = ((len / (0.25 * clearance)).ceil() as usize).clamp(8, 20_000);
        for j in 0..=m {
            let z = w[0] + (w[1] - w[0]) * (j as f64 / m as f64);
            let d = root_distance(p, c, z)?;
            if d < clearance {
                return Err(RayleighError::ClearanceViolated { distance: d, clearance });
            }
        }
    }
    Ok(())
}

fn run(rhs: &Rhs, path: &[Complex64], init: (Complex64, Complex64), opts: &OdeOptions) -> Result<Vec<Leg>> {
    let mut state = [init.0, init.1];
    let mut legs = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let f = rhs.segment(w[0], w[1]);
        let traj = ode::solve(&f, 0.0, state, 1.0, opts)?;
        state = traj.final_state();
        legs.push(Leg { a: w[0], b: w[1], traj });
    }
    Ok(legs)
}

/// Integrate `psi'' = (alpha^2 + U''/(U - c)) psi` along `path` from `init = (psi, psi')` at `path[0]`.
pub fn integrate_contour(
    p: &ShearProfile,
    alpha: f64,
    c: Complex64,
    path: &[Complex64],
    init: (Complex64, Complex64),
    opts: &ContourOptions,
) -> Result<ContourSolution> {
    if path.len() < 2 {
        return Err(RayleighError::InvalidArgument("path needs at least two vertices".into()));
    }
    if !p.has_complex_extension() && path.iter().any(|z| z.im != 0.0) {
        return Err(RayleighError::NoComplexExtension);
    }
    check_clearance(p, c, path, opts.clearance)?;
    let rhs = Arc::new(Rhs { p: p.clone(), alpha2: alpha * alpha, c });
    let legs = run(&rhs, path, init, &opts.ode)?;
    let mut error_estimate = 0.0;
    if opts.estimate_error {
        let mut fine = opts.ode;
        fine.rtol /= 32.0;
        fine.atol /= 32.0;
        let legs2 = run(&rhs, path, init, &fine)?;
        for (l1, l2) in legs.iter().zip(&legs2) {
            let (a, b) = (l1.traj.final_state(), l2.traj.final_state());
            error_estimate = f64::max(error_estimate, (a[0] - b[0]).norm().max((a[1] - b[1]).norm()));
        }
    }
    Ok(ContourSolution { rhs, legs, error_estimate })
}

/// Default detour radius `max(2 |c|^{1/n}, 1e-2)`.
pub fn detour_radius(c: Complex64, n: usize) -> f64 {
    (2.0 * c.norm().powf(1.0 / n as f64)).max(1e-2)
}

/// Side of the real axis used for detours: below when `Im c >= 0`, above otherwise.
///
/// For `Im c > 0` and `U_s' > 0` the zero of `U_s - c` lies above the axis, so
/// passing below keeps the continuation homotopic to the real path.
pub fn default_side(c: Complex64) -> f64 {
    if c.im >= 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Polyline from `a` to `b` (real, `a < b`) with semicircles of radius `r` around each of `centers`.
///
/// `side = +1` passes above, `-1` below. Each semicircle uses `m` chords.
pub fn detour_path(a: f64, b: f64, centers: &[f64], r: f64, side: f64, m: usize) -> Result<Vec<Complex64>> {
    let mut cs: Vec<f64> = centers.to_vec();
    cs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (lo, hi) = (a.min(b), a.max(b));
    let mut path = vec![Complex64::new(lo, 0.0)];
    let mut last = lo;
    for &x in &cs {
        if x - r <= last || x + r >= hi {
            return Err(RayleighError::InvalidArgument(format!(
                "detour of radius {r} around {x} does not fit in [{last}, {hi}]"
            )));
        }
        path.push(Complex64::new(x - r, 0.0));
        for j in 1..m {
            let phi = PI - PI * j as f64 / m as f64;
            path.push(Complex64::new(x + r * phi.cos(), side * r * phi.sin()));
        }
        path.push(Complex64::new(x + r, 0.0));
        last = x + r;
    }
    path.push(Complex64::new(hi, 0.0));
    if b < a {
        path.reverse();
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn free_case_reproduces_exponential() {
        let p = ShearProfile::zero();
        let alpha = 0.7;
        let c = Complex64::new(0.0, 1.0);
        let sol = integrate_contour(&p, alpha, c, &[real(0.0), real(2.0)], (real(1.0), real(alpha)), &ContourOptions::tight())
            .unwrap();
        let (v, d) = sol.final_state();
        assert!((v - (2.0 * alpha).exp()).norm() < 1e-10 * (2.0 * alpha).exp());
        assert!((d - alpha * (2.0 * alpha).exp()).norm() < 1e-10 * (2.0 * alpha).exp());
        let (m, _) = sol.at_real(1.0).unwrap();
        assert!((m - alpha.exp()).norm() < 1e-10);
    }

    #[test]
    fn linear_profile_has_no_jump() {
        let p = ShearProfile::power(1);
        let c = real(0.3);
        let init = (real(1.0), real(-0.4));
        let above = detour_path(0.0, 0.6, &[0.3], 0.1, 1.0, 64).unwrap();
        let below = detour_path(0.0, 0.6, &[0.3], 0.1, -1.0, 64).unwrap();
        let opts = ContourOptions::tight().with_clearance(0.05);
        let a = integrate_contour(&p, 0.0, c, &above, init, &opts).unwrap().final_state();
        let b = integrate_contour(&p, 0.0, c, &below, init, &opts).unwrap().final_state();
        assert!((a.0 - b.0).norm() < 1e-8 && (a.1 - b.1).norm() < 1e-8);
    }

    #[test]
    fn clearance_violation_is_reported() {
        let p = ShearProfile::power(1);
        let c = real(0.3);
        let path = [real(0.0), real(0.6)];
        let r = integrate_contour(&p, 0.0, c, &path, (real(1.0), real(0.0)), &ContourOptions::default().with_clearance(0.01));
        assert!(matches!(r, Err(RayleighError::ClearanceViolated { .. })));
    }

    #[test]
    fn detour_path_shape() {
        let path = detour_path(-1.0, 1.0, &[0.0], 0.2, -1.0, 8).unwrap();
        assert_eq!(path.first().unwrap().re, -1.0);
        assert_eq!(path.last().unwrap().re, 1.0);
        assert!(path.iter().all(|z| z.im <= 0.0));
        let rev = detour_path(1.0, -1.0, &[0.0], 0.2, 1.0, 8).unwrap();
        assert_eq!(rev.first().unwrap().re, 1.0);
    }
}
