//! Dormand–Prince 5(4) integrator with complex state and a real independent variable.
//!
//! Accepted steps are kept as checkpoints so a [`Trajectory`] can be evaluated
//! anywhere inside the integrated range by one explicit step from the
//! preceding checkpoint.

use num_complex::Complex64;

use crate::error::{RayleighError, Result};

pub type State<const N: usize> = [Complex64; N];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const BS: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed |step|.
    pub h_max: f64,
    /// Smallest allowed |step| before reporting underflow.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, h_min: 1e-14, max_steps: 2_000_000 }
    }
}

impl OdeOptions {
    pub fn tight() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, ..Self::default() }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

/// One Dormand–Prince step; returns the 5th-order update and the embedded error vector.
pub fn dopri_step<const N: usize, F>(f: &F, s: f64, y: &State<N>, h: f64) -> Result<(State<N>, State<N>)>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let zero = Complex64::new(0.0, 0.0);
    let mut k = [[zero; N]; 7];
    k[0] = f(s, y)?;
    for i in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for m in 0..N {
                    yi[m] += kj[m] * (h * a);
                }
            }
        }
        k[i] = f(s + C[i] * h, &yi)?;
    }
    let mut out = *y;
    let mut err = [zero; N];
    for i in 0..7 {
        for m in 0..N {
            out[m] += k[i][m] * (h * B[i]);
            err[m] += k[i][m] * (h * (B[i] - BS[i]));
        }
    }
    Ok((out, err))
}

/// Accepted checkpoints of an integration run.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub points: Vec<(f64, State<N>)>,
    pub rejected: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn final_state(&self) -> State<N> {
        self.points[self.points.len() - 1].1
    }

    /// Direction of integration: +1 forward, -1 backward.
    fn direction(&self) -> f64 {
        if self.end() >= self.start() {
            1.0
        } else {
            -1.0
        }
    }

    /// State at `s` by one step from the preceding checkpoint.
    pub fn eval<F>(&self, f: &F, s: f64) -> Result<State<N>>
    where
        F: Fn(f64, &State<N>) -> Result<State<N>>,
    {
        let dir = self.direction();
        let (lo, hi) = if dir > 0.0 { (self.start(), self.end()) } else { (self.end(), self.start()) };
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if s < lo - slack || s > hi + slack {
            return Err(RayleighError::InvalidArgument(format!(
                "s = {s} outside integrated range [{lo}, {hi}]"
            )));
        }
        // Index of last checkpoint not beyond s in the direction of integration.
        let idx = self.points.partition_point(|(sp, _)| dir * (*sp - s) <= 0.0);
        let idx = idx.saturating_sub(1);
        let (sp, yp) = self.points[idx];
        if sp == s {
            return Ok(yp);
        }
        let (y, _) = dopri_step(f, sp, &yp, s - sp)?;
        Ok(y)
    }
}

fn error_norm<const N: usize>(err: &State<N>, y0: &State<N>, y1: &State<N>, opts: &OdeOptions) -> f64 {
    let mut worst: f64 = 0.0;
    for m in 0..N {
        let scale = opts.atol + opts.rtol * y0[m].norm().max(y1[m].norm());
        worst = worst.max(err[m].norm() / scale);
    }
    worst
}

/// Integrate `dy/ds = f(s, y)` from `s0` to `s1` (either direction).
pub fn solve<const N: usize, F>(f: &F, s0: f64, y0: State<N>, s1: f64, opts: &OdeOptions) -> Result<Trajectory<N>>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let mut traj = Trajectory { points: vec![(s0, y0)], rejected: 0 };
    if s0 == s1 {
        return Ok(traj);
    }
    let dir = (s1 - s0).signum();
    let span = (s1 - s0).abs();
    let mut h = (span / 100.0).min(opts.h_max).min(1e-2 * (1.0 + s0.abs()));
    let mut s = s0;
    let mut y = y0;
    let mut steps = 0;
    while dir * (s1 - s) > 0.0 {
        if steps > opts.max_steps {
            return Err(RayleighError::StepUnderflow { s });
        }
        steps += 1;
        let mut last = false;
        if h >= (s1 - s).abs() {
            h = (s1 - s).abs();
            last = true;
        }
        let (y_new, err) = dopri_step(f, s, &y, dir * h)?;
        let e = error_norm(&err, &y, &y_new, opts);
        if !e.is_finite() {
            h *= 0.25;
            traj.rejected += 1;
            if h < opts.h_min * (1.0 + s.abs()) {
                return Err(RayleighError::StepUnderflow { s });
            }
            continue;
        }
        if e <= 1.0 {
            s = if last { s1 } else { s + dir * h };
            y = y_new;
            traj.points.push((s, y));
            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(opts.h_max);
        } else {
            traj.rejected += 1;
            h *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            if h < opts.h_min * (1.0 + s.abs()) {
                return Err(RayleighError::StepUnderflow { s });
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_: f64, y: &State<2>) -> Result<State<2>> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn harmonic_oscillator() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let tr = solve(&harmonic, 0.0, [one, zero], 10.0, &OdeOptions::tight()).unwrap();
        let y = tr.final_state();
        assert!((y[0].re - 10.0f64.cos()).abs() < 1e-10);
        let mid = tr.eval(&harmonic, 3.3).unwrap();
        assert!((mid[0].re - 3.3f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn fifth_order_convergence() {
        // Fixed steps: error ratio for h -> h/2 should be ~2^5.
        let one = Complex64::new(1.0, 0.0);
        let f = |_: f64, y: &State<1>| -> Result<State<1>> { Ok([y[0] * Complex64::new(0.0, 1.0)]) };
        let run = |n: usize| {
            let h = 2.0 / n as f64;
            let mut y = [one];
            for i in 0..n {
                y = dopri_step(&f, i as f64 * h, &y, h).unwrap().0;
            }
            (y[0] - Complex64::new(0.0, 2.0).exp()).norm()
        };
        let ratio = run(20) / run(40);
        assert!(ratio > 16.0 && ratio < 64.0, "ratio {ratio}");
    }

    #[test]
    fn backward_integration() {
        let one = Complex64::new(1.0, 0.0);
        let f = |_: f64, y: &State<1>| -> Result<State<1>> { Ok([y[0]]) };
        let tr = solve(&f, 1.0, [one], 0.0, &OdeOptions::tight()).unwrap();
        assert!((tr.final_state()[0].re - (-1.0f64).exp()).abs() < 1e-12);
        assert!((tr.eval(&f, 0.5).unwrap()[0].re - (-0.5f64).exp()).abs() < 1e-12);
    }
}
