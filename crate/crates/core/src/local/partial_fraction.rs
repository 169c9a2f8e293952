//! Simple-element decomposition of `P(t) / (t^n - e^{i theta})^2` and its primitive.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::algebra::root_angles;
use crate::branch::LogBranch;
use crate::error::{RayleighError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `sum_k [alpha_k / (t - t_k)^2 + beta_k / (t - t_k)] + Q(t)`.
#[derive(Debug, Clone)]
pub struct PartialFraction {
    pub n: usize,
    pub theta: f64,
    pub alphas: Vec<Complex64>,
    pub betas: Vec<Complex64>,
    /// Ascending coefficients of the polynomial part `Q`.
    pub q_coeffs: Vec<Complex64>,
    pub roots: Vec<Complex64>,
}

fn horner(c: &[Complex64], t: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * t + a)
}

fn horner_real(c: &[f64], t: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * t + a)
}

/// Quotient of `num` by the monic `den` (ascending coefficients).
fn poly_quotient(num: &[Complex64], den: &[Complex64]) -> Vec<Complex64> {
    let dn = den.len() - 1;
    if num.len() <= dn {
        return Vec::new();
    }
    let mut rem = num.to_vec();
    let mut q = vec![Complex64::new(0.0, 0.0); num.len() - dn];
    for k in (0..q.len()).rev() {
        let coef = rem[k + dn];
        q[k] = coef;
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= coef * d;
        }
    }
    q
}

/// Decompose `P / (t^n - e^{i theta})^2` with `P` given by ascending real coefficients.
pub fn partial_fraction(p: &[f64], n: usize, theta: f64) -> PartialFraction {
    assert!(n >= 1);
    let nf = n as f64;
    let angles = root_angles(n, theta);
    let roots: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect();
    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    for &a in &angles {
        let tk = Complex64::from_polar(1.0, a);
        let pv = horner_real(p, tk);
        let dv = horner_real(&dp, tk);
        let e2 = Complex64::from_polar(1.0, 2.0 * a - 2.0 * theta);
        let e1 = Complex64::from_polar(1.0, a - 2.0 * theta);
        alphas.push(pv * e2 / (nf * nf));
        betas.push(dv * e2 / (nf * nf) - pv * e1 * ((nf - 1.0) / (nf * nf)));
    }
    // (t^n - e^{i theta})^2 = t^{2n} - 2 e^{i theta} t^n + e^{2 i theta}
    let mut den = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    den[0] = Complex64::from_polar(1.0, 2.0 * theta);
    den[n] = -2.0 * Complex64::from_polar(1.0, theta);
    den[2 * n] = Complex64::new(1.0, 0.0);
    let num: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let q_coeffs = poly_quotient(&num, &den);
    PartialFraction { n, theta, alphas, betas, q_coeffs, roots }
}

/// Logarithm on the requested determination.
pub fn log_branch(z: Complex64, branch: LogBranch) -> Complex64 {
    match branch {
        LogBranch::CutOnPositiveReals => {
            let mut arg = z.arg();
            if arg <= 0.0 {
                arg += 2.0 * PI;
            }
            Complex64::new(z.norm().ln(), arg)
        }
        _ => z.ln(),
    }
}

impl PartialFraction {
    /// Value of the decomposition at `t`.
    pub fn reconstruct(&self, t: Complex64) -> Complex64 {
        let mut s = horner(&self.q_coeffs, t);
        for ((a, b), r) in self.alphas.iter().zip(&self.betas).zip(&self.roots) {
            let d = t - r;
            s += a / (d * d) + b / d;
        }
        s
    }

    /// `Q_1` with `Q_1' = Q` and `Q_1(0) = 0`.
    pub fn q1(&self, t: Complex64) -> Complex64 {
        let c: Vec<Complex64> = std::iter::once(Complex64::new(0.0, 0.0))
            .chain(self.q_coeffs.iter().enumerate().map(|(j, &q)| q / (j as f64 + 1.0)))
            .collect();
        horner(&c, t)
    }

    pub fn beta_sum(&self) -> Complex64 {
        self.betas.iter().sum()
    }

    /// `Gamma = -i pi sum_k beta_k sign(Im t_k)`.
    pub fn gamma(&self) -> Complex64 {
        let s: Complex64 = self
            .betas
            .iter()
            .zip(&self.roots)
            .map(|(b, r)| if r.im > 0.0 { *b } else if r.im < 0.0 { -*b } else { Complex64::new(0.0, 0.0) })
            .sum();
        -I * PI * s
    }

    /// Primitive `J(t) = -sum alpha_k/(t - t_k) + sum beta_k [log(t - t_k) - ln log_scale] + Q_1(t)`.
    ///
    /// With `CutOnPositiveReals` the logarithms take arguments in `(0, 2 pi)` and
    /// the constant `-i pi sum beta_k` is added, so that `J` vanishes at
    /// `t -> -infinity` to leading order instead of at `+infinity`.
    pub fn primitive(&self, t: Complex64, log_scale: f64, branch: LogBranch) -> Result<Complex64> {
        let shift = log_scale.ln();
        let mut s = self.q1(t);
        for ((a, b), r) in self.alphas.iter().zip(&self.betas).zip(&self.roots) {
            let d = t - r;
            if d.norm() < 1e-14 {
                return Err(RayleighError::Singular(format!("primitive evaluated at root {r}")));
            }
            s += -a / d + b * (log_branch(d, branch) - shift);
        }
        if branch == LogBranch::CutOnPositiveReals {
            s -= I * PI * self.beta_sum();
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn simple_cases() {
        let pf = partial_fraction(&[1.0], 1, 0.0);
        assert!((pf.alphas[0] - 1.0).norm() < 1e-15 && pf.betas[0].norm() < 1e-15);
        assert!(pf.q_coeffs.is_empty());

        // 1/(t^2-1)^2 = 1/4 [1/(t-1)^2 + 1/(t+1)^2 - 1/(t-1) + 1/(t+1)]
        let pf = partial_fraction(&[1.0], 2, 0.0);
        for (k, r) in pf.roots.iter().enumerate() {
            assert!((pf.alphas[k] - 0.25).norm() < 1e-15);
            let expect = if r.re > 0.0 { -0.25 } else { 0.25 };
            assert!((pf.betas[k] - expect).norm() < 1e-15, "{k}: {}", pf.betas[k]);
        }
    }

    #[test]
    fn reconstruction_with_polynomial_part() {
        let p = [0.3, -1.0, 0.5, 2.0, -0.7, 1.1];
        let pf = partial_fraction(&p, 2, 0.7);
        assert_eq!(pf.q_coeffs.len(), 2);
        for t in [-3.0, -0.5, 0.0, 0.4, 2.5] {
            let tz = c(t);
            let exact = horner_real(&p, tz) / (tz * tz - Complex64::from_polar(1.0, 0.7)).powi(2);
            let got = pf.reconstruct(tz);
            assert!((got - exact).norm() <= 1e-12 * exact.norm().max(1.0), "t={t}");
        }
    }

    #[test]
    fn primitive_derivative_and_normalisation() {
        let pf = partial_fraction(&[1.0], 1, PI / 2.0);
        let j = pf.primitive(c(2.0), 1.0, LogBranch::StandardLog).unwrap();
        assert!((j + 1.0 / (c(2.0) - I)).norm() < 1e-14);
        let p = [1.0, 0.2, -0.3, 0.05, 0.4, 0.1];
        let pf = partial_fraction(&p, 3, 0.4);
        assert!(pf.q1(c(0.0)).norm() == 0.0);
        let h = 1e-5;
        for t in [-2.0, -0.3, 0.6, 1.7] {
            for br in [LogBranch::StandardLog, LogBranch::CutOnPositiveReals] {
                let d = (pf.primitive(c(t + h), 0.1, br).unwrap() - pf.primitive(c(t - h), 0.1, br).unwrap()) / (2.0 * h);
                let f = pf.reconstruct(c(t));
                assert!((d - f).norm() < 1e-8 * f.norm().max(1.0));
            }
        }
    }

    #[test]
    fn gamma_is_nonzero() {
        let pf = partial_fraction(&[1.0, 0.1], 2, 0.3);
        assert!(pf.gamma().norm() > 1e-3);
    }

    #[test]
    fn branch_difference_is_constant_on_the_real_line() {
        let pf = partial_fraction(&[1.0, 0.3, -0.2, 0.1], 2, 0.9);
        let diff = |t: f64| {
            pf.primitive(c(t), 1.0, LogBranch::CutOnPositiveReals).unwrap()
                - pf.primitive(c(t), 1.0, LogBranch::StandardLog).unwrap()
        };
        let d0 = diff(-5.0);
        for t in [-1.0, 0.0, 0.5, 3.0] {
            assert!((diff(t) - d0).norm() < 1e-13);
        }
        assert!((d0 + pf.gamma()).norm() < 1e-13);
    }
}
