//! Two-point Hermite interpolation at `t = ±1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{RayleighError, Result};

/// Largest supported number of matched derivatives per endpoint.
pub const HERMITE_CAP: usize = 12;

/// Interpolant of degree `2N - 1` with its system's condition number.
#[derive(Debug, Clone)]
pub struct HermiteFit {
    /// Ascending coefficients.
    pub coeffs: Vec<f64>,
    pub condition: f64,
}

impl HermiteFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

fn falling(j: usize, k: usize) -> f64 {
    ((j + 1 - k)..=j).map(|i| i as f64).product()
}

/// `P` with `P^(k)(-1) = minus[k]`, `P^(k)(1) = plus[k]`, `k < N`.
pub fn hermite_interpolant(minus: &[f64], plus: &[f64]) -> Result<HermiteFit> {
    let n = minus.len();
    if n == 0 || plus.len() != n {
        return Err(RayleighError::InvalidArgument("need N >= 1 derivatives at each endpoint".into()));
    }
    if minus.iter().chain(plus).any(|v| !v.is_finite()) {
        return Err(RayleighError::InvalidArgument("non-finite interpolation data".into()));
    }
    let dim = 2 * n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for k in 0..n {
        for (row, (point, data)) in [(-1.0f64, minus), (1.0, plus)].iter().enumerate() {
            let r = 2 * k + row;
            // Rows scaled by 1/k! (Taylor-coefficient form) for conditioning.
            let kf = crate::series::factorial(k);
            rhs[r] = data[k] / kf;
            for j in k..dim {
                m[(r, j)] = falling(j, k) / kf * point.powi((j - k) as i32);
            }
        }
    }
    let sv = m.clone().singular_values();
    let condition = sv.max() / sv.min();
    if n > HERMITE_CAP || !condition.is_finite() || condition > 1e14 {
        return Err(RayleighError::IllConditioned { n, condition });
    }
    let sol = m.lu().solve(&rhs).ok_or_else(|| RayleighError::Singular("Hermite system".into()))?;
    Ok(HermiteFit { coeffs: sol.iter().copied().collect(), condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_reproduce() {
        let p = hermite_interpolant(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        for (j, c) in p.coeffs.iter().enumerate() {
            assert!((c - if j == 0 { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
    }

    #[test]
    fn square_with_one_condition_gives_constant() {
        // t^2 has value 1 at both ends; the degree-1 interpolant is 1.
        let p = hermite_interpolant(&[1.0], &[1.0]).unwrap();
        assert!((p.coeffs[0] - 1.0).abs() < 1e-15 && p.coeffs[1].abs() < 1e-15);
    }

    #[test]
    fn reproduces_polynomials_of_full_degree() {
        // t^5 - 2t^2 with N = 3.
        let d = |t: f64| [t.powi(5) - 2.0 * t * t, 5.0 * t.powi(4) - 4.0 * t, 20.0 * t.powi(3) - 4.0];
        let p = hermite_interpolant(&d(-1.0), &d(1.0)).unwrap();
        let expect = [0.0, 0.0, -2.0, 0.0, 0.0, 1.0];
        for (a, b) in p.coeffs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let data = vec![0.0; HERMITE_CAP + 1];
        assert!(matches!(hermite_interpolant(&data, &data), Err(RayleighError::IllConditioned { .. })));
    }
}
