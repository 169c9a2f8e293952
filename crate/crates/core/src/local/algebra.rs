//! Roots-of-unity sums and the bounded ratio controlling the regular remainder.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `sum_{k=1}^n (e^{2 i k pi / n})^p` in exact integer arithmetic.
pub fn root_sum(n: u32, p: i64) -> i64 {
    assert!(n >= 1, "root_sum needs n >= 1");
    if p.rem_euclid(n as i64) == 0 {
        n as i64
    } else {
        0
    }
}

/// Floating-point evaluation of the same sum.
pub fn root_sum_float(n: u32, p: i64) -> Complex64 {
    (1..=n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64) * (p as f64) / n as f64))
        .sum()
}

/// `theta_k = theta / n + 2 k pi / n` for `k = 1..=n`.
pub fn root_angles(n: usize, theta: f64) -> Vec<f64> {
    (1..=n).map(|k| theta / n as f64 + 2.0 * PI * k as f64 / n as f64).collect()
}

/// `|(t^2 - 1)^n / (t^n - e^{i theta})^2|`.
///
/// At an exact real root `t = ±1` of `t^n = e^{i theta}` the common factor is
/// cancelled; the limit is infinite for `n = 1`.
pub fn bounded_ratio(t: f64, theta: f64, n: usize) -> f64 {
    let tz = Complex64::new(t, 0.0);
    let den = tz.powu(n as u32) - Complex64::from_polar(1.0, theta);
    let num = (t * t - 1.0).abs().powi(n as i32);
    if den.norm() > 1e-12 {
        return num / den.norm_sqr();
    }
    // Factorised form: numerator (t-1)^n (t+1)^n, denominator prod |t - t_k|^2.
    let roots: Vec<Complex64> = root_angles(n, theta).iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let mut value = 1.0;
    let mut pow_minus = n as i32;
    let mut pow_plus = n as i32;
    for r in roots {
        if (r - 1.0).norm() < 1e-9 && (t - 1.0).abs() < 1e-6 {
            pow_minus -= 2;
        } else if (r + 1.0).norm() < 1e-9 && (t + 1.0).abs() < 1e-6 {
            pow_plus -= 2;
        } else {
            value /= (tz - r).norm_sqr();
        }
    }
    if pow_minus < 0 || pow_plus < 0 {
        return f64::INFINITY;
    }
    value * (t - 1.0).abs().powi(pow_minus) * (t + 1.0).abs().powi(pow_plus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_sum_examples() {
        assert_eq!(root_sum(3, 6), 3);
        assert_eq!(root_sum(3, 4), 0);
        assert_eq!(root_sum(5, 0), 5);
        assert_eq!(root_sum(4, -8), 4);
    }

    #[test]
    fn bounded_ratio_examples() {
        assert!((bounded_ratio(0.0, PI / 2.0, 2) - 1.0).abs() < 1e-15);
        assert!(bounded_ratio(1.0, 0.0, 1).is_infinite());
        // n = 2, theta = 0: (t^2-1)^2/(t^2-1)^2 = 1 everywhere including t = ±1.
        assert_eq!(bounded_ratio(1.0, 0.0, 2), 1.0);
        assert!((bounded_ratio(0.3, 0.0, 2) - 1.0).abs() < 1e-14);
    }
}
