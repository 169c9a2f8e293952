//! Truncated real power series `sum_k a_k h^k`.
//!
//! Used to obtain high-order derivatives of inverse functions (the
//! normalising coordinate of a critical point and its inverse) from the
//! analytic derivatives supplied by a profile.

/// Product of two series truncated to `len` coefficients.
pub fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `f^p` for a series with positive constant term.
pub fn powf(f: &[f64], p: f64, len: usize) -> Vec<f64> {
    assert!(!f.is_empty() && f[0] > 0.0, "powf needs a positive constant term");
    let mut g = vec![0.0; len];
    g[0] = f[0].powf(p);
    for k in 1..len {
        let mut acc = 0.0;
        for j in 1..=k {
            let fj = f.get(j).copied().unwrap_or(0.0);
            acc += (p * j as f64 - (k - j) as f64) * fj * g[k - j];
        }
        g[k] = acc / (k as f64 * f[0]);
    }
    g
}

/// Compositional inverse of `f(h) = f_1 h + f_2 h^2 + ...` (constant term ignored).
///
/// Returns `d` with `f(d(x)) = x + O(x^len)`.
pub fn revert(f: &[f64], len: usize) -> Vec<f64> {
    assert!(f.len() > 1 && f[1] != 0.0, "reversion needs a nonzero linear term");
    let mut d = vec![0.0; len];
    if len < 2 {
        return d;
    }
    d[1] = 1.0 / f[1];
    // Fixed point d = (x - sum_{k>=2} f_k d^k) / f_1, one new order per sweep.
    for _ in 2..len {
        let mut acc = vec![0.0; len];
        let mut power = d.clone();
        for k in 2..f.len().min(len) {
            power = mul(&power, &d, len);
            for (a, p) in acc.iter_mut().zip(&power) {
                *a += f[k] * p;
            }
        }
        let mut next = vec![0.0; len];
        next[1] = 1.0 / f[1];
        for i in 2..len {
            next[i] = -acc[i] / f[1];
        }
        d = next;
    }
    d
}

/// Derivative of a series: coefficients of `d/dh sum a_k h^k`.
pub fn derivative(a: &[f64]) -> Vec<f64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ak)| k as f64 * ak)
        .collect()
}

/// `k!` as a float.
pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(a: &[f64], h: f64) -> f64 {
        a.iter().rev().fold(0.0, |acc, &c| acc * h + c)
    }

    #[test]
    fn power_matches_sqrt() {
        // (1 + h)^(1/2)
        let g = powf(&[1.0, 1.0], 0.5, 8);
        let h = 0.01;
        assert!((eval(&g, h) - (1.0f64 + h).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reversion_of_exp_minus_one_is_log1p() {
        let f: Vec<f64> = (0..10).map(|k| if k == 0 { 0.0 } else { 1.0 / factorial(k) }).collect();
        let d = revert(&f, 10);
        for (k, &dk) in d.iter().enumerate().skip(1) {
            let expect = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            assert!((dk - expect).abs() < 1e-13, "k={k}: {dk} vs {expect}");
        }
    }
}
