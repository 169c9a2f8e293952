use serde::Deserialize;

use super::StudyKind;
use crate::error::{RayleighError, Result};
use crate::profiles::{Domain, ShearProfile};

/// Parameter grids; unset entries fall back to the study defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Critical-point orders.
    pub n: Option<Vec<usize>>,
    /// Values of `|c|`.
    pub c_abs: Option<Vec<f64>>,
    /// Argument of `c` in radians.
    pub c_arg: Option<f64>,
    /// A single complex `c` as `[re, im]`.
    pub c: Option<[f64; 2]>,
    pub alpha: Option<Vec<f64>>,
    /// Probe distance from the critical point.
    pub y_probe: Option<f64>,
    /// Outer limit of the WKBJ construction.
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub profile: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
}

impl StudyConfig {
    /// Acceptance defaults for `study`.
    pub fn new(study: StudyKind) -> Self {
        Self { study, profile: None, seed: 0, grid: GridConfig::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: StudyConfig = toml::from_str(text).map_err(|e| RayleighError::InvalidArgument(format!("config: {e}")))?;
        if let Some(p) = cfg.profile.as_deref().filter(|p| *p != "power") {
            parse_profile(p)?;
        }
        Ok(cfg)
    }

    pub(crate) fn profile_or(&self, default: &str) -> Result<ShearProfile> {
        parse_profile(self.profile.as_deref().unwrap_or(default))
    }

    /// Orders for studies on `U = y^n`: `power:n=K` pins one order, bare `power` uses the grid.
    pub(crate) fn orders(&self, default: &[usize]) -> Result<Vec<usize>> {
        let grid = self.grid.n.clone().unwrap_or_else(|| default.to_vec());
        match self.profile.as_deref() {
            None | Some("power") => Ok(grid),
            Some(s) => match s.strip_prefix("power:n=") {
                Some(k) => Ok(vec![k.trim().parse().map_err(|_| bad_profile(s))?]),
                None => Err(RayleighError::InvalidArgument(format!(
                    "study {} needs profile 'power' or 'power:n=K', got '{s}'",
                    self.study
                ))),
            },
        }
    }

    pub(crate) fn c_or(&self, re: f64, im: f64) -> num_complex::Complex64 {
        let [a, b] = self.grid.c.unwrap_or([re, im]);
        num_complex::Complex64::new(a, b)
    }
}

fn bad_profile(s: &str) -> RayleighError {
    RayleighError::InvalidArgument(format!("bad profile '{s}'"))
}

fn numbers(s: &str, full: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad_profile(full))).collect()
}

/// Parse a profile string.
///
/// Forms: `zero`, `exp_decay`, `power:n=K`, `poly:a0,a1,...` (on the line),
/// `half_poly:a0,a1,...` (on the half-line), `even_poly:b0,b1,...` (`sum b_k y^{2k}` on `[-1, 1]`),
/// `exponential:A,r,U+` (`A e^{-r y} + U+`), `tanh:A,s,y0,U0` (`A tanh((y - y0)/s) + U0` on the line).
pub fn parse_profile(s: &str) -> Result<ShearProfile> {
    let (head, rest) = match s.split_once(':') {
        Some((h, r)) => (h.trim(), Some(r.trim())),
        None => (s.trim(), None),
    };
    let p = match (head, rest) {
        ("zero", None) => ShearProfile::zero(),
        ("exp_decay", None) => ShearProfile::exp_decay(),
        ("power", Some(r)) => {
            let k = r.strip_prefix("n=").ok_or_else(|| bad_profile(s))?;
            let n: usize = k.trim().parse().map_err(|_| bad_profile(s))?;
            if n == 0 {
                return Err(bad_profile(s));
            }
            ShearProfile::power(n)
        }
        ("poly", Some(r)) => ShearProfile::polynomial(numbers(r, s)?, Domain::Line),
        ("half_poly", Some(r)) => ShearProfile::polynomial(numbers(r, s)?, Domain::HalfLine),
        ("even_poly", Some(r)) => ShearProfile::even_polynomial(&numbers(r, s)?),
        ("exponential", Some(r)) => match numbers(r, s)?.as_slice() {
            [a, k, o] if *k > 0.0 => ShearProfile::exponential(*a, *k, *o),
            _ => return Err(bad_profile(s)),
        },
        ("tanh", Some(r)) => match numbers(r, s)?.as_slice() {
            [a, w, y0, o] if *w > 0.0 => ShearProfile::tanh(*a, *w, *y0, *o, Domain::Line),
            _ => return Err(bad_profile(s)),
        },
        _ => return Err(bad_profile(s)),
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_strings() {
        assert_eq!(parse_profile("power:n=3").unwrap().value(2.0), 8.0);
        assert_eq!(parse_profile("exp_decay").unwrap().value(0.0), 1.0);
        assert_eq!(parse_profile("poly:1, 2").unwrap().value(3.0), 7.0);
        assert_eq!(parse_profile("even_poly:1,-1").unwrap().value(0.5), 0.75);
        assert!((parse_profile("exponential:2,1,0.5").unwrap().value(0.0) - 2.5).abs() < 1e-15);
        for bad in ["power", "power:n=0", "poly:", "tanh:1,0,0,0", "spline:1"] {
            assert!(parse_profile(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn orders_follow_the_profile() {
        let mut cfg = StudyConfig::new(StudyKind::LocalScaling);
        assert_eq!(cfg.orders(&[2, 3]).unwrap(), vec![2, 3]);
        cfg.profile = Some("power:n=4".into());
        assert_eq!(cfg.orders(&[2, 3]).unwrap(), vec![4]);
        cfg.profile = Some("exp_decay".into());
        assert!(cfg.orders(&[2]).is_err());
    }
}
