//! Evaluators of Rayleigh solutions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{RayleighError, Result};
use crate::profiles::CriticalPoint;

pub type Evaluator = Arc<dyn Fn(f64) -> Result<(Complex64, Complex64)> + Send + Sync>;

/// Determination of the logarithm used by a singular construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBranch {
    /// Principal branch, cut on the negative reals.
    StandardLog,
    /// Argument in `(0, 2π)`, cut on the positive reals.
    CutOnPositiveReals,
    /// No logarithm involved.
    None,
}

/// How a branch was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// `U_s - c`.
    Smooth,
    /// Partial-fraction primitive plus regular remainder.
    VariationOfConstants,
    /// Order-one expansion by repeated integration by parts.
    IntegrationByParts,
    /// Green-function fixed point for `alpha != 0`.
    FixedPoint,
    Wkbj,
    /// Piecewise WKBJ / transport / local assembly.
    Matched,
    /// Adaptive ODE integration on the real axis.
    Integrated,
    /// Solution of a forced problem.
    Forced,
    /// Linear combination of other branches.
    Combination,
}

/// Bookkeeping attached to a branch.
#[derive(Debug, Clone)]
pub struct BranchMeta {
    pub critical_point: Option<CriticalPoint>,
    pub c: Complex64,
    pub alpha: f64,
    pub method: Method,
    /// Multiplicative normalisation applied on top of the raw construction.
    pub normalization: f64,
    pub notes: Vec<String>,
}

impl BranchMeta {
    pub fn new(c: Complex64, alpha: f64, method: Method) -> Self {
        Self { critical_point: None, c, alpha, method, normalization: 1.0, notes: Vec::new() }
    }

    pub fn at(mut self, cp: CriticalPoint) -> Self {
        self.critical_point = Some(cp);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// A solution of the Rayleigh equation on a real interval: value and first derivative.
#[derive(Clone)]
pub struct SolutionBranch {
    eval: Evaluator,
    pub log_branch: LogBranch,
    pub meta: BranchMeta,
    /// Interval on which the branch is valid.
    pub range: (f64, f64),
}

impl fmt::Debug for SolutionBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionBranch")
            .field("log_branch", &self.log_branch)
            .field("meta", &self.meta)
            .field("range", &self.range)
            .finish()
    }
}

impl SolutionBranch {
    pub fn new(eval: Evaluator, log_branch: LogBranch, meta: BranchMeta, range: (f64, f64)) -> Self {
        Self { eval, log_branch, meta, range }
    }

    pub fn from_fn<F>(f: F, log_branch: LogBranch, meta: BranchMeta, range: (f64, f64)) -> Self
    where
        F: Fn(f64) -> Result<(Complex64, Complex64)> + Send + Sync + 'static,
    {
        Self::new(Arc::new(f), log_branch, meta, range)
    }

    pub fn contains(&self, y: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.range.0.abs().max(self.range.1.abs()));
        y >= self.range.0 - slack && y <= self.range.1 + slack
    }

    /// Value and derivative at `y`.
    pub fn eval(&self, y: f64) -> Result<(Complex64, Complex64)> {
        if !self.contains(y) {
            return Err(RayleighError::OutsideValidity { y, radius: self.range.1.max(-self.range.0) });
        }
        (self.eval)(y)
    }

    pub fn value(&self, y: f64) -> Result<Complex64> {
        Ok(self.eval(y)?.0)
    }

    pub fn deriv(&self, y: f64) -> Result<Complex64> {
        Ok(self.eval(y)?.1)
    }

    /// `k * self`.
    pub fn scaled(&self, k: Complex64) -> Self {
        let inner = self.eval.clone();
        let mut meta = self.meta.clone();
        if k.im == 0.0 {
            meta.normalization *= k.re;
        } else {
            meta.notes.push(format!("scaled by complex factor {k}"));
        }
        Self {
            eval: Arc::new(move |y| inner(y).map(|(v, d)| (v * k, d * k))),
            log_branch: self.log_branch,
            meta,
            range: self.range,
        }
    }

    /// `a * self + b * other` on the intersection of both ranges.
    pub fn combine(&self, a: Complex64, other: &SolutionBranch, b: Complex64) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut meta = self.meta.clone();
        meta.method = Method::Combination;
        Self {
            eval: Arc::new(move |y| {
                let (v1, d1) = f(y)?;
                let (v2, d2) = g(y)?;
                Ok((a * v1 + b * v2, a * d1 + b * d2))
            }),
            log_branch: self.log_branch,
            meta,
            range: (self.range.0.max(other.range.0), self.range.1.min(other.range.1)),
        }
    }

    /// Restrict the validity range.
    pub fn restricted(mut self, range: (f64, f64)) -> Self {
        self.range = (self.range.0.max(range.0), self.range.1.min(range.1));
        self
    }
}

/// Wronskian `f g' - f' g` at `y`.
pub fn wronskian(f: &SolutionBranch, g: &SolutionBranch, y: f64) -> Result<Complex64> {
    let (fv, fd) = f.eval(y)?;
    let (gv, gd) = g.eval(y)?;
    Ok(fv * gd - fd * gv)
}

/// Coefficients `(a, b)` with `a f + b g` matching `(value, deriv)` at `y`.
pub fn match_coefficients(
    f: &SolutionBranch,
    g: &SolutionBranch,
    y: f64,
    value: Complex64,
    deriv: Complex64,
) -> Result<(Complex64, Complex64)> {
    let (fv, fd) = f.eval(y)?;
    let (gv, gd) = g.eval(y)?;
    let w = fv * gd - fd * gv;
    if w.norm() == 0.0 || !w.norm().is_finite() {
        return Err(RayleighError::Singular(format!("degenerate basis at y = {y}")));
    }
    Ok(((gd * value - gv * deriv) / w, (fv * deriv - fd * value) / w))
}
