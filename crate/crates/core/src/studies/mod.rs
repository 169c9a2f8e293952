//! Study recipes behind the `study` binary and the acceptance suite.
//!
//! Each study maps a parameter grid to a table, then evaluates its checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RayleighError, Result};
use crate::profiles::{Domain, ShearProfile};

mod config;
mod global_studies;
mod local_studies;
mod misc_studies;

pub use config::{parse_profile, GridConfig, StudyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    OracleVerify,
    LocalScaling,
    Dispersion,
    Riccati,
    GreenResidual,
    Interval,
    Amplification,
    Identities,
}

impl StudyKind {
    pub const ALL: [StudyKind; 8] = [
        StudyKind::OracleVerify,
        StudyKind::LocalScaling,
        StudyKind::Dispersion,
        StudyKind::Riccati,
        StudyKind::GreenResidual,
        StudyKind::Interval,
        StudyKind::Amplification,
        StudyKind::Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::OracleVerify => "oracle-verify",
            StudyKind::LocalScaling => "local-scaling",
            StudyKind::Dispersion => "dispersion",
            StudyKind::Riccati => "riccati",
            StudyKind::GreenResidual => "green-residual",
            StudyKind::Interval => "interval",
            StudyKind::Amplification => "amplification",
            StudyKind::Identities => "identities",
        }
    }

    /// Acceptance criterion reproduced by the study.
    pub fn criterion(self) -> &'static str {
        match self {
            StudyKind::OracleVerify => "A1",
            StudyKind::LocalScaling => "A2",
            StudyKind::Dispersion => "A3",
            StudyKind::Riccati => "A4",
            StudyKind::GreenResidual => "A5",
            StudyKind::Interval => "A6",
            StudyKind::Amplification => "A7",
            StudyKind::Identities => "A8",
        }
    }

    /// Runtime budget in seconds.
    pub fn budget(self) -> f64 {
        match self {
            StudyKind::LocalScaling | StudyKind::Amplification => 120.0,
            StudyKind::Riccati | StudyKind::Interval => 30.0,
            _ => 60.0,
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyKind {
    type Err = RayleighError;

    fn from_str(s: &str) -> Result<Self> {
        StudyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| RayleighError::InvalidArgument(format!("unknown study '{s}'")))
    }
}

/// One column of a table.
#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    pub description: String,
}

fn col(name: &str, description: &str) -> Column {
    Column { name: name.into(), description: description.into() }
}

/// Complex quantity as two columns.
fn complex_cols(name: &str, description: &str) -> [Column; 2] {
    [col(&format!("{name}_re"), &format!("{description} (real part)")), col(&format!("{name}_im"), &format!("{description} (imaginary part)"))]
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<Column>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    /// Header plus one line per row; floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub bound: String,
    pub passed: bool,
}

impl Check {
    fn new(id: &str, description: &str, measured: f64, bound: String, passed: bool) -> Self {
        Self { id: id.into(), description: description.into(), measured, bound, passed: passed && measured.is_finite() }
    }

    fn at_most(id: &str, description: &str, measured: f64, limit: f64) -> Self {
        Self::new(id, description, measured, format!("<= {limit:e}"), measured <= limit)
    }

    fn within(id: &str, description: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self::new(id, description, measured, format!("in [{lo}, {hi}]"), measured >= lo && measured <= hi)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub study: StudyKind,
    pub criterion: String,
    #[serde(skip)]
    pub table: Table,
    pub checks: Vec<Check>,
    /// Fitted slopes, constants and other scalar outputs.
    pub values: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub runtime_seconds: f64,
}

impl StudyReport {
    fn new(study: StudyKind, table: Table) -> Self {
        Self {
            study,
            criterion: study.criterion().into(),
            table,
            checks: Vec::new(),
            values: BTreeMap::new(),
            warnings: Vec::new(),
            runtime_seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("{} {tag}: {} = {:.6e} ({})", c.id, c.description, c.measured, c.bound)
            })
            .collect()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - sx) * (y - sy)).sum();
    let den: f64 = xs.iter().map(|x| (x - sx) * (x - sx)).sum();
    num / den
}

pub(crate) fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
}

/// Order-preserving parallel map; the first failure names its tuple.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync + fmt::Debug,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    items
        .par_iter()
        .map(|t| f(t).map_err(|e| RayleighError::InvalidArgument(format!("tuple {t:?}: {e}"))))
        .collect()
}

pub(crate) fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn default_arg() -> f64 {
    PI / 4.0
}

pub(crate) fn power_profile(n: usize) -> ShearProfile {
    ShearProfile::power(n)
}

pub(crate) fn line_poly(c: Vec<f64>) -> ShearProfile {
    ShearProfile::polynomial(c, Domain::Line)
}

/// Run a study and time it; the runtime budget is one of the checks.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let t0 = Instant::now();
    let mut rep = match cfg.study {
        StudyKind::OracleVerify => local_studies::oracle_verify(cfg)?,
        StudyKind::LocalScaling => local_studies::local_scaling(cfg)?,
        StudyKind::Dispersion => global_studies::dispersion(cfg)?,
        StudyKind::Riccati => global_studies::riccati(cfg)?,
        StudyKind::Interval => global_studies::interval(cfg)?,
        StudyKind::GreenResidual => misc_studies::green_residual(cfg)?,
        StudyKind::Amplification => misc_studies::amplification(cfg)?,
        StudyKind::Identities => misc_studies::identities(cfg)?,
    };
    rep.runtime_seconds = t0.elapsed().as_secs_f64();
    if rep.table.rows.is_empty() {
        rep.warnings.push("empty parameter grid: no rows, no checks".into());
        rep.checks.clear();
    } else {
        let id = format!("{}.runtime", cfg.study.criterion());
        rep.checks.push(Check::at_most(&id, "runtime in seconds", rep.runtime_seconds, cfg.study.budget()));
    }
    Ok(rep)
}
