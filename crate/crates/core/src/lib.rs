//! Numerical toolkit for the Rayleigh equation near critical layers.

pub mod branch;
pub mod error;
pub mod global;
pub mod green;
pub mod grid;
pub mod local;
pub mod oracle;
pub mod perturb;
pub mod profiles;
pub mod wkbj;
pub mod series;
pub mod studies;

pub use branch::{BranchMeta, LogBranch, Method, SolutionBranch};
pub use error::{RayleighError, Result};
pub use profiles::{CriticalPoint, Domain, ShearProfile};
