//! Independent ground truth: adaptive quadrature, ODE integration along
//! complex polylines, and residual measurement.

pub mod contour;
pub mod ode;
pub mod quadrature;
pub mod residual;

pub use contour::{default_side, detour_path, detour_radius, integrate_contour, ContourOptions, ContourSolution};
pub use ode::{OdeOptions, Trajectory};
pub use quadrature::{quad, quad_real, quad_try, QuadResult, QuadTol};
pub use residual::rayleigh_residual;
