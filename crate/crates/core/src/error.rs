use thiserror::Error;

/// Errors raised by the constructions in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RayleighError {
    #[error("derivative order {order} not supported (max {max})")]
    UnsupportedDerivative { order: usize, max: usize },

    #[error("y = {y} lies outside the profile domain {domain}")]
    OutsideDomain { y: f64, domain: String },

    #[error("root finder failed to bracket a root near y = {y}: {reason}")]
    BracketFailure { y: f64, reason: String },

    #[error("critical point at y = {y0} is degenerate beyond order cap {cap}")]
    DegenerateBeyondCap { y0: f64, cap: usize },

    #[error("Hermite system with N = {n} is ill conditioned (condition estimate {condition:.3e})")]
    IllConditioned { n: usize, condition: f64 },

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("|c| = 0 is the pure singular limit and cannot be evaluated")]
    ZeroSpectralParameter,

    #[error("y = {y} is outside the validity radius {radius}")]
    OutsideValidity { y: f64, radius: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (error estimate {estimate:.3e})")]
    QuadratureFailure { a: f64, b: f64, estimate: f64 },

    #[error("fixed-point map is not contractive (measured factor {factor:.3e})")]
    NonContraction { factor: f64 },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last increment {increment:.3e})")]
    MaxIterations { iterations: usize, increment: f64 },

    #[error("WKBJ condition violated at y = {y}: |K'|/|K|^(3/2) = {ratio:.3e} > {threshold}")]
    WkbjInvalid { y: f64, ratio: f64, threshold: f64 },

    #[error("matching regions do not overlap: {0}")]
    OverlapFailure(String),

    #[error("real critical layer at y = {y} inside the integration range; Im c must be nonzero")]
    RealCriticalLayer { y: f64 },

    #[error("near eigenvalue: |psi_-(0)| = {value:.3e} relative to sup-norm {norm:.3e}")]
    NearEigenvalue { value: f64, norm: f64 },

    #[error("pole of the Miles variable at y = {y} (denominator {denominator:.3e})")]
    Pole { y: f64, denominator: f64 },

    #[error("Riccati solution blows up near y = {y}")]
    RiccatiBlowUp { y: f64 },

    #[error("contour passes within {distance:.3e} of a zero of U_s - c (clearance {clearance:.3e})")]
    ClearanceViolated { distance: f64, clearance: f64 },

    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },

    #[error("profile cannot be evaluated at complex arguments")]
    NoComplexExtension,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, RayleighError>;
