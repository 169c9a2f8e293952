//! Local solutions of the `alpha = 0` Rayleigh equation near a critical point.

pub mod algebra;
pub mod coordinate;
pub mod hermite;
pub mod partial_fraction;

pub use algebra::{bounded_ratio, root_sum, root_sum_float};
pub use hermite::{hermite_interpolant, HermiteFit};
pub use partial_fraction::{partial_fraction, PartialFraction};
pub mod pair;

pub use pair::{
    local_pair_alpha0, order_one_jump_coefficient, psi_smooth, singular_integral_i, LocalOptions, LocalPair,
    Normalization, ZetaWeight,
};
