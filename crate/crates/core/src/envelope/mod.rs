//! Inf-convolution, sup-convolution and their Lasry-Lions composition.

mod convolution;
mod field;
mod library;
mod memo;
mod params;
mod solver;
#[cfg(test)]
mod tests;

pub use convolution::{
    inf_convolve, lasry_lions, lasry_lions_field, localization_radius, sup_convolve, Envelope, InfConvolution,
    LasryLions, SupConvolution,
};
pub use field::{Expr, Field, FnField, Negated, Quadratic, Regularity, ScalarField, ScalarMap};
pub use library::{
    affine, bump, constant, dist, dist_sq, field_library, half_dist_sq, min_dist, truncated_dist, truncated_dist_sq,
};
pub use memo::Memo;
pub use params::{EnvelopeParams, LocalizationMode};
pub use solver::{minimize_over_ball, Minimum, SolverConfig};
