//! Inf- and sup-convolutions and the Lasry-Lions double regularization on
//! Riemannian model spaces, with numerical checkers for the regularity
//! statements they satisfy.

// `!(a < b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod envelope;
pub mod error;
pub mod manifold;
pub mod numeric;
pub mod scalar;
pub mod theorems;

pub use error::{Error, Result};
pub use scalar::{Real, Slack};

/// Double-precision instantiations.
pub type Manifold64 = manifold::Manifold<f64>;
pub type Point64 = manifold::Point<f64>;
pub type Tangent64 = manifold::Tangent<f64>;
pub type ScalarField64 = envelope::ScalarField<f64>;

/// Single-precision instantiations.
pub type Manifold32 = manifold::Manifold<f32>;
pub type Point32 = manifold::Point<f32>;
pub type Tangent32 = manifold::Tangent<f32>;
pub type ScalarField32 = envelope::ScalarField<f32>;
