//! Finite-difference estimators in exponential charts and sampled convexity checks.

mod c11;
mod config;
mod convexity;
mod derivatives;
mod gaps;
mod report;
mod sampling;

pub use c11::{c11_crosscheck, C11Estimates, C11_SPREAD, CHART_R, QUOTIENT_T};
pub use config::{DiffConfig, DEFAULT_SEED};
pub use convexity::{midpoint_convexity_check, midpoint_strong_convexity_check, semiconcavity_check, semiconvexity_check};
pub use derivatives::{
    grad_lip_estimate, hessian_matrix, hessian_quadform, lipschitz_estimate, num_gradient, operator_norm, sample_pairs,
};
pub use gaps::{
    closed_form_gap, dexp_matrix, dexp_transport_gap, exp_comparison_check, gap_order_fit, invexp_transport_gap,
    sampled_gap, GapFit, GapKind, GAP_DIRECTIONS,
};
pub use report::{CheckReport, Row};
pub use sampling::{random_unit_tangent, spread_directions, unit_direction, Region};
