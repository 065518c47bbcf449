//! End-to-end verification suites built from the envelope and analysis layers.

mod counterexamples;
mod grid;
mod lemma;
mod properties;
mod regularization;
mod suite;

pub use counterexamples::{
    counterexample_hyperbolic, counterexample_warped, exact, stated, CounterexampleTolerances, WarpedPlan,
};
pub use grid::polar_grid;
pub use lemma::{
    admissible_r, binding_condition, h_eps_at_two, nonpositive_constants, verify_convexity_lemma,
    verify_nonpositive_lemma, LemmaConstants,
};
pub use properties::{verify_bounded_convergence, verify_envelope_properties};
pub use regularization::{verify_lipschitz_preservation, verify_regularization, RegularizationPlan};
pub use suite::{
    boxed_field, field_by_id, gap_order_report, gap_steps, run_suite, second_anchor, ManifoldSpec, SuiteId, SuiteSpec,
};

#[cfg(test)]
mod tests;
