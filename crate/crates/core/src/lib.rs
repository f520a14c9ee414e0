//! Weighted quadrature on [-1, 1] for integrands of limited smoothness.
//!
//! The crate builds Gauss, Gauss-Radau, Clenshaw-Curtis/Filippi/Polya,
//! Gauss-Kronrod and compound rules for ultraspherical weights, and checks
//! their errors on functions whose s-th derivative has bounded variation:
//! Peano-kernel sup-norms against Freud's explicit constant, the exact
//! n^-(s+1) kernel scaling of compound rules, and fitted convergence orders.
//!
//! ```
//! use bvquad::{gauss_rule, kernel_sup_norm, WeightSpec};
//!
//! let rule = gauss_rule(&WeightSpec::legendre(), 16).unwrap();
//! let profile = kernel_sup_norm(&rule, 2).unwrap();
//! assert!(profile.sup_norm <= profile.freud_bound.unwrap());
//! ```

pub mod corpus;
pub mod eigen;
pub mod error;
pub mod orthopoly;
pub mod peano;
pub mod reference;
pub mod rules;
pub mod runner;
pub mod sum;

pub use corpus::{ExactIntegral, IntegralSource, TestFunction, DEFAULT_SINGULARITY};
pub use error::{QuadError, Result};
pub use orthopoly::{
    chebyshev_moments, moment, recurrence, truncated_moment, RecurrenceTable, WeightKind,
    WeightSpec,
};
pub use peano::{
    c_estimate, compound_kernel_scaling, error_bound_check, freud_bound, kernel_sup_norm, kernel_value,
    BoundCheck, PeanoKernel, PeanoProfile, ScalingRecord,
};
pub use rules::{
    apply, clenshaw_curtis, compound_rule, exactness_degree, filippi, gauss_rule,
    interpolatory_rule, kronrod_rule, node_family, polya, radau_rule, Elementary, Family,
    FixedEnd, NodeFamily, QuadratureRule,
};
pub use runner::{
    fit_slope, run_compound_convergence, run_convergence, ConvergenceReport, RuleFamily, Sample,
};
