//! Shared fixtures for the criterion benches.

use bvquad::{Elementary, QuadratureRule, WeightSpec};

pub fn legendre_gauss(n: usize) -> QuadratureRule {
    bvquad::gauss_rule(&WeightSpec::legendre(), n).expect("gauss rule")
}

pub fn compound_simpson(n: usize) -> QuadratureRule {
    bvquad::compound_rule(&Elementary::Simpson.rule(), n).expect("compound rule")
}
