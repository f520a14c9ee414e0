//! n-fold compound rules on equal subintervals of [-1, 1].

use crate::error::{QuadError, Result};
use crate::orthopoly::WeightSpec;

use super::{gauss_rule, Family, QuadratureRule};

/// Absolute distance below which transplanted nodes are merged.
pub const MERGE_TOL: f64 = 1e-14;

/// The elementary rules used for compound experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Midpoint,
    Trapezoid,
    Simpson,
    Gauss2,
}

impl Elementary {
    pub const ALL: [Elementary; 4] = [
        Elementary::Midpoint,
        Elementary::Trapezoid,
        Elementary::Simpson,
        Elementary::Gauss2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Elementary::Midpoint => "midpoint",
            Elementary::Trapezoid => "trapezoid",
            Elementary::Simpson => "simpson",
            Elementary::Gauss2 => "gauss2",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn rule(self) -> QuadratureRule {
        let w = WeightSpec::legendre();
        let built = match self {
            Elementary::Midpoint => QuadratureRule::new(w, vec![0.0], vec![2.0], Family::Gauss, 1),
            Elementary::Trapezoid => QuadratureRule::new(
                w,
                vec![-1.0, 1.0],
                vec![1.0, 1.0],
                Family::ClenshawCurtis,
                1,
            ),
            Elementary::Simpson => QuadratureRule::new(
                w,
                vec![-1.0, 0.0, 1.0],
                vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
                Family::ClenshawCurtis,
                3,
            ),
            Elementary::Gauss2 => gauss_rule(&w, 2),
        };
        built.expect("elementary rules are well formed")
    }
}

/// Q^(n)[f] = (1/n) sum_nu sum_j a_j f(-1 + (x_j + 2 nu - 1) / n).
pub fn compound_rule(elementary: &QuadratureRule, n: usize) -> Result<QuadratureRule> {
    if !elementary.weight().is_legendre() {
        return Err(QuadError::WeightMismatch(elementary.weight().label()));
    }
    if n == 0 {
        return Err(QuadError::Size {
            what: "subinterval count",
            got: 0,
            min: 1,
        });
    }
    let scale = n as f64;
    let mut nodes: Vec<f64> = Vec::with_capacity(n * elementary.len());
    let mut weights: Vec<f64> = Vec::with_capacity(n * elementary.len());
    for nu in 1..=n {
        let shift = (2 * nu - 1) as f64;
        for (&x, &a) in elementary.nodes().iter().zip(elementary.weights()) {
            let node = -1.0 + (x + shift) / scale;
            let weight = a / scale;
            match nodes.last() {
                Some(&prev) if (node - prev).abs() <= MERGE_TOL => {
                    *weights.last_mut().unwrap() += weight;
                }
                _ => {
                    nodes.push(node);
                    weights.push(weight);
                }
            }
        }
    }
    QuadratureRule::new(
        WeightSpec::legendre(),
        nodes,
        weights,
        Family::Compound {
            elementary: Box::new(elementary.clone()),
            copies: n,
        },
        elementary.declared_exactness(),
    )
}
