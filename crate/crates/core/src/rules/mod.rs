//! Quadrature rules on [-1, 1]: construction, application and exactness.

mod compound;
mod gauss;
mod interpolatory;
mod kronrod;

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::orthopoly::{chebyshev_moments, WeightSpec};
use crate::sum::{sum_ascending, Neumaier};

pub use compound::{compound_rule, Elementary, MERGE_TOL};
pub use gauss::{gauss_rule, radau_rule, FixedEnd};
pub use interpolatory::{
    clenshaw_curtis, filippi, interpolatory_rule, node_family, polya, NodeFamily,
};
pub use kronrod::{kronrod_rule, kronrod_supported};

/// Absolute/relative tolerance of a single monomial (Chebyshev) probe.
pub const EXACTNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gauss,
    RadauLeft,
    RadauRight,
    ClenshawCurtis,
    Filippi,
    Polya,
    Kronrod,
    /// `copies`-fold compound of `elementary`.
    Compound {
        elementary: Box<QuadratureRule>,
        copies: usize,
    },
    Custom,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Gauss => "gauss",
            Family::RadauLeft => "radau_left",
            Family::RadauRight => "radau_right",
            Family::ClenshawCurtis => "clenshaw_curtis",
            Family::Filippi => "filippi",
            Family::Polya => "polya",
            Family::Kronrod => "kronrod",
            Family::Compound { .. } => "compound",
            Family::Custom => "custom",
        }
    }

    fn from_label(label: &str) -> Option<Self> {
        Some(match label {
            "gauss" => Family::Gauss,
            "radau_left" => Family::RadauLeft,
            "radau_right" => Family::RadauRight,
            "clenshaw_curtis" => Family::ClenshawCurtis,
            "filippi" => Family::Filippi,
            "polya" => Family::Polya,
            "kronrod" => Family::Kronrod,
            "custom" => Family::Custom,
            _ => return None,
        })
    }
}

/// A quadrature formula Q[f] = sum_j a_j f(x_j) for a weight on [-1, 1].
///
/// For compound rules `declared_exactness` is the degree m of the elementary
/// rule, which is what governs their n^-(s+1) error decay; the compound rule
/// as a whole is generally not exact beyond m either.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RuleRecord", into = "RuleRecord")]
pub struct QuadratureRule {
    weight: WeightSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    family: Family,
    declared_exactness: usize,
}

impl QuadratureRule {
    /// Validates the node/weight invariants and builds a rule.
    pub fn new(
        weight: WeightSpec,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        family: Family,
        declared_exactness: usize,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(QuadError::Size {
                what: "node count",
                got: 0,
                min: 1,
            });
        }
        if nodes.len() != weights.len() {
            return Err(QuadError::InvalidNodes(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(x) = nodes.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
            return Err(QuadError::InvalidNodes(format!("node {x} outside [-1, 1]")));
        }
        if nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(QuadError::InvalidNodes("nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(QuadError::InvalidNodes("non-finite weight".into()));
        }
        Ok(Self {
            weight,
            nodes,
            weights,
            family,
            declared_exactness,
        })
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn declared_exactness(&self) -> usize {
        self.declared_exactness
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// All weights nonnegative.
    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|&a| a >= 0.0)
    }

    /// Declared exact on P_{n-1} for n nodes.
    pub fn is_interpolatory(&self) -> bool {
        self.declared_exactness + 1 >= self.len()
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        apply(self, f)
    }
}

/// Q[f], summed in ascending-magnitude compensated order.
pub fn apply<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: F) -> f64 {
    let terms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &a)| a * f(x))
        .collect();
    sum_ascending(terms)
}

/// Like [`apply`] for fallible evaluators; the first failure is returned.
pub fn try_apply<F, E>(rule: &QuadratureRule, f: F) -> std::result::Result<f64, E>
where
    F: Fn(f64) -> std::result::Result<f64, E>,
{
    let terms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &a)| f(x).map(|v| a * v))
        .collect::<std::result::Result<Vec<_>, E>>()?;
    Ok(sum_ascending(terms))
}

/// Residuals Q[T_k] - I_w[T_k] for k = 0..=max_degree together with the
/// moments, T_k the first-kind Chebyshev polynomials.
pub(crate) fn chebyshev_residuals(rule: &QuadratureRule, max_degree: usize) -> Vec<(f64, f64)> {
    let moments = chebyshev_moments(&rule.weight, max_degree + 1);
    let n = rule.len();
    let mut prev = vec![1.0; n];
    let mut cur = rule.nodes.clone();
    let mut out = Vec::with_capacity(max_degree + 1);
    for (k, &mu) in moments.iter().enumerate() {
        let values: &[f64] = if k == 0 { &prev } else { &cur };
        let q = values
            .iter()
            .zip(&rule.weights)
            .map(|(t, a)| a * t)
            .collect::<Neumaier>()
            .value();
        out.push((q - mu, mu));
        if k >= 1 {
            let next: Vec<f64> = rule
                .nodes
                .iter()
                .zip(cur.iter().zip(&prev))
                .map(|(x, (c, p))| 2.0 * x * c - p)
                .collect();
            prev = std::mem::replace(&mut cur, next);
        }
    }
    out
}

/// Largest d <= max_probe such that every probe of degree k <= d satisfies
/// |Q[p_k] - I_w[p_k]| <= 1e-10 (1 + |I_w[p_k]|).
///
/// The probes p_k are the Chebyshev polynomials T_k, which span the same
/// spaces P_d as the monomials. Monomial probes cannot see the first failing
/// degree of high-order rules: for an n-point Gauss rule the defect on x^(2n)
/// is the squared norm of the monic orthogonal polynomial, about 4^-n.
pub fn exactness_degree(rule: &QuadratureRule, max_probe: usize) -> usize {
    for (k, (res, mu)) in chebyshev_residuals(rule, max_probe).into_iter().enumerate() {
        if !(res.abs() <= EXACTNESS_TOL * (1.0 + mu.abs())) {
            return k.saturating_sub(1);
        }
    }
    max_probe
}

/// Returns `true` when the rule fails already on constants.
pub fn inexact_on_constants(rule: &QuadratureRule) -> bool {
    let (res, mu) = chebyshev_residuals(rule, 0)[0];
    !(res.abs() <= EXACTNESS_TOL * (1.0 + mu.abs()))
}

/// Symmetrises nodes and weights in place about 0.
pub(crate) fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let a = 0.5 * (weights[i] + weights[j]);
        weights[i] = a;
        weights[j] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

#[derive(Serialize, Deserialize)]
struct CompoundRecord {
    copies: usize,
    elementary: Box<QuadratureRule>,
}

#[derive(Serialize, Deserialize)]
struct RuleRecord {
    weight: WeightSpec,
    family: String,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    declared_exactness: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    compound: Option<CompoundRecord>,
}

impl From<QuadratureRule> for RuleRecord {
    fn from(r: QuadratureRule) -> Self {
        let family = r.family.label().to_string();
        let compound = match r.family {
            Family::Compound { elementary, copies } => Some(CompoundRecord { copies, elementary }),
            _ => None,
        };
        Self {
            weight: r.weight,
            family,
            nodes: r.nodes,
            weights: r.weights,
            declared_exactness: r.declared_exactness,
            compound,
        }
    }
}

impl TryFrom<RuleRecord> for QuadratureRule {
    type Error = QuadError;

    fn try_from(r: RuleRecord) -> Result<Self> {
        let family = match (r.family.as_str(), r.compound) {
            ("compound", Some(c)) => Family::Compound {
                elementary: c.elementary,
                copies: c.copies,
            },
            ("compound", None) => {
                return Err(QuadError::Format("compound rule without its elementary rule".into()))
            }
            (label, _) => Family::from_label(label)
                .ok_or_else(|| QuadError::Format(format!("unknown family '{label}'")))?,
        };
        QuadratureRule::new(r.weight, r.nodes, r.weights, family, r.declared_exactness)
    }
}
