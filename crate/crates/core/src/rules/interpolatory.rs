//! Interpolatory rules: weights fixed by exactness on P_{n-1}.
//!
//! Weights are always obtained from moments in a Chebyshev basis. For the
//! three Chebyshev-type node families the moment system is a discrete cosine
//! (or sine) transform whose inverse is known, so it is solved in O(n^2);
//! arbitrary nodes go through an LU factorisation of the T_k(x_j) matrix.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{QuadError, Result};
use crate::orthopoly::{chebyshev_moments, WeightSpec};
use crate::sum::Neumaier;

use super::{chebyshev_residuals, symmetrize, Family, QuadratureRule, EXACTNESS_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeFamily {
    /// Chebyshev extrema cos(j pi / (n - 1)), endpoints included.
    ClenshawCurtis,
    /// Interior Chebyshev points of the second kind, cos(j pi / (n + 1)).
    Filippi,
    /// Zeros of T_n, cos((2j - 1) pi / (2n)).
    Polya,
}

impl NodeFamily {
    fn min_nodes(self) -> usize {
        match self {
            NodeFamily::ClenshawCurtis => 2,
            NodeFamily::Filippi | NodeFamily::Polya => 1,
        }
    }

    /// Angle numerators and the common denominator: theta_j = num_j * pi / den,
    /// listed so that cos(theta_j) is ascending.
    fn angles(self, n: usize) -> (Vec<usize>, usize) {
        match self {
            NodeFamily::ClenshawCurtis => ((0..n).rev().collect(), n - 1),
            NodeFamily::Filippi => ((1..=n).rev().collect(), n + 1),
            NodeFamily::Polya => ((1..=n).rev().map(|j| 2 * j - 1).collect(), 2 * n),
        }
    }
}

fn check_size(family: NodeFamily, n: usize) -> Result<()> {
    if n < family.min_nodes() {
        return Err(QuadError::Size {
            what: "node count",
            got: n,
            min: family.min_nodes(),
        });
    }
    Ok(())
}

/// Nodes of a Chebyshev-type family, ascending.
pub fn node_family(family: NodeFamily, n: usize) -> Result<Vec<f64>> {
    check_size(family, n)?;
    let (nums, den) = family.angles(n);
    // cos(num pi / den) = sin((den - 2 num) pi / (2 den)): exact zero and
    // exact antisymmetry.
    Ok(nums
        .into_iter()
        .map(|num| {
            let arg = den as f64 - 2.0 * num as f64;
            (arg * PI / (2.0 * den as f64)).sin()
        })
        .collect())
}

/// cos(m pi / den) with m reduced modulo 2 den first.
fn cos_pi_ratio(m: usize, den: usize) -> f64 {
    let m = m % (2 * den);
    (m as f64 * PI / den as f64).cos()
}

fn sin_pi_ratio(m: usize, den: usize) -> f64 {
    let m = m % (2 * den);
    (m as f64 * PI / den as f64).sin()
}

/// Legendre Chebyshev-type weights by the inverse cosine/sine transform.
fn family_weights(family: NodeFamily, n: usize) -> Vec<f64> {
    let (nums, den) = family.angles(n);
    let mu = chebyshev_moments(&WeightSpec::legendre(), n);
    match family {
        NodeFamily::ClenshawCurtis => {
            // a_j = (2 h_j / N) sum''_{k=0}^{N} mu_k cos(k theta_j)
            let big_n = n - 1;
            nums.iter()
                .map(|&j| {
                    let h = if j == 0 || j == big_n { 0.5 } else { 1.0 };
                    let mut acc = Neumaier::new();
                    for (k, &m) in mu.iter().enumerate() {
                        if m == 0.0 {
                            continue;
                        }
                        let edge = if k == 0 || k == big_n { 0.5 } else { 1.0 };
                        acc.add(edge * m * cos_pi_ratio(k * j, big_n));
                    }
                    2.0 * h / big_n as f64 * acc.value()
                })
                .collect()
        }
        NodeFamily::Polya => nums
            .iter()
            .map(|&num| {
                // a_j = mu_0 / n + (2 / n) sum_{k>=1} mu_k cos(k theta_j)
                let mut acc = Neumaier::new();
                acc.add(mu[0]);
                for (k, &m) in mu.iter().enumerate().skip(1) {
                    if m != 0.0 {
                        acc.add(2.0 * m * cos_pi_ratio(k * num, den));
                    }
                }
                acc.value() / n as f64
            })
            .collect(),
        NodeFamily::Filippi => nums
            .iter()
            .map(|&j| {
                // a_j = (2 sin theta_j / (n + 1)) sum_k nu_k sin((k + 1) theta_j),
                // nu_k = I[U_k] = 2 / (k + 1) for even k.
                let mut acc = Neumaier::new();
                for k in (0..n).step_by(2) {
                    acc.add(2.0 / (k + 1) as f64 * sin_pi_ratio((k + 1) * j, den));
                }
                2.0 * sin_pi_ratio(j, den) / den as f64 * acc.value()
            })
            .collect(),
    }
}

fn check_interpolatory(rule: &QuadratureRule) -> Result<()> {
    let degree = rule.len() - 1;
    for (k, (res, mu)) in chebyshev_residuals(rule, degree).into_iter().enumerate() {
        if !(res.abs() <= EXACTNESS_TOL * (1.0 + mu.abs())) {
            return Err(QuadError::IllConditioned {
                degree: k,
                residual: res,
            });
        }
    }
    Ok(())
}

fn family_rule(family: NodeFamily, n: usize) -> Result<QuadratureRule> {
    let mut nodes = node_family(family, n)?;
    let mut weights = family_weights(family, n);
    symmetrize(&mut nodes, &mut weights);
    let tag = match family {
        NodeFamily::ClenshawCurtis => Family::ClenshawCurtis,
        NodeFamily::Filippi => Family::Filippi,
        NodeFamily::Polya => Family::Polya,
    };
    let rule = QuadratureRule::new(WeightSpec::legendre(), nodes, weights, tag, n - 1)?;
    check_interpolatory(&rule)?;
    Ok(rule)
}

/// n-point Clenshaw-Curtis rule for w = 1 (n >= 2).
pub fn clenshaw_curtis(n: usize) -> Result<QuadratureRule> {
    family_rule(NodeFamily::ClenshawCurtis, n)
}

/// n-point Filippi rule for w = 1 (n >= 1).
pub fn filippi(n: usize) -> Result<QuadratureRule> {
    family_rule(NodeFamily::Filippi, n)
}

/// n-point Polya rule for w = 1 (n >= 1).
pub fn polya(n: usize) -> Result<QuadratureRule> {
    family_rule(NodeFamily::Polya, n)
}

/// Interpolatory rule for `weight` at arbitrary distinct nodes in [-1, 1].
pub fn interpolatory_rule(weight: &WeightSpec, nodes: &[f64]) -> Result<QuadratureRule> {
    if nodes.is_empty() {
        return Err(QuadError::Size {
            what: "node count",
            got: 0,
            min: 1,
        });
    }
    let mut sorted = nodes.to_vec();
    if sorted.iter().any(|x| !x.is_finite()) {
        return Err(QuadError::InvalidNodes("non-finite node".into()));
    }
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(QuadError::InvalidNodes("nodes must be distinct".into()));
    }
    let n = sorted.len();
    let matrix = DMatrix::from_fn(n, n, |k, j| {
        let x = sorted[j];
        // T_k(x) by the three-term recurrence
        let (mut prev, mut cur) = (1.0, x);
        match k {
            0 => 1.0,
            _ => {
                for _ in 1..k {
                    let next = 2.0 * x * cur - prev;
                    prev = cur;
                    cur = next;
                }
                cur
            }
        }
    });
    let rhs = DVector::from_vec(chebyshev_moments(weight, n));
    let solution = matrix.lu().solve(&rhs).ok_or(QuadError::IllConditioned {
        degree: n - 1,
        residual: f64::INFINITY,
    })?;
    let weights: Vec<f64> = solution.iter().copied().collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(QuadError::IllConditioned {
            degree: n - 1,
            residual: f64::INFINITY,
        });
    }
    let rule = QuadratureRule::new(*weight, sorted, weights, Family::Custom, n - 1)?;
    check_interpolatory(&rule)?;
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn node_family_examples() {
        assert_eq!(node_family(NodeFamily::ClenshawCurtis, 3).unwrap(), vec![-1.0, 0.0, 1.0]);
        let p = node_family(NodeFamily::Polya, 2).unwrap();
        assert_relative_eq!(p[0], -(0.5f64.sqrt()), max_relative = 1e-15);
        assert_relative_eq!(p[1], 0.5f64.sqrt(), max_relative = 1e-15);
        assert_eq!(node_family(NodeFamily::Filippi, 1).unwrap(), vec![0.0]);
        assert!(node_family(NodeFamily::ClenshawCurtis, 1).is_err());
        assert!(node_family(NodeFamily::Polya, 0).is_err());
    }

    #[test]
    fn node_family_matches_cosines() {
        for n in [2, 3, 8, 17] {
            let cc = node_family(NodeFamily::ClenshawCurtis, n).unwrap();
            for (i, x) in cc.iter().enumerate() {
                let j = n - 1 - i;
                assert!((x - (j as f64 * PI / (n - 1) as f64).cos()).abs() < 1e-15);
            }
            let fi = node_family(NodeFamily::Filippi, n).unwrap();
            for (i, x) in fi.iter().enumerate() {
                let j = n - i;
                assert!((x - (j as f64 * PI / (n + 1) as f64).cos()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn simpson_from_moments() {
        let r = interpolatory_rule(&WeightSpec::legendre(), &[-1.0, 0.0, 1.0]).unwrap();
        let expect = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for (a, e) in r.weights().iter().zip(expect) {
            assert_relative_eq!(*a, e, max_relative = 1e-14);
        }
        let cc = clenshaw_curtis(3).unwrap();
        for (a, e) in cc.weights().iter().zip(expect) {
            assert_relative_eq!(*a, e, max_relative = 1e-15);
        }
    }

    #[test]
    fn single_node_and_polya_pair() {
        let r = interpolatory_rule(&WeightSpec::legendre(), &[0.0]).unwrap();
        assert_relative_eq!(r.weights()[0], 2.0, max_relative = 1e-15);
        let nodes = node_family(NodeFamily::Polya, 2).unwrap();
        let r = interpolatory_rule(&WeightSpec::legendre(), &nodes).unwrap();
        assert_relative_eq!(r.weights()[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.weights()[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn explicit_formulas_match_linear_solve() {
        let w = WeightSpec::legendre();
        for family in [NodeFamily::ClenshawCurtis, NodeFamily::Filippi, NodeFamily::Polya] {
            for n in [2, 3, 4, 7, 16, 33, 64] {
                let fast = family_rule(family, n).unwrap();
                let slow = interpolatory_rule(&w, fast.nodes()).unwrap();
                for (a, b) in fast.weights().iter().zip(slow.weights()) {
                    assert!((a - b).abs() < 1e-13, "{family:?} n={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_nodes() {
        let w = WeightSpec::legendre();
        assert!(matches!(interpolatory_rule(&w, &[]), Err(QuadError::Size { .. })));
        assert!(matches!(
            interpolatory_rule(&w, &[0.1, 0.1]),
            Err(QuadError::InvalidNodes(_))
        ));
        assert!(interpolatory_rule(&w, &[0.0, 2.0]).is_err());
    }

    #[test]
    fn nearly_coincident_nodes_are_ill_conditioned() {
        let w = WeightSpec::legendre();
        let nodes = [-0.5, 0.0, 1e-9, 2e-9, 3e-9, 0.5];
        assert!(matches!(
            interpolatory_rule(&w, &nodes),
            Err(QuadError::IllConditioned { .. })
        ));
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let r = interpolatory_rule(&WeightSpec::legendre(), &[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(r.nodes(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn large_families_are_positive() {
        for n in [129, 513, 1025] {
            for r in [clenshaw_curtis(n).unwrap(), filippi(n).unwrap(), polya(n).unwrap()] {
                assert!(r.is_positive());
                assert_relative_eq!(r.weights().iter().sum::<f64>(), 2.0, max_relative = 1e-13);
            }
        }
    }
}
