//! Gauss and Gauss-Radau rules via the Golub-Welsch eigenvalue route.

use crate::eigen::symmetric_tridiagonal;
use crate::error::{QuadError, Result};
use crate::orthopoly::{recurrence, RecurrenceTable, WeightSpec};

use super::{symmetrize, Family, QuadratureRule};

/// Which end of [-1, 1] a Radau rule pins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedEnd {
    Left,
    Right,
}

impl FixedEnd {
    fn point(self) -> f64 {
        match self {
            FixedEnd::Left => -1.0,
            FixedEnd::Right => 1.0,
        }
    }
}

/// Sum of squares of the orthonormal polynomials q_0..q_{m-1} at x, scaled by
/// beta_0, plus the characteristic polynomial of the m x m Jacobi matrix and
/// its derivative (up to a constant).
fn jacobi_eval(alpha: &[f64], beta: &[f64], x: f64) -> (f64, f64, f64) {
    let m = alpha.len();
    let (mut q_prev, mut q) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut sum_sq = q * q;
    for k in 0..m {
        let b_k = if k == 0 { 0.0 } else { beta[k].sqrt() };
        let scale = if k + 1 < m { beta[k + 1].sqrt() } else { 1.0 };
        let q_next = ((x - alpha[k]) * q - b_k * q_prev) / scale;
        let d_next = (q + (x - alpha[k]) * d - b_k * d_prev) / scale;
        (q_prev, q, d_prev, d) = (q, q_next, d, d_next);
        if k + 1 < m {
            sum_sq += q * q;
        }
    }
    (sum_sq, q, d)
}

/// Nodes and weights of the Gauss rule for the Jacobi matrix built from the
/// first `alpha.len()` coefficients. Eigenvalues are refined by Newton steps on
/// the characteristic polynomial; weights come from the Christoffel sums,
/// which keep their relative accuracy near the endpoints.
pub(crate) fn golub_welsch(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let off: Vec<f64> = beta[1..alpha.len()].iter().map(|b| b.sqrt()).collect();
    let eig = symmetric_tridiagonal(alpha, &off)?;
    let mut nodes = eig.values;
    let mut weights = Vec::with_capacity(nodes.len());
    for (x, z) in nodes.iter_mut().zip(&eig.first_components_sq) {
        let mut y = *x;
        for _ in 0..3 {
            let (_, p, dp) = jacobi_eval(alpha, beta, y);
            if dp == 0.0 || !(p / dp).is_finite() {
                break;
            }
            let step = p / dp;
            y -= step;
            if step.abs() <= f64::EPSILON * y.abs().max(1e-300) {
                break;
            }
        }
        if (y - *x).abs() <= 1e-8 {
            *x = y;
        }
        let (sum_sq, _, _) = jacobi_eval(alpha, beta, *x);
        let w = beta[0] / sum_sq;
        weights.push(if w.is_finite() && w > 0.0 { w } else { beta[0] * z });
    }
    Ok((nodes, weights))
}

/// n-point Gauss rule, exact on P_{2n-1}.
pub fn gauss_rule(weight: &WeightSpec, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(QuadError::Size {
            what: "Gauss node count",
            got: 0,
            min: 1,
        });
    }
    let table = recurrence(weight, n)?;
    let (mut nodes, mut weights) = golub_welsch(&table.alpha, &table.beta)?;
    symmetrize(&mut nodes, &mut weights);
    QuadratureRule::new(*weight, nodes, weights, Family::Gauss, 2 * n - 1)
}

/// Replaces the last diagonal entry of the n x n Jacobi matrix so that `a`
/// becomes an eigenvalue. Uses ratios p_k(a) / p_{k-1}(a) of the monic
/// orthogonal polynomials, which stay finite where p_k(+-1) under- or
/// overflows.
fn radau_modified(table: &RecurrenceTable, a: f64) -> Vec<f64> {
    let n = table.len();
    let last = n - 1;
    let mut ratio = a - table.alpha[0];
    for k in 2..=last {
        ratio = (a - table.alpha[k - 1]) - table.beta[k - 1] / ratio;
    }
    let mut alpha = table.alpha.clone();
    alpha[last] = a - table.beta[last] / ratio;
    alpha
}

/// n-point Gauss-Radau rule with one node pinned at -1 or +1, exact on P_{2n-2}.
pub fn radau_rule(weight: &WeightSpec, n: usize, fixed_end: FixedEnd) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(QuadError::Size {
            what: "Radau node count",
            got: n,
            min: 2,
        });
    }
    let table = recurrence(weight, n)?;
    let a = fixed_end.point();
    let alpha = radau_modified(&table, a);
    let (mut nodes, weights) = golub_welsch(&alpha, &table.beta)?;
    let (family, pinned) = match fixed_end {
        FixedEnd::Left => (Family::RadauLeft, 0),
        FixedEnd::Right => (Family::RadauRight, n - 1),
    };
    nodes[pinned] = a;
    QuadratureRule::new(*weight, nodes, weights, family, 2 * n - 2)
}
