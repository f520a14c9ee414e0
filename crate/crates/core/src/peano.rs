//! Peano kernels of quadrature error functionals and the bounds built on them.
//!
//! For a rule Q exact on P_s, the error R[f] = I_w[f] - Q[f] of any f in V_s
//! is the Stieltjes integral of K_s against f^(s), where
//!
//! ```text
//! K_s(t) = (1/s!) * ( I_w[(. - t)_+^s] - sum_j a_j (x_j - t)_+^s ),
//! ```
//!
//! so |R[f]| <= sup|K_s| * Var f^(s). Freud's estimate bounds sup|K_s| for
//! positive interpolatory rules by 5 M ((s+2) pi)^(s+1) / s! * n^-(s+1).
//!
//! The power (u)_+^0 is 1 for u > 0 and 0 for u <= 0, so K_0 is
//! right-continuous at the nodes. The sup search evaluates one-sided limits at
//! every node exactly instead of probing next to it.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::TestFunction;
use crate::error::{QuadError, Result};
use crate::orthopoly::truncated_moment;
use crate::rules::{compound_rule, exactness_degree, Family, QuadratureRule, MERGE_TOL};
use crate::sum::Neumaier;

/// Samples per inter-node subinterval before golden-section refinement.
pub const SAMPLES_PER_INTERVAL: usize = 64;
/// Width at which golden-section refinement stops.
pub const ARGMAX_TOL: f64 = 1e-12;
/// Relative tolerance of the compound scaling identity.
pub const SCALING_TOL: f64 = 1e-9;
/// Relative slack on |R[f]| <= sup|K_s| Var f^(s).
pub const KERNEL_SLACK: f64 = 1e-10;
/// Same slack for weights whose kernels go through the reference integrator.
pub const KERNEL_SLACK_REFERENCE: f64 = 1e-8;
/// Relative slack on sup|K_s| <= Freud bound.
/// Absolute allowance, in units of the summed magnitudes, for rounding in Q[f].
pub const ROUNDING_ALLOWANCE: f64 = 8.0 * f64::EPSILON;
pub const FREUD_SLACK: f64 = 1e-12;

/// 5 M ((s+2) pi)^(s+1) / s! * n^-(s+1).
pub fn freud_bound(m: f64, s: u32, n: usize) -> f64 {
    let s1 = s as i32 + 1;
    let fact: f64 = (1..=s).map(f64::from).product();
    5.0 * m * ((s as f64 + 2.0) * PI).powi(s1) / fact * (n as f64).powi(-s1)
}

fn factorial(s: u32) -> f64 {
    (1..=s).map(f64::from).product()
}

/// Which one-sided limit to take when t sits on a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Node at t excluded: the value under the (0)_+^0 = 0 convention.
    Right,
    /// Node at t included.
    Left,
}

#[derive(Debug, Clone, Copy)]
struct CompoundView {
    copies: usize,
    /// Part of the weight at a right subinterval end owned by that subinterval.
    right_share: f64,
}

/// K_s of one rule, with the exactness precondition checked once.
#[derive(Debug, Clone)]
pub struct PeanoKernel<'a> {
    rule: &'a QuadratureRule,
    s: u32,
    inv_fact: f64,
    compound: Option<CompoundView>,
}

impl<'a> PeanoKernel<'a> {
    pub fn new(rule: &'a QuadratureRule, s: u32) -> Result<Self> {
        let exactness = exactness_degree(rule, s as usize);
        if exactness < s as usize {
            return Err(QuadError::PreconditionViolation { s, exactness });
        }
        // Rounding in the constant check must not pass as exactness either.
        if s == 0 && crate::rules::inexact_on_constants(rule) {
            return Err(QuadError::PreconditionViolation { s, exactness: 0 });
        }
        let compound = match rule.family() {
            Family::Compound { elementary, copies } => {
                let right_share = match (elementary.nodes().last(), elementary.weights().last()) {
                    (Some(&x), Some(&a)) if x == 1.0 => a / *copies as f64,
                    _ => 0.0,
                };
                Some(CompoundView {
                    copies: *copies,
                    right_share,
                })
            }
            _ => None,
        };
        Ok(Self {
            rule,
            s,
            inv_fact: 1.0 / factorial(s),
            compound,
        })
    }

    pub fn order(&self) -> u32 {
        self.s
    }

    pub fn rule(&self) -> &QuadratureRule {
        self.rule
    }

    /// K_s(t) under the (0)_+^0 = 0 convention.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.limit(t, Side::Right)
    }

    /// One-sided limit of K_s at t.
    pub fn limit(&self, t: f64, side: Side) -> Result<f64> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(QuadError::Domain(t));
        }
        Ok(match self.compound {
            Some(view) => self.compound_eval(view, t, side),
            None => self.global_eval(t, side)?,
        })
    }

    fn power(&self, u: f64) -> f64 {
        u.powi(self.s as i32)
    }

    fn first_node_after(&self, t: f64, side: Side) -> usize {
        let nodes = self.rule.nodes();
        match side {
            Side::Right => nodes.partition_point(|&x| x <= t),
            Side::Left => nodes.partition_point(|&x| x < t),
        }
    }

    fn global_eval(&self, t: f64, side: Side) -> Result<f64> {
        let mut acc = Neumaier::new();
        acc.add(truncated_moment(self.rule.weight(), self.s, t)?);
        let start = self.first_node_after(t, side);
        for (&x, &a) in self.rule.nodes()[start..].iter().zip(&self.rule.weights()[start..]) {
            acc.add(-a * self.power(x - t));
        }
        Ok(acc.value() * self.inv_fact)
    }

    /// Compound rules are exact on P_s piece by piece, so only the
    /// subinterval containing t contributes to K_s(t).
    fn compound_eval(&self, view: CompoundView, t: f64, side: Side) -> f64 {
        let n = view.copies;
        let piece_of = |t: f64| (((t + 1.0) * n as f64 / 2.0).floor() as usize).min(n - 1);
        let left_end = |nu: usize| -1.0 + (2 * nu) as f64 / n as f64;
        let mut nu = piece_of(t);
        if side == Side::Left && nu > 0 && (t - left_end(nu)).abs() <= MERGE_TOL {
            nu -= 1;
        }
        let b = if nu + 1 == n { 1.0 } else { left_end(nu + 1) };
        let s1 = self.s as i32 + 1;

        let mut acc = Neumaier::new();
        acc.add((b - t).max(0.0).powi(s1) / s1 as f64);
        let nodes = self.rule.nodes();
        let weights = self.rule.weights();
        let start = self.first_node_after(t, side);
        for j in start..nodes.len() {
            let x = nodes[j];
            if x >= b - MERGE_TOL {
                break;
            }
            acc.add(-weights[j] * self.power(x - t));
        }
        if view.right_share != 0.0 {
            let at_b = (b - t).max(0.0);
            let included = self.s > 0 || at_b > 0.0 || side == Side::Left;
            if included {
                acc.add(-view.right_share * self.power(at_b));
            }
        }
        acc.value() * self.inv_fact
    }

    /// Evaluator on the closed interval [p, q] between consecutive
    /// breakpoints, continuous up to both ends (one-sided limits there).
    fn interval_evaluator(&self, p: f64, q: f64) -> Result<Box<dyn Fn(f64) -> f64 + Sync + '_>> {
        if self.compound.is_some() || !self.rule.weight().is_legendre() {
            return Ok(Box::new(move |t: f64| {
                let (t, side) = if t <= p {
                    (p, Side::Right)
                } else if t >= q {
                    (q, Side::Left)
                } else {
                    (t, Side::Right)
                };
                self.limit(t, side).unwrap_or(f64::NAN)
            }));
        }
        // Legendre, global: sum over nodes x_j >= q of a_j (x_j - t)^s is a
        // polynomial of degree s in t, expanded about the midpoint c.
        let s = self.s as usize;
        let c = 0.5 * (p + q);
        let start = self.rule.nodes().partition_point(|&x| x < q);
        let mut shifted = vec![Neumaier::new(); s + 1];
        for (&x, &a) in self.rule.nodes()[start..].iter().zip(&self.rule.weights()[start..]) {
            let d = x - c;
            let mut term = a;
            for acc in shifted.iter_mut() {
                acc.add(term);
                term *= d;
            }
        }
        let moments: Vec<f64> = shifted.iter().map(Neumaier::value).collect();
        let binom: Vec<f64> = (0..=s)
            .map(|k| (0..k).fold(1.0, |b, i| b * (s - i) as f64 / (i + 1) as f64))
            .collect();
        let inv_fact = self.inv_fact;
        let s1 = s as i32 + 1;
        Ok(Box::new(move |t: f64| {
            let t = t.clamp(p, q);
            let mut acc = Neumaier::new();
            acc.add((1.0 - t).powi(s1) / s1 as f64);
            let h = c - t;
            for k in 0..=s {
                acc.add(-binom[k] * h.powi((s - k) as i32) * moments[k]);
            }
            acc.value() * inv_fact
        }))
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.rule.len() + 2);
        pts.push(-1.0);
        for &x in self.rule.nodes() {
            if x > *pts.last().unwrap() {
                pts.push(x);
            }
        }
        if *pts.last().unwrap() < 1.0 {
            pts.push(1.0);
        }
        pts
    }

    fn interval_sup(&self, p: f64, q: f64) -> Result<(f64, f64)> {
        let eval = self.interval_evaluator(p, q)?;
        let m = SAMPLES_PER_INTERVAL;
        let samples: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let t = match i {
                    0 => p,
                    _ if i == m - 1 => q,
                    _ => p + (q - p) * 0.5 * (1.0 - (PI * i as f64 / (m - 1) as f64).cos()),
                };
                (t, eval(t).abs())
            })
            .collect();
        let mut best = 0;
        for (i, &(_, v)) in samples.iter().enumerate() {
            if v.is_nan() {
                return Err(QuadError::Domain(samples[i].0));
            }
            if v > samples[best].1 {
                best = i;
            }
        }
        let (mut best_t, mut best_v) = samples[best];
        let mut lo = samples[best.saturating_sub(1)].0;
        let mut hi = samples[(best + 1).min(m - 1)].0;

        // golden-section maximisation of |K_s| on [lo, hi]
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let mut f1 = eval(x1).abs();
        let mut f2 = eval(x2).abs();
        while hi - lo > ARGMAX_TOL {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = eval(x1).abs();
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = eval(x2).abs();
            }
        }
        for (t, v) in [(x1, f1), (x2, f2)] {
            if v > best_v {
                best_v = v;
                best_t = t;
            }
        }
        Ok((best_v, best_t))
    }

    /// sup over [-1, 1] of |K_s| and a point attaining it.
    pub fn sup_norm(&self) -> Result<(f64, f64)> {
        let pts = self.breakpoints();
        let per_interval: Vec<(f64, f64)> = pts
            .par_windows(2)
            .map(|w| self.interval_sup(w[0], w[1]))
            .collect::<Result<_>>()?;
        let mut best = (0.0, -1.0);
        for (v, t) in per_interval {
            if v > best.0 {
                best = (v, t);
            }
        }
        Ok(best)
    }
}

/// K_s(t) of `rule`.
pub fn kernel_value(rule: &QuadratureRule, s: u32, t: f64) -> Result<f64> {
    PeanoKernel::new(rule, s)?.value(t)
}

/// sup-norm of a rule's Peano kernel with the Freud bound it is compared to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeanoProfile {
    pub s: u32,
    pub sup_norm: f64,
    pub argmax_t: f64,
    pub freud_bound: Option<f64>,
    pub n: usize,
    pub family: String,
}

impl PeanoProfile {
    /// sup_norm / freud_bound.
    pub fn ratio(&self) -> Option<f64> {
        self.freud_bound.map(|b| self.sup_norm / b)
    }

    pub fn within_freud(&self) -> Option<bool> {
        self.freud_bound
            .map(|b| self.sup_norm <= b * (1.0 + FREUD_SLACK))
    }
}

/// The Freud bound when `rule` satisfies its premises: positive,
/// interpolatory and a weight with a finite majorant constant M.
pub fn applicable_freud_bound(rule: &QuadratureRule, s: u32) -> Option<f64> {
    let m = rule.weight().freud_m()?;
    (rule.is_positive() && rule.is_interpolatory()).then(|| freud_bound(m, s, rule.len()))
}

pub fn kernel_sup_norm(rule: &QuadratureRule, s: u32) -> Result<PeanoProfile> {
    let kernel = PeanoKernel::new(rule, s)?;
    let (sup_norm, argmax_t) = kernel.sup_norm()?;
    Ok(PeanoProfile {
        s,
        sup_norm,
        argmax_t,
        freud_bound: applicable_freud_bound(rule, s),
        n: rule.len(),
        family: rule.family().label().to_string(),
    })
}

/// Outcome of checking one integrand against one rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub actual_error: f64,
    pub kernel_bound: f64,
    pub freud_bound: Option<f64>,
}

/// |I_w[f] - Q[f]| <= sup|K_s| Var f^(s) <= Freud bound * Var f^(s).
///
/// Integrands without a finite smoothness ceiling are checked at order
/// min(exactness, 3). A violation comes back as `QuadError::BoundViolation`.
pub fn error_bound_check(rule: &QuadratureRule, f: &TestFunction) -> Result<BoundCheck> {
    let exactness = exactness_degree(rule, f.s().unwrap_or(3) as usize);
    let s = f.bound_order(exactness)?;
    let profile = kernel_sup_norm(rule, s)?;
    let exact = f.exact_integral(rule.weight())?.value;
    let actual_error = (exact - rule.apply(|x| f.eval(x))).abs();
    let magnitude: f64 = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(x, a)| (a * f.eval(*x)).abs())
        .sum::<f64>()
        + exact.abs();
    let variation = f.variation();
    let check = BoundCheck {
        actual_error,
        kernel_bound: profile.sup_norm * variation,
        freud_bound: profile.freud_bound.map(|b| b * variation),
    };
    let slack = if rule.weight().is_legendre() {
        KERNEL_SLACK
    } else {
        KERNEL_SLACK_REFERENCE
    };
    let kernel_ok = check.actual_error
        <= check.kernel_bound * (1.0 + slack) + ROUNDING_ALLOWANCE * magnitude;
    let freud_ok = check
        .freud_bound
        .map_or(true, |b| check.kernel_bound <= b * (1.0 + FREUD_SLACK));
    if kernel_ok && freud_ok {
        Ok(check)
    } else {
        Err(QuadError::BoundViolation {
            actual: check.actual_error,
            kernel_bound: check.kernel_bound,
            freud_bound: check.freud_bound,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub sup_norm: f64,
}

/// sup|K_s| of the n-fold compound rules, checked against
/// sup|K_s(Q^(n))| = n^-(s+1) sup|K_s(Q)|.
pub fn compound_kernel_scaling(
    elementary: &QuadratureRule,
    s: u32,
    n_list: &[usize],
) -> Result<Vec<ScalingRecord>> {
    let base = kernel_sup_norm(elementary, s)?.sup_norm;
    let records: Vec<ScalingRecord> = n_list
        .par_iter()
        .map(|&n| {
            let rule = compound_rule(elementary, n)?;
            let sup_norm = kernel_sup_norm(&rule, s)?.sup_norm;
            Ok(ScalingRecord { n, sup_norm })
        })
        .collect::<Result<_>>()?;
    for r in &records {
        let ratio = r.sup_norm * (r.n as f64).powi(s as i32 + 1) / base;
        if !((ratio - 1.0).abs() <= SCALING_TOL) {
            return Err(QuadError::ScalingViolation { n: r.n, ratio });
        }
    }
    Ok(records)
}

/// Theorem-2 constant of an elementary rule: sup|K_s(Q)|.
pub fn c_estimate(elementary: &QuadratureRule, s: u32) -> Result<f64> {
    Ok(kernel_sup_norm(elementary, s)?.sup_norm)
}
