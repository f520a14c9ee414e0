//! High-precision reference integrator for ultraspherical weights.
//!
//! Integrals against w(x) = (1 - x^2)^(lambda - 1/2) are rewritten with
//! x = cos(theta), which turns them into integrals of
//! sin(theta)^(2 lambda) * g(cos theta) over a theta-interval. For integer
//! 2*lambda that integrand is analytic; otherwise the end pieces touching
//! theta = 0 or theta = pi are graded geometrically. A composite 20-point
//! Gauss-Legendre rule is then refined by doubling the number of pieces until
//! two successive values agree.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::eigen::symmetric_tridiagonal;
use crate::orthopoly::WeightSpec;
use crate::sum::Neumaier;

const BASE_POINTS: usize = 20;
const REL_TOL: f64 = 1e-14;
const MAX_LEVEL: u32 = 12;
const GRADING_RATIO: f64 = 0.5;
const GRADING_LAYERS: usize = 50;

fn base_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = BASE_POINTS;
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        let eig = symmetric_tridiagonal(&vec![0.0; n], &off)
            .expect("20-point Legendre Jacobi matrix converges");
        let weights = eig.first_components_sq.iter().map(|z| 2.0 * z).collect();
        (eig.values, weights)
    })
}

/// Adds the Gauss approximation of the integral of `f` over `[a, b]` to the
/// value and absolute-value accumulators.
fn gauss_piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, acc: &mut Neumaier, abs_acc: &mut f64) {
    let (nodes, weights) = base_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (x, w) in nodes.iter().zip(weights) {
        let v = w * half * f(mid + half * x);
        acc.add(v);
        *abs_acc += v.abs();
    }
}

fn graded_piece<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    toward_a: bool,
    acc: &mut Neumaier,
    abs_acc: &mut f64,
) {
    // Layers [a + r^(k+1) h, a + r^k h] shrinking toward the singular end.
    let h = b - a;
    let mut outer = 1.0;
    for _ in 0..GRADING_LAYERS {
        let inner = outer * GRADING_RATIO;
        let (lo, hi) = if toward_a {
            (a + inner * h, a + outer * h)
        } else {
            (b - outer * h, b - inner * h)
        };
        gauss_piece(f, lo, hi, acc, abs_acc);
        outer = inner;
    }
    let (lo, hi) = if toward_a {
        (a, a + outer * h)
    } else {
        (b - outer * h, b)
    };
    gauss_piece(f, lo, hi, acc, abs_acc);
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, grade_a: bool, grade_b: bool) -> (f64, f64) {
    let mut acc = Neumaier::new();
    let mut abs_acc = 0.0;
    let h = (b - a) / pieces as f64;
    for k in 0..pieces {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == pieces { b } else { a + (k + 1) as f64 * h };
        let first = k == 0 && grade_a;
        let last = k + 1 == pieces && grade_b;
        match (first, last) {
            (true, true) => {
                let m = 0.5 * (lo + hi);
                graded_piece(f, lo, m, true, &mut acc, &mut abs_acc);
                graded_piece(f, m, hi, false, &mut acc, &mut abs_acc);
            }
            (true, false) => graded_piece(f, lo, hi, true, &mut acc, &mut abs_acc),
            (false, true) => graded_piece(f, lo, hi, false, &mut acc, &mut abs_acc),
            (false, false) => gauss_piece(f, lo, hi, &mut acc, &mut abs_acc),
        }
    }
    (acc.value(), abs_acc)
}

/// Integral of `f` over `[a, b]` by composite Gauss-Legendre with interval
/// doubling. `grade_a` / `grade_b` request geometric grading toward an end
/// where `f` has an algebraic singularity.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, grade_a: bool, grade_b: bool) -> f64 {
    if a == b {
        return 0.0;
    }
    let (mut prev, _) = composite(&f, a, b, 1, grade_a, grade_b);
    let mut pieces = 1;
    for _ in 0..MAX_LEVEL {
        pieces *= 2;
        let (cur, abs) = composite(&f, a, b, pieces, grade_a, grade_b);
        let diff = (cur - prev).abs();
        if diff <= REL_TOL * cur.abs() || diff <= 1e-16 * abs {
            return cur;
        }
        prev = cur;
    }
    prev
}

fn sin_power(weight: &WeightSpec) -> impl Fn(f64) -> f64 {
    let exponent = 2.0 * weight.lambda();
    let int_exp = (exponent.fract() == 0.0).then_some(exponent as i32);
    move |theta: f64| match int_exp {
        Some(k) => theta.sin().powi(k),
        None => theta.sin().powf(exponent),
    }
}

fn needs_grading(weight: &WeightSpec) -> bool {
    (2.0 * weight.lambda()).fract() != 0.0
}

/// Integral over theta in `[lo, hi]` of sin(theta)^(2 lambda) * h(theta).
pub fn integrate_theta<H: Fn(f64) -> f64>(weight: &WeightSpec, lo: f64, hi: f64, h: H) -> f64 {
    let sp = sin_power(weight);
    let grade = needs_grading(weight);
    let grade_lo = grade && lo < 0.5;
    let grade_hi = grade && PI - hi < 0.5;
    integrate(|theta| sp(theta) * h(theta), lo, hi, grade_lo, grade_hi)
}

/// Integral of w(x) g(x) over `[a, b]` with `-1 <= a <= b <= 1`, `g` smooth.
pub fn weighted_integral<G: Fn(f64) -> f64>(weight: &WeightSpec, a: f64, b: f64, g: G) -> f64 {
    let lo = b.clamp(-1.0, 1.0).acos();
    let hi = a.clamp(-1.0, 1.0).acos();
    integrate_theta(weight, lo, hi, |theta| g(theta.cos()))
}

/// Integral of w(x) (x - t)^s over `[t, 1]`, with the factor x - t evaluated
/// as cos(theta) - cos(theta_t) in product form to avoid cancellation.
pub fn truncated_power_integral(weight: &WeightSpec, s: u32, t: f64) -> f64 {
    let theta_t = t.acos();
    integrate_theta(weight, 0.0, theta_t, |theta| {
        let diff = 2.0 * (0.5 * (theta_t + theta)).sin() * (0.5 * (theta_t - theta)).sin();
        diff.powi(s as i32)
    })
}
