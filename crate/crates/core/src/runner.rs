//! Convergence experiments: error sweeps over n, fitted orders, bound chains.

use std::fmt;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::TestFunction;
use crate::error::{QuadError, Result};
use crate::orthopoly::WeightSpec;
use crate::peano::{applicable_freud_bound, c_estimate, kernel_sup_norm, ROUNDING_ALLOWANCE};
use crate::rules::{
    clenshaw_curtis, compound_rule, exactness_degree, filippi, gauss_rule, kronrod_rule, polya,
    radau_rule, Elementary, FixedEnd, QuadratureRule,
};

/// Errors below this are treated as rounding noise and left out of fits.
pub const NOISE_FLOOR: f64 = 1e-14;
/// A fitted order may be this much shallower than -(s+1).
pub const SLOPE_TOLERANCE: f64 = 0.25;
/// Relative slack on each link of error <= kernel bound <= Freud bound.
pub const CHAIN_SLACK: f64 = 1e-10;

/// 4, 8, ..., 1024.
pub fn default_grid() -> Vec<usize> {
    geometric_grid(4, 1024, 2.0)
}

/// round(n_min r^k) for k = 0, 1, ... up to n_max, duplicates removed.
/// An empty grid comes back for n_min = 0, n_min > n_max or r <= 1.
pub fn geometric_grid(n_min: usize, n_max: usize, ratio: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    if n_min == 0 || n_min > n_max || !(ratio > 1.0) {
        return out;
    }
    for k in 0.. {
        let n = (n_min as f64 * ratio.powi(k)).round();
        if n > n_max as f64 {
            break;
        }
        if out.last() != Some(&(n as usize)) {
            out.push(n as usize);
        }
    }
    out
}

/// A rule family swept over its size parameter n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Gauss,
    RadauLeft,
    RadauRight,
    ClenshawCurtis,
    Filippi,
    Polya,
    /// n is the size of the underlying Gauss rule; the rule has 2n+1 nodes.
    Kronrod,
    /// n is the number of subintervals.
    Compound(Elementary),
}

impl RuleFamily {
    pub fn build(&self, weight: &WeightSpec, n: usize) -> Result<QuadratureRule> {
        let legendre_only = |rule: fn(usize) -> Result<QuadratureRule>| {
            if weight.is_legendre() {
                rule(n)
            } else {
                Err(QuadError::UnsupportedWeight(format!(
                    "{} rules are built for the Legendre weight only, got {weight}",
                    self.label()
                )))
            }
        };
        match self {
            RuleFamily::Gauss => gauss_rule(weight, n),
            RuleFamily::RadauLeft => radau_rule(weight, n, FixedEnd::Left),
            RuleFamily::RadauRight => radau_rule(weight, n, FixedEnd::Right),
            RuleFamily::ClenshawCurtis => legendre_only(clenshaw_curtis),
            RuleFamily::Filippi => legendre_only(filippi),
            RuleFamily::Polya => legendre_only(polya),
            RuleFamily::Kronrod => kronrod_rule(weight, n),
            RuleFamily::Compound(e) => {
                if !weight.is_legendre() {
                    return Err(QuadError::WeightMismatch(weight.label()));
                }
                compound_rule(&e.rule(), n)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            RuleFamily::Gauss => "gauss".into(),
            RuleFamily::RadauLeft => "radau_left".into(),
            RuleFamily::RadauRight => "radau_right".into(),
            RuleFamily::ClenshawCurtis => "clenshaw_curtis".into(),
            RuleFamily::Filippi => "filippi".into(),
            RuleFamily::Polya => "polya".into(),
            RuleFamily::Kronrod => "kronrod".into(),
            RuleFamily::Compound(e) => format!("compound:{}", e.name()),
        }
    }
}

impl fmt::Display for RuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for RuleFamily {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(name) = s.strip_prefix("compound:") {
            return Elementary::parse(name)
                .map(RuleFamily::Compound)
                .ok_or_else(|| QuadError::Format(format!("unknown elementary rule '{name}'")));
        }
        Ok(match s.replace('-', "_").as_str() {
            "gauss" => RuleFamily::Gauss,
            "radau" | "radau_left" => RuleFamily::RadauLeft,
            "radau_right" => RuleFamily::RadauRight,
            "cc" | "clenshaw_curtis" => RuleFamily::ClenshawCurtis,
            "filippi" => RuleFamily::Filippi,
            "polya" => RuleFamily::Polya,
            "kronrod" => RuleFamily::Kronrod,
            _ => return Err(QuadError::Format(format!("unknown rule family '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub n: usize,
    pub error: f64,
    pub bound_kernel: f64,
    pub bound_freud: Option<f64>,
}

impl Sample {
    /// error <= kernel bound <= Freud bound with the given relative slack;
    /// `rounding` is an absolute allowance on the first link.
    pub fn chain_holds(&self, slack: f64, rounding: f64) -> bool {
        let kernel_ok = self.error <= self.bound_kernel * (1.0 + slack) + rounding;
        let freud_ok = self
            .bound_freud
            .map_or(true, |b| self.bound_kernel <= b * (1.0 + slack));
        kernel_ok && freud_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub function: String,
    pub weight: WeightSpec,
    /// Kernel order used for the bounds.
    pub s: u32,
    pub samples: Vec<Sample>,
    /// Slope of the error envelope, the one `pass` is judged on.
    pub fitted_slope: Option<f64>,
    /// Slope of the raw errors over the same window.
    pub raw_slope: Option<f64>,
    pub expected_slope: Option<f64>,
    /// sup|K_s| of the elementary rule, for compound sweeps.
    #[serde(rename = "C_estimate")]
    pub c_estimate: Option<f64>,
    /// Every windowed error was below the noise floor.
    pub all_noise: bool,
    pub bounds_hold: bool,
    pub pass: bool,
}

#[derive(Serialize)]
struct Summary<'a> {
    family: &'a str,
    function: &'a str,
    weight: String,
    fitted_slope: Option<f64>,
    expected_slope: Option<f64>,
    pass: bool,
    #[serde(rename = "C_estimate", skip_serializing_if = "Option::is_none")]
    c_estimate: Option<f64>,
}

impl ConvergenceReport {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(Summary {
            family: &self.family,
            function: &self.function,
            weight: self.weight.label(),
            fitted_slope: self.fitted_slope,
            expected_slope: self.expected_slope,
            pass: self.pass,
            c_estimate: self.c_estimate,
        })
        .expect("summary serializes")
    }
}

pub const CSV_HEADER: &str = "family,function,weight,n,error,kernel_bound,freud_bound";

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV rows for a list of reports, in report and grid order.
pub fn reports_to_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        for s in &r.samples {
            let freud = s.bound_freud.map(fmt_num).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.family,
                r.function,
                r.weight.label(),
                s.n,
                fmt_num(s.error),
                fmt_num(s.bound_kernel),
                freud
            );
        }
    }
    out
}

/// Least-squares slope of log(error) against log(n). Points with error below
/// the noise floor are dropped first.
pub fn fit_slope(points: &[(usize, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e >= NOISE_FLOOR && e.is_finite())
        .map(|&(n, e)| ((n as f64).ln(), e.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(QuadError::InsufficientData(usable.len()));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = usable.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(QuadError::InsufficientData(1));
    }
    Ok(sxy / sxx)
}

/// Suffix maxima max_{m >= n} error(m) of the points above the noise floor.
///
/// Errors on integrands with an interior kink oscillate with the position of
/// the kink relative to the nodes and dip to near zero at sign changes; one
/// dip in the window can move a raw least-squares slope by half an order.
/// The envelope is the tightest nonincreasing majorant of the samples, which
/// is what an O(n^-p) statement is about.
pub fn envelope(points: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|(_, e)| *e >= NOISE_FLOOR && e.is_finite())
        .collect();
    let mut run = 0.0f64;
    for p in out.iter_mut().rev() {
        run = run.max(p.1);
        p.1 = run;
    }
    out
}

fn validate_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(QuadError::Size {
            what: "grid size",
            got: 0,
            min: 1,
        });
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(QuadError::Format("n grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Grid points inside the fit window: the explicit range, or the upper half
/// of the grid (at least four points when the grid has them).
fn window_points(n_grid: &[usize], fit_window: Option<&RangeInclusive<usize>>) -> Result<Vec<usize>> {
    match fit_window {
        Some(range) => {
            let pts: Vec<usize> = n_grid.iter().copied().filter(|n| range.contains(n)).collect();
            if pts.len() < 4 {
                return Err(QuadError::Size {
                    what: "fit window points",
                    got: pts.len(),
                    min: 4,
                });
            }
            Ok(pts)
        }
        None => {
            let take = n_grid.len().div_ceil(2).max(4).min(n_grid.len());
            Ok(n_grid[n_grid.len() - take..].to_vec())
        }
    }
}

struct Cell {
    sample: Sample,
    s: u32,
    rounding: f64,
}

/// Error of Q[f] with the rounding allowance for that sum.
fn measure(rule: &QuadratureRule, f: &TestFunction, exact: f64) -> (f64, f64) {
    let q = rule.apply(|x| f.eval(x));
    let magnitude = exact.abs()
        + rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(x, a)| (a * f.eval(*x)).abs())
            .sum::<f64>();
    ((exact - q).abs(), ROUNDING_ALLOWANCE * magnitude)
}

fn finish(
    family: String,
    f: &TestFunction,
    weight: &WeightSpec,
    cells: Vec<Cell>,
    window: &[usize],
    c_estimate: Option<f64>,
) -> ConvergenceReport {
    let s = cells.iter().map(|c| c.s).min().unwrap_or(0);
    let bounds_hold = cells
        .iter()
        .all(|c| c.sample.chain_holds(CHAIN_SLACK, c.rounding));
    let samples: Vec<Sample> = cells.into_iter().map(|c| c.sample).collect();
    let windowed: Vec<(usize, f64)> = samples
        .iter()
        .filter(|s| window.contains(&s.n))
        .map(|s| (s.n, s.error))
        .collect();
    let all_noise = windowed.iter().all(|(_, e)| *e < NOISE_FLOOR);
    let fitted_slope = fit_slope(&envelope(&windowed)).ok();
    let raw_slope = fit_slope(&windowed).ok();
    let expected_slope = f.s().map(|s| -(s as f64 + 1.0));
    let slope_ok = match (fitted_slope, expected_slope) {
        (Some(fit), Some(exp)) => fit <= exp + SLOPE_TOLERANCE,
        _ => true,
    };
    ConvergenceReport {
        family,
        function: f.name().to_string(),
        weight: *weight,
        s,
        samples,
        fitted_slope,
        raw_slope,
        expected_slope,
        c_estimate,
        all_noise,
        bounds_hold,
        pass: slope_ok && bounds_hold,
    }
}

/// Sweeps `family` over `n_grid` on `f` and fits the empirical order.
pub fn run_convergence(
    family: &RuleFamily,
    f: &TestFunction,
    weight: &WeightSpec,
    n_grid: &[usize],
    fit_window: Option<RangeInclusive<usize>>,
) -> Result<ConvergenceReport> {
    if let RuleFamily::Compound(e) = family {
        if !weight.is_legendre() {
            return Err(QuadError::WeightMismatch(weight.label()));
        }
        return run_compound_labeled(family.label(), &e.rule(), f, n_grid, fit_window);
    }
    validate_grid(n_grid)?;
    let window = window_points(n_grid, fit_window.as_ref())?;
    let exact = f.exact_integral(weight)?.value;
    let cells: Vec<Cell> = n_grid
        .par_iter()
        .map(|&n| {
            let rule = family.build(weight, n)?;
            let probe = f.s().unwrap_or(3) as usize;
            let s = f.bound_order(exactness_degree(&rule, probe))?;
            let (error, rounding) = measure(&rule, f, exact);
            let profile = kernel_sup_norm(&rule, s)?;
            Ok(Cell {
                sample: Sample {
                    n,
                    error,
                    bound_kernel: profile.sup_norm * f.variation(),
                    bound_freud: applicable_freud_bound(&rule, s).map(|b| b * f.variation()),
                },
                s,
                rounding,
            })
        })
        .collect::<Result<_>>()?;
    Ok(finish(family.label(), f, weight, cells, &window, None))
}

/// Sweeps the n-fold compound rules of `elementary` over `n_grid`, bounding
/// each error by C n^-(s+1) Var f^(s) with C = sup|K_s(elementary)|.
pub fn run_compound_convergence(
    elementary: &QuadratureRule,
    f: &TestFunction,
    n_grid: &[usize],
    fit_window: Option<RangeInclusive<usize>>,
) -> Result<ConvergenceReport> {
    let name = Elementary::ALL
        .into_iter()
        .find(|e| &e.rule() == elementary)
        .map(|e| e.name().to_string())
        .unwrap_or_else(|| format!("{}{}", elementary.family().label(), elementary.len()));
    run_compound_labeled(format!("compound:{name}"), elementary, f, n_grid, fit_window)
}

fn run_compound_labeled(
    label: String,
    elementary: &QuadratureRule,
    f: &TestFunction,
    n_grid: &[usize],
    fit_window: Option<RangeInclusive<usize>>,
) -> Result<ConvergenceReport> {
    let weight = *elementary.weight();
    if !weight.is_legendre() {
        return Err(QuadError::WeightMismatch(weight.label()));
    }
    validate_grid(n_grid)?;
    let window = window_points(n_grid, fit_window.as_ref())?;
    let probe = f.s().unwrap_or(3) as usize;
    let s = f.bound_order(exactness_degree(elementary, probe))?;
    let c = c_estimate(elementary, s)?;
    let exact = f.exact_integral(&weight)?.value;
    let cells: Vec<Cell> = n_grid
        .par_iter()
        .map(|&n| {
            let rule = compound_rule(elementary, n)?;
            let (error, rounding) = measure(&rule, f, exact);
            Ok(Cell {
                sample: Sample {
                    n,
                    error,
                    bound_kernel: c * (n as f64).powi(-(s as i32 + 1)) * f.variation(),
                    bound_freud: None,
                },
                s,
                rounding,
            })
        })
        .collect::<Result<_>>()?;
    Ok(finish(label, f, &weight, cells, &window, Some(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fit_slope_examples() {
        assert_relative_eq!(fit_slope(&[(2, 0.5), (4, 0.125)]).unwrap(), -2.0, epsilon = 1e-14);
        let pts: Vec<(usize, f64)> =
            [2usize, 4, 8, 16].iter().map(|&n| (n, 3.7 * (n as f64).powi(-3))).collect();
        assert_relative_eq!(fit_slope(&pts).unwrap(), -3.0, epsilon = 1e-12);
        assert!(matches!(
            fit_slope(&[(2, 1e-16), (4, 1e-16)]),
            Err(QuadError::InsufficientData(0))
        ));
    }

    #[test]
    fn envelope_is_suffix_max() {
        let pts = [(4, 1e-3), (8, 1e-6), (16, 2e-4), (32, 1e-20), (64, 1e-5)];
        assert_eq!(
            envelope(&pts),
            vec![(4, 1e-3), (8, 2e-4), (16, 2e-4), (64, 1e-5)]
        );
    }

    #[test]
    fn grids() {
        assert_eq!(default_grid(), vec![4, 8, 16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(geometric_grid(3, 30, 3.0), vec![3, 9, 27]);
        assert_eq!(geometric_grid(4, 8, 2f64.sqrt()), vec![4, 6, 8]);
        assert!(geometric_grid(4, 8, 1.0).is_empty());
        assert_eq!(window_points(&default_grid(), None).unwrap(), vec![64, 128, 256, 512, 1024]);
        assert_eq!(window_points(&[1, 2, 4], None).unwrap(), vec![1, 2, 4]);
        assert!(window_points(&default_grid(), Some(&(500..=2000))).is_err());
    }

    #[test]
    fn family_parsing() {
        for f in [
            RuleFamily::Gauss,
            RuleFamily::RadauLeft,
            RuleFamily::RadauRight,
            RuleFamily::ClenshawCurtis,
            RuleFamily::Filippi,
            RuleFamily::Polya,
            RuleFamily::Kronrod,
            RuleFamily::Compound(Elementary::Simpson),
        ] {
            assert_eq!(f.label().parse::<RuleFamily>().unwrap(), f);
        }
        assert_eq!("cc".parse::<RuleFamily>().unwrap(), RuleFamily::ClenshawCurtis);
        assert!("compound:boole".parse::<RuleFamily>().is_err());
        assert!("lobatto".parse::<RuleFamily>().is_err());
    }

    #[test]
    fn cc_only_for_legendre() {
        let w = WeightSpec::chebyshev1();
        assert!(RuleFamily::ClenshawCurtis.build(&w, 5).is_err());
        assert!(RuleFamily::Compound(Elementary::Midpoint).build(&w, 5).is_err());
    }

    #[test]
    fn gauss_trunc_power_s2() {
        let f = TestFunction::trunc_power(0.3, 2).unwrap();
        let r = run_convergence(&RuleFamily::Gauss, &f, &WeightSpec::legendre(), &default_grid(), None)
            .unwrap();
        assert_eq!(r.expected_slope, Some(-3.0));
        assert!(r.fitted_slope.unwrap() <= -2.75, "{:?}", r.fitted_slope);
        assert!(r.pass);
    }

    #[test]
    fn smooth_control_hits_noise_floor() {
        let f = TestFunction::smooth_control();
        let r = run_convergence(&RuleFamily::Gauss, &f, &WeightSpec::legendre(), &default_grid(), None)
            .unwrap();
        assert!(r.all_noise);
        assert!(r.fitted_slope.is_none());
        assert!(r.samples.iter().filter(|s| s.n >= 32).all(|s| s.error < NOISE_FLOOR));
        assert!(r.pass);
    }

    #[test]
    fn midpoint_compound_explicit_bound() {
        let f = TestFunction::trunc_power(0.3, 0).unwrap();
        let grid = geometric_grid(4, 512, 2.0);
        let r = run_compound_convergence(&Elementary::Midpoint.rule(), &f, &grid, None).unwrap();
        assert_eq!(r.family, "compound:midpoint");
        assert_relative_eq!(r.c_estimate.unwrap(), 1.0, max_relative = 1e-15);
        for s in &r.samples {
            assert!(s.error <= 1.0 / s.n as f64);
        }
        assert_eq!(r.expected_slope, Some(-1.0));
        assert!(r.pass);

        let f1 = TestFunction::trunc_power(0.3, 1).unwrap();
        let r = run_compound_convergence(&Elementary::Midpoint.rule(), &f1, &grid, None).unwrap();
        assert_eq!(r.expected_slope, Some(-2.0));
        assert!(r.pass);
    }

    #[test]
    fn precondition_on_order() {
        let f = TestFunction::trunc_power(0.3, 3).unwrap();
        let err = run_compound_convergence(&Elementary::Trapezoid.rule(), &f, &[4, 8, 16, 32], None);
        assert!(matches!(err, Err(QuadError::PreconditionViolation { .. })));
    }

    #[test]
    fn csv_layout() {
        let f = TestFunction::trunc_power(0.3, 1).unwrap();
        let r = run_convergence(&RuleFamily::Gauss, &f, &WeightSpec::legendre(), &[2, 4, 8, 16], None)
            .unwrap();
        let csv = reports_to_csv(&[r]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("gauss,truncpower:0.3:1,legendre,2,"));
        assert_eq!(lines[1].split(',').count(), 7);
    }
}
