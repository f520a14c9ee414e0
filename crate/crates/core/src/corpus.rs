//! Integrands with known smoothness class V_s, variation and integral.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{QuadError, Result};
use crate::orthopoly::{truncated_moment, WeightSpec};
use crate::reference;

/// Singularity location used by the convergence studies.
pub const DEFAULT_SINGULARITY: f64 = 0.3;

/// Where an exact integral came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralSource {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactIntegral {
    pub value: f64,
    pub source: IntegralSource,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    /// (x - c)_+^s / s!
    TruncPower { c: f64, s: u32 },
    /// |x - c|^k, k odd
    AbsPower { c: f64, k: u32 },
    Exp,
    /// Caller-supplied polynomial-like integrand with a Legendre integral.
    Custom {
        f: fn(f64) -> f64,
        legendre_integral: f64,
    },
}

// Custom integrands compare by their integral; TestFunction also compares names.
impl PartialEq for Kind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Kind::TruncPower { c, s }, Kind::TruncPower { c: c2, s: s2 }) => c == c2 && s == s2,
            (Kind::AbsPower { c, k }, Kind::AbsPower { c: c2, k: k2 }) => c == c2 && k == k2,
            (Kind::Exp, Kind::Exp) => true,
            (
                Kind::Custom { legendre_integral: a, .. },
                Kind::Custom { legendre_integral: b, .. },
            ) => a == b,
            _ => false,
        }
    }
}

/// A member of V_s with exactly known s, Var f^(s) and I_w[f].
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    name: String,
    kind: Kind,
    s: Option<u32>,
    variation: f64,
    singularity: Option<f64>,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn check_location(c: f64) -> Result<()> {
    if c > -1.0 && c < 1.0 {
        Ok(())
    } else {
        Err(QuadError::Domain(c))
    }
}

impl TestFunction {
    /// (x - c)_+^s / s!; f^(s) is a unit step at c, so Var f^(s) = 1.
    /// For s = 0 the value at x = c is 0.
    pub fn trunc_power(c: f64, s: u32) -> Result<Self> {
        check_location(c)?;
        Ok(Self {
            name: format!("truncpower:{c}:{s}"),
            kind: Kind::TruncPower { c, s },
            s: Some(s),
            variation: 1.0,
            singularity: Some(c),
        })
    }

    /// |x - c|^k for odd k; f^(k) = k! sign(x - c), so Var f^(k) = 2 k!.
    pub fn abs_power(c: f64, k: u32) -> Result<Self> {
        check_location(c)?;
        if k % 2 == 0 {
            return Err(QuadError::Format(format!(
                "abs_power needs an odd order, got {k} (even powers are polynomials)"
            )));
        }
        Ok(Self {
            name: format!("abspower:{c}:{k}"),
            kind: Kind::AbsPower { c, k },
            s: Some(k),
            variation: 2.0 * factorial(k),
            singularity: Some(c),
        })
    }

    /// exp(x): in every V_s, with Var f^(s) = e - 1/e for all s.
    pub fn smooth_control() -> Self {
        Self {
            name: "exp".into(),
            kind: Kind::Exp,
            s: None,
            variation: E - 1.0 / E,
            singularity: None,
        }
    }

    /// An ad-hoc member of V_s, integrable only against the Legendre weight.
    pub fn custom(
        name: &str,
        f: fn(f64) -> f64,
        s: u32,
        variation: f64,
        legendre_integral: f64,
    ) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Custom {
                f,
                legendre_integral,
            },
            s: Some(s),
            variation,
            singularity: None,
        }
    }

    /// The corpus used by the bound-chain sweeps.
    pub fn standard_corpus() -> Vec<TestFunction> {
        let c = DEFAULT_SINGULARITY;
        let mut out: Vec<TestFunction> = (0..4)
            .map(|s| Self::trunc_power(c, s).expect("valid location"))
            .collect();
        out.push(Self::abs_power(c, 1).expect("odd"));
        out.push(Self::abs_power(c, 3).expect("odd"));
        out.push(Self::smooth_control());
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Largest s with f in V_s; `None` for the smooth control.
    pub fn s(&self) -> Option<u32> {
        self.s
    }

    /// Var f^(s). For the smooth control this holds for every order.
    pub fn variation(&self) -> f64 {
        self.variation
    }

    pub fn singularity(&self) -> Option<f64> {
        self.singularity
    }

    /// Kernel order at which a rule of the given exactness is checked.
    pub fn bound_order(&self, exactness: usize) -> Result<u32> {
        match self.s {
            Some(s) if s as usize <= exactness => Ok(s),
            Some(s) => Err(QuadError::PreconditionViolation { s, exactness }),
            None => Ok(exactness.min(3) as u32),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            Kind::TruncPower { c, s } => {
                if x > c {
                    (x - c).powi(s as i32) / factorial(s)
                } else {
                    0.0
                }
            }
            Kind::AbsPower { c, k } => (x - c).abs().powi(k as i32),
            Kind::Exp => x.exp(),
            Kind::Custom { f, .. } => f(x),
        }
    }

    /// I_w[f]: closed form for Legendre, the reference integrator otherwise.
    pub fn exact_integral(&self, weight: &WeightSpec) -> Result<ExactIntegral> {
        let closed = |value| ExactIntegral {
            value,
            source: IntegralSource::ClosedForm,
        };
        let oracle = |value| ExactIntegral {
            value,
            source: IntegralSource::Oracle,
        };
        if weight.is_legendre() {
            return Ok(closed(match self.kind {
                Kind::TruncPower { c, s } => (1.0 - c).powi(s as i32 + 1) / factorial(s + 1),
                Kind::AbsPower { c, k } => {
                    let k1 = k as i32 + 1;
                    ((1.0 - c).powi(k1) + (1.0 + c).powi(k1)) / k1 as f64
                }
                Kind::Exp => E - 1.0 / E,
                Kind::Custom {
                    legendre_integral, ..
                } => legendre_integral,
            }));
        }
        Ok(oracle(match self.kind {
            Kind::TruncPower { c, s } => truncated_moment(weight, s, c)? / factorial(s),
            // the weight is even, so the left half mirrors to a right tail at -c
            Kind::AbsPower { c, k } => {
                truncated_moment(weight, k, c)? + truncated_moment(weight, k, -c)?
            }
            Kind::Exp => reference::weighted_integral(weight, -1.0, 1.0, f64::exp),
            Kind::Custom { .. } => {
                return Err(QuadError::UnsupportedWeight(format!(
                    "custom integrand '{}' only has a Legendre integral",
                    self.name
                )))
            }
        }))
    }

    /// Documentation record for the corpus manifest.
    pub fn manifest_entry(&self) -> ManifestEntry {
        let integral = match self.kind {
            Kind::TruncPower { c, s } => format!("(1 - {c})^{} / {}!", s + 1, s + 1),
            Kind::AbsPower { c, k } => format!("((1 - {c})^{k1} + (1 + {c})^{k1}) / {k1}", k1 = k + 1),
            Kind::Exp => "e - 1/e".into(),
            Kind::Custom {
                legendre_integral, ..
            } => format!("{legendre_integral}"),
        };
        ManifestEntry {
            name: self.name.clone(),
            s: self.s,
            variation: self.variation,
            singularity: self.singularity,
            legendre_integral: integral,
            legendre_value: self
                .exact_integral(&WeightSpec::legendre())
                .map(|e| e.value)
                .unwrap_or(f64::NAN),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses `truncpower:c:s`, `abspower:c:k` and `exp`.
impl FromStr for TestFunction {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || QuadError::Format(format!("bad function descriptor '{s}'"));
        match parts.as_slice() {
            ["exp"] => Ok(Self::smooth_control()),
            [kind, c, order] => {
                let c: f64 = c.parse().map_err(|_| bad())?;
                let order: u32 = order.parse().map_err(|_| bad())?;
                match *kind {
                    "truncpower" => Self::trunc_power(c, order),
                    "abspower" => Self::abs_power(c, order),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub s: Option<u32>,
    pub variation: f64,
    pub singularity: Option<f64>,
    pub legendre_integral: String,
    pub legendre_value: f64,
}

/// JSON manifest of a list of test functions.
pub fn manifest(functions: &[TestFunction]) -> serde_json::Value {
    serde_json::to_value(functions.iter().map(TestFunction::manifest_entry).collect::<Vec<_>>())
        .expect("manifest entries serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trunc_power_examples() {
        let w = WeightSpec::legendre();
        let step = TestFunction::trunc_power(0.0, 0).unwrap();
        assert_eq!(step.variation(), 1.0);
        assert_eq!(step.exact_integral(&w).unwrap().value, 1.0);
        assert_eq!(step.eval(0.0), 0.0);
        assert_eq!(step.eval(1e-300), 1.0);

        let f = TestFunction::trunc_power(0.3, 2).unwrap();
        assert_relative_eq!(
            f.exact_integral(&w).unwrap().value,
            0.7f64.powi(3) / 6.0,
            max_relative = 1e-15
        );
        let w1 = WeightSpec::ultraspherical(1.0).unwrap();
        let e = f.exact_integral(&w1).unwrap();
        assert_eq!(e.source, IntegralSource::Oracle);
        // cross-check against an independent composite rule in x
        let brute = reference::integrate(
            |x: f64| (1.0 - x * x).sqrt() * (x - 0.3).powi(2) / 2.0,
            0.3,
            1.0,
            false,
            true,
        );
        assert_relative_eq!(e.value, brute, max_relative = 1e-13);
    }

    #[test]
    fn trunc_power_shape() {
        let f = TestFunction::trunc_power(0.3, 3).unwrap();
        for i in 0..50 {
            let x = -1.0 + 1.3 * i as f64 / 50.0;
            assert_eq!(f.eval(x), 0.0);
        }
        let mut prev = 0.0;
        for i in 1..50 {
            let x = 0.3 + 0.7 * i as f64 / 50.0;
            let v = f.eval(x);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn abs_power_examples() {
        let w = WeightSpec::legendre();
        let f = TestFunction::abs_power(0.0, 3).unwrap();
        assert_eq!(f.variation(), 12.0);
        assert_relative_eq!(f.exact_integral(&w).unwrap().value, 0.5, max_relative = 1e-15);
        assert_eq!(f.eval(-0.5), 0.125);
        let g = TestFunction::abs_power(0.25, 1).unwrap();
        assert_relative_eq!(g.exact_integral(&w).unwrap().value, 1.0625, max_relative = 1e-15);
        assert!(TestFunction::abs_power(0.0, 2).is_err());
        let f = TestFunction::abs_power(0.25, 3).unwrap();
        for i in 0..20 {
            let h = i as f64 / 32.0;
            assert_eq!(f.eval(0.25 + h), f.eval(0.25 - h));
        }
    }

    #[test]
    fn smooth_control_examples() {
        let f = TestFunction::smooth_control();
        assert_eq!(f.eval(0.0), 1.0);
        assert_relative_eq!(
            f.exact_integral(&WeightSpec::legendre()).unwrap().value,
            2.3504023872876028,
            max_relative = 1e-16
        );
        assert_eq!(f.s(), None);
        assert_eq!(f.bound_order(9).unwrap(), 3);
        assert_eq!(f.bound_order(1).unwrap(), 1);
    }

    #[test]
    fn rejects_bad_locations() {
        assert!(TestFunction::trunc_power(1.0, 1).is_err());
        assert!(TestFunction::abs_power(-1.5, 1).is_err());
    }

    #[test]
    fn closed_forms_match_reference_integrator() {
        let w = WeightSpec::legendre();
        for f in TestFunction::standard_corpus() {
            let closed = f.exact_integral(&w).unwrap().value;
            let q = match f.singularity() {
                Some(c) => {
                    reference::weighted_integral(&w, -1.0, c, |x| f.eval(x))
                        + reference::weighted_integral(&w, c, 1.0, |x| f.eval(x))
                }
                None => reference::weighted_integral(&w, -1.0, 1.0, |x| f.eval(x)),
            };
            assert_relative_eq!(closed, q, max_relative = 1e-13);
        }
    }

    #[test]
    fn descriptors_round_trip() {
        for f in TestFunction::standard_corpus() {
            let back: TestFunction = f.name().parse().unwrap();
            assert_eq!(back, f);
        }
        assert!("truncpower:0.3".parse::<TestFunction>().is_err());
        assert!("sin".parse::<TestFunction>().is_err());
        assert!("abspower:0.3:2".parse::<TestFunction>().is_err());
    }

    #[test]
    fn manifest_lists_everything() {
        let m = manifest(&TestFunction::standard_corpus());
        assert_eq!(m.as_array().unwrap().len(), 7);
        assert_eq!(m[0]["name"], "truncpower:0.3:0");
        assert_eq!(m[6]["s"], serde_json::Value::Null);
    }
}
