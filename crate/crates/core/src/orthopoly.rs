//! Weight functions on [-1, 1], their moments and three-term recurrences.
//!
//! Every supported weight is a member of the ultraspherical family
//! w(x) = (1 - x^2)^(lambda - 1/2); Legendre (lambda = 1/2) and the two
//! Chebyshev weights (lambda = 0, 1) have their own constructors so that
//! their closed forms are used verbatim.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::reference;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    Legendre,
    Ultraspherical(f64),
    Chebyshev1,
    Chebyshev2,
}

/// A weight function on [-1, 1] together with its mass and Freud majorant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRecord", into = "WeightRecord")]
pub struct WeightSpec {
    kind: WeightKind,
    mass: f64,
    freud_m: Option<f64>,
}

impl WeightSpec {
    pub fn legendre() -> Self {
        Self::from_kind(WeightKind::Legendre)
    }

    pub fn chebyshev1() -> Self {
        Self::from_kind(WeightKind::Chebyshev1)
    }

    pub fn chebyshev2() -> Self {
        Self::from_kind(WeightKind::Chebyshev2)
    }

    /// w(x) = (1 - x^2)^(lambda - 1/2), lambda >= 0.
    pub fn ultraspherical(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(QuadError::UnsupportedWeight(format!(
                "ultraspherical lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Ultraspherical(lambda)))
    }

    fn from_kind(kind: WeightKind) -> Self {
        let mut spec = Self {
            kind,
            mass: 0.0,
            // max of w(x) sqrt(1 - x^2) = (1 - x^2)^lambda is 1, at x = 0.
            freud_m: Some(1.0),
        };
        spec.mass = ultraspherical_mass(spec.lambda());
        spec
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        match self.kind {
            WeightKind::Legendre => 0.5,
            WeightKind::Chebyshev1 => 0.0,
            WeightKind::Chebyshev2 => 1.0,
            WeightKind::Ultraspherical(l) => l,
        }
    }

    /// I_w[1].
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Smallest M with w(x) <= M (1 - x^2)^(-1/2) on (-1, 1).
    pub fn freud_m(&self) -> Option<f64> {
        self.freud_m
    }

    pub fn is_legendre(&self) -> bool {
        self.lambda() == 0.5
    }

    pub fn eval(&self, x: f64) -> f64 {
        let exponent = self.lambda() - 0.5;
        if exponent == 0.0 {
            1.0
        } else {
            (1.0 - x * x).powf(exponent)
        }
    }

    /// Short identifier used in CLI flags and report files.
    pub fn label(&self) -> String {
        match self.kind {
            WeightKind::Legendre => "legendre".into(),
            WeightKind::Chebyshev1 => "chebyshev1".into(),
            WeightKind::Chebyshev2 => "chebyshev2".into(),
            WeightKind::Ultraspherical(l) => format!("ultraspherical:{l}"),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for WeightSpec {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "legendre" => Ok(Self::legendre()),
            "chebyshev1" => Ok(Self::chebyshev1()),
            "chebyshev2" => Ok(Self::chebyshev2()),
            other => {
                let lambda = other
                    .strip_prefix("ultraspherical:")
                    .and_then(|l| l.parse::<f64>().ok())
                    .ok_or_else(|| QuadError::UnsupportedWeight(other.to_string()))?;
                Self::ultraspherical(lambda)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WeightRecord {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default)]
    mass: Option<f64>,
    #[serde(default, rename = "freud_M")]
    freud_m: Option<f64>,
}

impl From<WeightSpec> for WeightRecord {
    fn from(w: WeightSpec) -> Self {
        let (kind, lambda) = match w.kind {
            WeightKind::Legendre => ("legendre", None),
            WeightKind::Chebyshev1 => ("chebyshev1", None),
            WeightKind::Chebyshev2 => ("chebyshev2", None),
            WeightKind::Ultraspherical(l) => ("ultraspherical", Some(l)),
        };
        Self {
            kind: kind.into(),
            lambda,
            mass: Some(w.mass),
            freud_m: w.freud_m,
        }
    }
}

impl TryFrom<WeightRecord> for WeightSpec {
    type Error = QuadError;

    fn try_from(r: WeightRecord) -> Result<Self> {
        match (r.kind.as_str(), r.lambda) {
            ("legendre", _) => Ok(Self::legendre()),
            ("chebyshev1", _) => Ok(Self::chebyshev1()),
            ("chebyshev2", _) => Ok(Self::chebyshev2()),
            ("ultraspherical", Some(l)) => Self::ultraspherical(l),
            (kind, _) => Err(QuadError::UnsupportedWeight(kind.to_string())),
        }
    }
}

/// sqrt(pi) Gamma(lambda + 1/2) / Gamma(lambda + 1), stepped down to
/// lambda in [0, 1) so that integer and half-integer lambda stay exact up to
/// rounding of the rational factors.
fn ultraspherical_mass(lambda: f64) -> f64 {
    let base = lambda.fract();
    let mut mass = if base == 0.0 {
        PI
    } else if base == 0.5 {
        2.0
    } else {
        use statrs::function::gamma::ln_gamma;
        (0.5 * PI.ln() + ln_gamma(base + 0.5) - ln_gamma(base + 1.0)).exp()
    };
    let mut l = base;
    while l + 0.5 < lambda {
        mass *= (l + 0.5) / (l + 1.0);
        l += 1.0;
    }
    mass
}

/// Monic recurrence coefficients p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl RecurrenceTable {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// First `n` recurrence coefficients of `weight` in closed form.
pub fn recurrence(weight: &WeightSpec, n: usize) -> Result<RecurrenceTable> {
    if n == 0 {
        return Err(QuadError::Size {
            what: "recurrence length",
            got: 0,
            min: 1,
        });
    }
    let lambda = weight.lambda();
    let beta = (0..n)
        .map(|k| match k {
            0 => weight.mass(),
            1 => 1.0 / (2.0 * (1.0 + lambda)),
            _ => {
                let k = k as f64;
                k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0))
            }
        })
        .collect();
    Ok(RecurrenceTable {
        alpha: vec![0.0; n],
        beta,
    })
}

/// I_w[x^k].
pub fn moment(weight: &WeightSpec, k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let lambda = weight.lambda();
    (1..=k / 2).fold(weight.mass(), |mu, m| {
        let m = m as f64;
        mu * (m - 0.5) / (m + lambda)
    })
}

/// I_w[T_k] for k = 0..count, T_k the Chebyshev polynomials of the first kind.
pub fn chebyshev_moments(weight: &WeightSpec, count: usize) -> Vec<f64> {
    let lambda = weight.lambda();
    let mut out = Vec::with_capacity(count);
    let mut even = weight.mass();
    for k in 0..count {
        if k % 2 == 1 {
            out.push(0.0);
            continue;
        }
        if k > 0 {
            let m = (k / 2) as f64;
            even *= (m - 1.0 - lambda) / (m + lambda);
        }
        out.push(even);
    }
    out
}

/// Integral of w(x) (x - t)^s over [t, 1].
pub fn truncated_moment(weight: &WeightSpec, s: u32, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(QuadError::Domain(t));
    }
    if t == 1.0 {
        return Ok(0.0);
    }
    if weight.is_legendre() {
        let s1 = s as i32 + 1;
        return Ok((1.0 - t).powi(s1) / s1 as f64);
    }
    Ok(reference::truncated_power_integral(weight, s, t))
}
