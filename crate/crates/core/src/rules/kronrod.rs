//! Gauss-Kronrod extensions by Laurie's mixed-moment recurrence.

use crate::error::{QuadError, Result};
use crate::orthopoly::{recurrence, WeightSpec};

use super::gauss::golub_welsch;
use super::{symmetrize, Family, QuadratureRule};

/// Ultraspherical parameters for which the extension is known to be real,
/// interlacing and positive: lambda in [0, 1] or lambda = 3.
pub fn kronrod_supported(lambda: f64) -> bool {
    (0.0..=1.0).contains(&lambda) || lambda == 3.0
}

/// The mixed moments shrink roughly like 4^-m; the recurrence is linear and
/// homogeneous in (s, t) and only ratios are used, so both rows are rescaled
/// together before they underflow.
fn rescale(s: &mut [f64], t: &mut [f64]) {
    let big = s.iter().chain(t.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    if big > 0.0 && !(1e-100..=1e100).contains(&big) {
        let f = 2f64.powi(-big.log2().round() as i32);
        s.iter_mut().chain(t.iter_mut()).for_each(|v| *v *= f);
    }
}

/// Recurrence coefficients of the (2n+1)-point Kronrod-Jacobi matrix from
/// those of the weight. `a0`, `b0` need at least floor(3n/2) + 1 and
/// ceil(3n/2) + 1 entries.
fn kronrod_recurrence(n: usize, a0: &[f64], b0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; 2 * n + 1];
    let mut b = vec![0.0; 2 * n + 1];
    a[..=3 * n / 2].copy_from_slice(&a0[..=3 * n / 2]);
    let upper_b = (3 * n).div_ceil(2);
    b[..=upper_b].copy_from_slice(&b0[..=upper_b]);

    let mut s = vec![0.0; n / 2 + 2];
    let mut t = vec![0.0; n / 2 + 2];
    t[1] = b[n + 1];

    for m in 0..n.saturating_sub(1) {
        let mut u = 0.0;
        for k in (0..=(m + 1) / 2).rev() {
            let l = m - k;
            u += (a[k + n + 1] - a[l]) * t[k + 1] + b[k + n + 1] * s[k] - b[l] * s[k + 1];
            s[k + 1] = u;
        }
        std::mem::swap(&mut s, &mut t);
        rescale(&mut s, &mut t);
    }

    for j in (0..=n / 2).rev() {
        s[j + 1] = s[j];
    }

    for m in n.saturating_sub(1)..(2 * n).saturating_sub(2) {
        let mut u = 0.0;
        let mut j = 0;
        for k in (m + 1 - n)..=(m - 1) / 2 {
            let l = m - k;
            j = n - 1 - l;
            u += -(a[k + n + 1] - a[l]) * t[j + 1] - b[k + n + 1] * s[j + 1] + b[l] * s[j + 2];
            s[j + 1] = u;
        }
        if m % 2 == 0 {
            let k = m / 2;
            a[k + n + 1] = a[k] + (s[j + 1] - b[k + n + 1] * s[j + 2]) / t[j + 2];
        } else {
            let k = (m + 1) / 2;
            b[k + n + 1] = s[j + 1] / s[j + 2];
        }
        std::mem::swap(&mut s, &mut t);
        rescale(&mut s, &mut t);
    }

    a[2 * n] = a[n - 1] - b[2 * n] * s[1] / t[1];
    (a, b)
}

/// (2n+1)-point Gauss-Kronrod rule extending the n-point Gauss rule.
pub fn kronrod_rule(weight: &WeightSpec, n: usize) -> Result<QuadratureRule> {
    let lambda = weight.lambda();
    if !kronrod_supported(lambda) {
        return Err(QuadError::UnsupportedLambda(lambda));
    }
    if n == 0 {
        return Err(QuadError::Size {
            what: "Gauss node count",
            got: 0,
            min: 1,
        });
    }
    let table = recurrence(weight, 2 * (3 * n).div_ceil(2) + 1)?;
    let (alpha, beta) = kronrod_recurrence(n, &table.alpha, &table.beta);

    if let Some(k) = (1..beta.len()).find(|&k| !(beta[k] > 0.0)) {
        // Within one row the mixed moments span about 4^(n/2); past n ~ 850
        // that leaves the f64 range and the recurrence breaks down.
        let why = if n > 800 {
            "the mixed moments left the floating-point range"
        } else {
            "the Kronrod nodes are not all real"
        };
        return Err(QuadError::ExtensionFailure(format!(
            "beta[{k}] = {} is not positive for n = {n}: {why}",
            beta[k]
        )));
    }
    let (mut nodes, mut weights) = golub_welsch(&alpha, &beta)?;
    if let Some(x) = nodes.iter().find(|x| x.abs() > 1.0 + 1e-14) {
        return Err(QuadError::ExtensionFailure(format!("node {x} outside [-1, 1]")));
    }
    symmetrize(&mut nodes, &mut weights);
    for x in nodes.iter_mut() {
        *x = x.clamp(-1.0, 1.0);
    }
    if let Some(a) = weights.iter().find(|&&a| a <= 0.0) {
        return Err(QuadError::ExtensionFailure(format!("non-positive weight {a}")));
    }
    QuadratureRule::new(*weight, nodes, weights, Family::Kronrod, 3 * n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::gauss_rule;
    use approx::assert_relative_eq;

    #[test]
    fn one_point_extension_is_three_point_gauss() {
        let k = kronrod_rule(&WeightSpec::legendre(), 1).unwrap();
        let g = gauss_rule(&WeightSpec::legendre(), 3).unwrap();
        for (a, b) in k.nodes().iter().zip(g.nodes()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-15);
        }
        assert_relative_eq!(k.weights()[0], 5.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(k.weights()[1], 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn g7k15_tabulated() {
        // QUADPACK's 15-point Kronrod abscissae and weights.
        let k = kronrod_rule(&WeightSpec::legendre(), 7).unwrap();
        let xk = [
            0.991455371120812639206854697526329,
            0.949107912342758524526189684047851,
            0.864864423359769072789712788640926,
            0.741531185599394439863864773280788,
            0.586087235467691130294144838258730,
            0.405845151377397166906606412076961,
            0.207784955007898467600689403773245,
            0.0,
        ];
        let wk = [
            0.022935322010529224963732008058970,
            0.063092092629978553290700663189204,
            0.104790010322250183839876322541518,
            0.140653259715525918745189590510238,
            0.169004726639267902826583426598550,
            0.190350578064785409913256402421014,
            0.204432940075298892414161999234649,
            0.209482141084727828012999174891714,
        ];
        for i in 0..8 {
            assert_relative_eq!(k.nodes()[14 - i], xk[i], epsilon = 1e-14);
            assert_relative_eq!(k.weights()[14 - i], wk[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn unsupported_lambda() {
        let w = WeightSpec::ultraspherical(2.0).unwrap();
        assert!(matches!(kronrod_rule(&w, 4), Err(QuadError::UnsupportedLambda(_))));
        assert!(kronrod_supported(0.0) && kronrod_supported(1.0) && kronrod_supported(3.0));
        assert!(!kronrod_supported(1.5));
    }

    #[test]
    fn lambda_three_small() {
        let w = WeightSpec::ultraspherical(3.0).unwrap();
        let k = kronrod_rule(&w, 2).unwrap();
        assert_eq!(k.len(), 5);
        assert!(k.weights().iter().all(|&a| a > 0.0));
    }
}
