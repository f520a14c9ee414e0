//! Symmetric tridiagonal eigensolver specialised for Golub-Welsch.
//!
//! Only the eigenvalues and the first component of each normalised
//! eigenvector are produced, which is all a Gauss-type rule needs and keeps
//! the cost at O(n^2).

use crate::error::{QuadError, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) and squared first eigenvector components.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub first_components_sq: Vec<f64>,
}

/// Implicit QL with Wilkinson shifts on the matrix with `diag` on the
/// diagonal and `offdiag[i]` at positions (i, i+1) and (i+1, i).
pub fn symmetric_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1), "offdiag must have n - 1 entries");
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(QuadError::EigenFailure(n));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        first_components_sq: order.iter().map(|&i| z[i] * z[i]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3 with vectors (1, -1)/sqrt2, (1, 1)/sqrt2.
        let eig = symmetric_tridiagonal(&[2.0, 2.0], &[1.0]).unwrap();
        assert_relative_eq!(eig.values[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(eig.values[1], 3.0, epsilon = 1e-15);
        assert_relative_eq!(eig.first_components_sq[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(eig.first_components_sq[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn matches_dense_solver() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + (i as f64 * 0.11).cos().abs()).collect();
        let eig = symmetric_tridiagonal(&diag, &off).unwrap();

        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = diag[i];
            if i + 1 < n {
                dense[(i, i + 1)] = off[i];
                dense[(i + 1, i)] = off[i];
            }
        }
        let reference = dense.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = reference
            .eigenvalues
            .iter()
            .zip(reference.eigenvectors.row(0).iter())
            .map(|(&v, &z)| (v, z * z))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (k, (v, z2)) in pairs.into_iter().enumerate() {
            assert_relative_eq!(eig.values[k], v, epsilon = 1e-12);
            assert_relative_eq!(eig.first_components_sq[k], z2, epsilon = 1e-12);
        }
    }

    #[test]
    fn first_components_sum_to_one() {
        let n = 200;
        let diag = vec![0.0; n];
        let off: Vec<f64> = (1..n).map(|k| 0.5 / (1.0 - 0.25 / (k * k) as f64).sqrt() * 0.5).collect();
        let eig = symmetric_tridiagonal(&diag, &off).unwrap();
        let total: f64 = eig.first_components_sq.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-13);
    }
}
