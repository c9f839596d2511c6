use crate::error::{Error, Result};

/// Sweep cap for [`symmetric_eigenvalues`].
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a dense symmetric `n × n` matrix (row-major), ascending.
///
/// Cyclic Jacobi: each sweep rotates away every off-diagonal entry in row
/// order. An entry is left alone once `|a_pq| ≤ ε·√|a_pp·a_qq|`; the iteration
/// stops after a sweep that performs no rotation.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::InvalidArgument(format!("expected {} entries, got {}", n * n, matrix.len())));
    }
    let mut a = matrix.to_vec();
    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if apq == 0.0 || apq.abs() <= f64::EPSILON * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        if !rotated {
            let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            ev.sort_by(f64::total_cmp);
            return Ok(ev);
        }
        if sweep + 1 == MAX_SWEEPS {
            break;
        }
    }
    Err(Error::Spectral { sweeps: MAX_SWEEPS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let ev = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn second_difference_matrix() {
        // tridiag(-1, 2, -1): λ_j = 2 − 2cos(jπ/(n+1))
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let ev = symmetric_eigenvalues(&a, n).unwrap();
        for (j, l) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((l - exact).abs() < 1e-13, "{j}: {l} vs {exact}");
        }
    }

    #[test]
    fn diagonal_and_indefinite() {
        let ev = symmetric_eigenvalues(&[3.0, 0.0, 0.0, -1.0], 2).unwrap();
        assert_eq!(ev, vec![-1.0, 3.0]);
        let ev = symmetric_eigenvalues(&[0.0, 1.0, 1.0, 0.0], 2).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shape() {
        assert!(symmetric_eigenvalues(&[1.0, 2.0, 3.0], 2).is_err());
    }
}
