//! Small dense linear algebra for g x g problems (g is tiny).
//!
//! Matrices are row-major `Vec<f64>` with an explicit dimension.

use num_complex::Complex64;

/// Upper-triangular Cholesky factor `R` with `A = R^T R`, or `None` when `A`
/// is not (numerically) positive definite.
pub(crate) fn cholesky_upper(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut r = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= r[k * n + j] * r[k * n + j];
        }
        if !(d > 0.0) {
            return None;
        }
        let rjj = d.sqrt();
        r[j * n + j] = rjj;
        for i in (j + 1)..n {
            let mut s = a[j * n + i];
            for k in 0..j {
                s -= r[k * n + j] * r[k * n + i];
            }
            r[j * n + i] = s / rjj;
        }
    }
    Some(r)
}

/// Inverse of a symmetric positive definite matrix from its upper Cholesky factor.
pub(crate) fn spd_inverse(r: &[f64], n: usize) -> Vec<f64> {
    // Invert R (upper triangular), then A^{-1} = R^{-1} R^{-T}.
    let mut rinv = vec![0.0; n * n];
    for j in 0..n {
        rinv[j * n + j] = 1.0 / r[j * n + j];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in (i + 1)..=j {
                s += r[i * n + k] * rinv[k * n + j];
            }
            rinv[i * n + j] = -s / r[i * n + i];
        }
    }
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in i.max(j)..n {
                s += rinv[i * n + k] * rinv[j * n + k];
            }
            inv[i * n + j] = s;
        }
    }
    inv
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps, ascending.
pub(crate) fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max);
        if off.sqrt() <= 1e-300 || off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Singular values of a real `rows x cols` matrix by one-sided (Hestenes)
/// Jacobi, descending.
pub(crate) fn singular_values_real(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    // Columns stored contiguously.
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let x = u[p][k];
                    let y = u[q][k];
                    u[p][k] = c * x - s * y;
                    u[q][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = u
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Singular values of a complex `n x n` matrix, descending.
///
/// Uses the real embedding `[[Re, -Im], [Im, Re]]`, whose singular values are
/// those of the complex matrix, each repeated twice.
pub(crate) fn singular_values_complex(m: &[Complex64], n: usize) -> Vec<f64> {
    let n2 = 2 * n;
    let mut real = vec![0.0; n2 * n2];
    for i in 0..n {
        for j in 0..n {
            let z = m[i * n + j];
            real[i * n2 + j] = z.re;
            real[i * n2 + n + j] = -z.im;
            real[(n + i) * n2 + j] = z.im;
            real[(n + i) * n2 + n + j] = z.re;
        }
    }
    let doubled = singular_values_real(&real, n2, n2);
    doubled.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_and_inverse() {
        let a = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let r = cholesky_upper(&a, 3).unwrap();
        let inv = spd_inverse(&r, 3);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-14);
            }
        }
        assert!(cholesky_upper(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let ev = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let ev = symmetric_eigenvalues(&[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, -2.0], 3);
        assert_eq!(ev, vec![-2.0, 1.0, 5.0]);
    }

    #[test]
    fn complex_singular_values() {
        // diag(3i, 1+0i) has singular values 3 and 1
        let m = [
            Complex64::new(0.0, 3.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let sv = singular_values_complex(&m, 2);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
    }
}
