//! Small dense linear algebra kernels.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub-diagonal `off` (`off.len() == diag.len() - 1`), together with the
/// first component of each normalized eigenvector. Implicit QL with
/// Wilkinson shifts; results sorted ascending.
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
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
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Some((order.iter().map(|&i| d[i]).collect(), order.iter().map(|&i| z[i]).collect()))
}

/// Least squares solution of `A x ~ b` for a tall `rows x cols` matrix given
/// row-major, by Householder QR. Returns `None` when a column is (numerically)
/// dependent on the previous ones.
pub(crate) fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Option<(Vec<f64>, f64)> {
    if rows < cols {
        return None;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let col_norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j].powi(2)).sum::<f64>().sqrt())
        .collect();
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i * cols + k].powi(2)).sum::<f64>().sqrt();
        if norm <= 1e-10 * col_norms[k].max(f64::MIN_POSITIVE) {
            return None;
        }
        let alpha = -norm.copysign(a[k * cols + k]);
        let mut v: Vec<f64> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for j in k..cols {
            let dot: f64 = (k..rows).map(|i| v[i - k] * a[i * cols + j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..rows {
                a[i * cols + j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..rows {
            b[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| a[k * cols + j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k * cols + k];
    }
    let residual = b[cols..].iter().map(|r| r * r).sum::<f64>().sqrt();
    Some((x, residual))
}

/// Largest singular value of a square column-major `n x n` matrix and its
/// right singular vector, by power iteration on `A^T A`.
pub(crate) fn top_singular(a: &[f64], n: usize) -> (f64, Vec<f64>) {
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for (col, &xc) in x.iter().enumerate() {
            for (row, yr) in y.iter_mut().enumerate() {
                *yr += a[col * n + row] * xc;
            }
        }
        y
    };
    let apply_t = |y: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|col| (0..n).map(|row| a[col * n + row] * y[row]).sum())
            .collect()
    };
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64)).collect();
    let mut sigma2 = 0.0;
    for _ in 0..2000 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (0.0, x);
        }
        x.iter_mut().for_each(|v| *v /= norm);
        let y = apply_t(&apply(&x));
        let next: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        x = y;
        if (next - sigma2).abs() <= 1e-15 * next {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    (sigma2.max(0.0).sqrt(), x)
}
