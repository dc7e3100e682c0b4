use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::oracle::FunctionOracle;
use crate::error::{Error, Result};
use crate::orthopoly::Basis;
use crate::spectral::{CoeffTensor, MultiIndex};

/// Extra Gauss nodes beyond what a degree-`M` surrogate needs.
const GUARD_NODES: usize = 8;

/// Relative stability of the coefficients between node doublings.
pub const COEFF_TOL: f64 = 1e-10;

/// `f_hat(k) = int f(x) p_k(x) w(x)^2 dx` for all `k <= degree_box`.
///
/// Uses an `n`-point tensor Gauss rule for `w^2`, starting from
/// `n = M + 1 + guard` (exact when `f` is a polynomial of degree at most
/// `M`), and doubles `n` until the coefficients move by less than
/// `1e-10` relative to the largest one.
pub fn coefficients_from_oracle(oracle: &FunctionOracle, basis: &Basis, degree_box: &MultiIndex) -> Result<CoeffTensor> {
    let dim = oracle.dim();
    if degree_box.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: degree_box.dim() });
    }
    let top = degree_box.linf() as usize;
    let cap = basis.max_degree();
    let mut n = top + 1 + GUARD_NODES;
    if n > cap {
        return Err(Error::TableTooShort { needed: n, available: cap });
    }
    let mut prev = quadrature_coefficients(oracle, basis, degree_box, n)?;
    let mut change = f64::INFINITY;
    while 2 * n <= cap {
        n *= 2;
        let cur = quadrature_coefficients(oracle, basis, degree_box, n)?;
        let scale = cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        change = cur.iter().zip(&prev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if change <= COEFF_TOL * scale {
            return Ok(to_tensor(dim, degree_box, &cur));
        }
        prev = cur;
    }
    Err(Error::NonConvergence { what: "oracle coefficients", detail: change })
}

/// Dense coefficients on the box (row-major, last axis fastest) from one
/// `n`-point tensor rule.
fn quadrature_coefficients(oracle: &FunctionOracle, basis: &Basis, degree_box: &MultiIndex, n: usize) -> Result<Vec<f64>> {
    let dim = oracle.dim();
    let rule = basis.gauss_rule(n)?;
    let top = degree_box.linf() as usize;
    // u[i][k] = sqrt(W_i) p_k(x_i): orthonormal eigenvector entries, bounded by 1
    let u: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .zip(rule.log_weights())
        .map(|(&x, &lw)| basis.table().weighted_values(top, x, 0.5 * lw).values)
        .collect();
    let half: Vec<f64> = rule.log_weights().iter().map(|lw| (0.5 * lw).exp()).collect();

    // g(i) = f(x_i) prod_j sqrt(W_{i_j}) on the full grid
    let total = n.pow(dim as u32);
    let mut g = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    let mut pt = vec![0.0; dim];
    for _ in 0..total {
        let mut scale = 1.0;
        for j in 0..dim {
            pt[j] = rule.nodes()[idx[j]];
            scale *= half[idx[j]];
        }
        g.push(if scale == 0.0 { 0.0 } else { oracle.eval(&pt) * scale });
        for j in (0..dim).rev() {
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }

    // contract one axis at a time: node index -> degree index
    let mut shape: Vec<usize> = vec![n; dim];
    let mut data = g;
    for axis in 0..dim {
        let kmax = degree_box[axis] as usize + 1;
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let mut out = vec![0.0; outer * kmax * inner];
        for o in 0..outer {
            for (i, ui) in u.iter().enumerate() {
                let src = &data[(o * n + i) * inner..(o * n + i + 1) * inner];
                for (k, &uk) in ui.iter().take(kmax).enumerate() {
                    if uk == 0.0 {
                        continue;
                    }
                    let dst = &mut out[(o * kmax + k) * inner..(o * kmax + k + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += uk * s;
                    }
                }
            }
        }
        shape[axis] = kmax;
        data = out;
    }
    Ok(data)
}

fn to_tensor(dim: usize, degree_box: &MultiIndex, dense: &[f64]) -> CoeffTensor {
    let mut t = CoeffTensor::new(dim);
    let mut idx = vec![0u32; dim];
    for &v in dense {
        let _ = t.insert(MultiIndex::from(idx.as_slice()), v);
        for j in (0..dim).rev() {
            idx[j] += 1;
            if idx[j] <= degree_box[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    t
}

/// Largest deviation between quadrature coefficients and the oracle's
/// exact coefficients on the box spanned by the latter.
pub fn exact_coefficient_defect(oracle: &FunctionOracle, basis: &Basis) -> Result<Option<f64>> {
    let Some(exact) = oracle.exact_coeffs() else {
        return Ok(None);
    };
    let computed = coefficients_from_oracle(oracle, basis, &exact.degree_box())?;
    let mut worst = 0.0f64;
    for (k, &v) in &computed {
        worst = worst.max((v - exact.get(k)).abs());
    }
    for (k, &v) in exact {
        worst = worst.max((v - computed.get(k)).abs());
    }
    Ok(Some(worst))
}
