use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{gauss_rule, RecurrenceTable};
use crate::error::{Error, Result};
use crate::math::dot2;

/// Connection coefficients of the derivative:
/// `p_k' = sum_{j<k} D[j,k] p_j`, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix {
    size: usize,
    /// Column-major, `data[j + k * size]`.
    data: Vec<f64>,
}

impl DiffMatrix {
    /// Number of basis functions covered (`N + 1`).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[j + k * self.size]
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.data[k * self.size..(k + 1) * self.size]
    }

    pub(crate) fn column_major(&self) -> &[f64] {
        &self.data
    }

    /// Coefficients of the derivative of `sum_k c_k p_k`.
    pub fn apply(&self, coeffs: &[f64]) -> Vec<f64> {
        assert!(coeffs.len() <= self.size);
        let mut out = vec![0.0; coeffs.len()];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().take(k) {
                *o += self.get(j, k) * c;
            }
        }
        out
    }
}

/// `D[j,k] = <p_k', p_j>` by the `(N+1)`-point Gauss rule, which is exact
/// because `p_k' p_j` has degree at most `2N - 1`.
pub fn differentiation_matrix(table: &RecurrenceTable, n: usize) -> Result<DiffMatrix> {
    let size = n + 1;
    if size > table.len() {
        return Err(Error::TableTooShort { needed: size, available: table.len() });
    }
    let rule = gauss_rule(table, size)?;
    // Rows: node i; columns: sqrt(w_i) p_k(x_i) and sqrt(w_i) p_k'(x_i).
    let mut vals = vec![vec![0.0; rule.len()]; size];
    let mut ders = vec![vec![0.0; rule.len()]; size];
    for (i, (&x, &lw)) in rule.nodes().iter().zip(rule.log_weights()).enumerate() {
        let wv = table.weighted_values(n, x, 0.5 * lw);
        for k in 0..size {
            vals[k][i] = wv.values[k];
            ders[k][i] = wv.derivatives[k];
        }
    }
    let mut data = vec![0.0; size * size];
    for k in 1..size {
        for j in 0..k {
            data[j + k * size] = dot2(&vals[j], &ders[k]);
        }
    }
    Ok(DiffMatrix { size, data })
}
