use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::RecurrenceTable;
use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigen;

/// Gauss rule for `w^2 dx`: exact for polynomials up to `degree_exact`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    degree_exact: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// `ln` of each weight; finite even where the weight underflows.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }
    pub fn degree_exact(&self) -> usize {
        self.degree_exact
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`, accumulated in mirrored pairs `(x_i, -x_i)` so
    /// odd integrands cancel exactly.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.nodes.len();
        let mut sum = 0.0;
        for i in 0..n / 2 {
            let j = n - 1 - i;
            sum += self.weights[i] * (f(self.nodes[i]) + f(self.nodes[j]));
        }
        if n % 2 == 1 {
            sum += self.weights[n / 2] * f(self.nodes[n / 2]);
        }
        sum
    }
}

fn jacobi_eigen(table: &RecurrenceTable, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", reason: "rule needs at least one node" });
    }
    if n > table.len().max(1) {
        return Err(Error::TableTooShort { needed: n, available: table.len() });
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = table.beta()[1..n].iter().map(|b| b.sqrt()).collect();
    tridiagonal_eigen(&diag, &off).ok_or(Error::EigenSolver { n })
}

/// Golub-Welsch: nodes are the eigenvalues of the `n x n` Jacobi matrix.
/// Weights are the Christoffel numbers `1 / sum_{k<n} p_k(x_i)^2`, which
/// keeps full relative accuracy on the tiny outer weights.
pub fn gauss_rule(table: &RecurrenceTable, n: usize) -> Result<QuadratureRule> {
    let (mut nodes, _) = jacobi_eigen(table, n)?;
    // The measure is even: enforce exact symmetry of the node set.
    for i in 0..n / 2 {
        let v = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -v;
        nodes[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let log_weights: Vec<f64> = nodes.iter().map(|&x| -table.ln_christoffel_sum(n, x)).collect();
    let weights = log_weights.iter().map(|l| l.exp()).collect();
    Ok(QuadratureRule { nodes, weights, log_weights, degree_exact: 2 * n - 1 })
}

/// The textbook Golub-Welsch weights `beta_0 * v_{0,i}^2` from the first
/// eigenvector components (absolute accuracy only).
pub fn eigenvector_weights(table: &RecurrenceTable, n: usize) -> Result<Vec<f64>> {
    let (_, first) = jacobi_eigen(table, n)?;
    Ok(first.iter().map(|z| table.beta()[0] * z * z).collect())
}
