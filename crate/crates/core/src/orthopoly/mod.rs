//! Orthonormal polynomials `p_k` for the univariate measure `w(x)^2 dx`,
//! Gauss rules for that measure and the derivative connection matrix.
//!
//! Every evaluation goes through the three-term recurrence
//! `x p_k = sqrt(beta_{k+1}) p_{k+1} + sqrt(beta_k) p_{k-1}`,
//! `p_0 = beta_0^{-1/2}`; the weight is even so the diagonal vanishes.

mod diff;
mod eval;
mod quadrature;
mod recurrence;

pub use diff::{differentiation_matrix, DiffMatrix};
pub use eval::{ScaledValue, WeightedValues};
pub use quadrature::{eigenvector_weights, gauss_rule, QuadratureRule};
pub use recurrence::{
    hermite_recurrence, stieltjes_recurrence, stieltjes_recurrence_with, string_residuals, validate_string_equation,
    RecurrenceTable, StieltjesOptions,
};

use crate::error::Result;
use crate::weights::WeightParams;
use alloc::vec::Vec;

/// A weight together with a recurrence table long enough for the degrees
/// a computation needs.
#[derive(Debug, Clone)]
pub struct Basis {
    params: WeightParams,
    table: RecurrenceTable,
}

impl Basis {
    /// Builds the table up to `degree`: closed form for `lambda = 2`,
    /// discretized Stieltjes otherwise.
    pub fn new(params: WeightParams, degree: usize) -> Result<Self> {
        let table = if params.lambda() == 2.0 {
            hermite_recurrence(&params, degree)?
        } else {
            stieltjes_recurrence(&params, degree)?
        };
        Ok(Basis { params, table })
    }

    pub fn from_table(params: WeightParams, table: RecurrenceTable) -> Self {
        Basis { params, table }
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn table(&self) -> &RecurrenceTable {
        &self.table
    }

    /// Highest degree that can be evaluated.
    pub fn max_degree(&self) -> usize {
        self.table.len()
    }

    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.table.eval_orthonormal(k, x)
    }

    pub fn gauss_rule(&self, n: usize) -> Result<QuadratureRule> {
        gauss_rule(&self.table, n)
    }

    /// `p_k(x) w(x)` for `k = 0..=n`, safe against overflow at large `|x|`.
    pub fn weighted_values(&self, n: usize, x: f64) -> Vec<f64> {
        self.table.weighted_values(n, x, self.params.log_weight_1d(x)).values
    }

    pub fn differentiation_matrix(&self, n: usize) -> Result<DiffMatrix> {
        differentiation_matrix(&self.table, n)
    }
}
