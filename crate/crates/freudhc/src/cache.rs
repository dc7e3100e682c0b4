//! Operators built once per `(family, xi, d)` and shared read-only by the
//! worker pool.

use std::collections::HashMap;
use std::sync::Arc;

use freudhc_core::analysis::ApproxOperator;
use freudhc_core::spectral::{CrossFamily, GTruncation, HyperbolicOperator};

use crate::config::Family;
use crate::error::{Context, Result};

/// `xi` and `r_lambda` are keyed by their bit patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub family: Family,
    pub xi_bits: u64,
    pub dim: usize,
    /// Only the truncation depends on `r_lambda`; zero otherwise.
    pub r_lambda_bits: u64,
}

/// Filled by [`MultiplierCache::build`] and never mutated afterwards.
#[derive(Debug, Default)]
pub struct MultiplierCache {
    ops: HashMap<CacheKey, Arc<ApproxOperator>>,
}

impl MultiplierCache {
    pub fn build(family: Family, xis: &[f64], dim: usize, r_lambda: f64) -> Result<Self> {
        let mut ops = HashMap::new();
        for &xi in xis {
            let key = key(family, xi, dim, r_lambda);
            if ops.contains_key(&key) {
                continue;
            }
            let op = match family {
                Family::Vp => ApproxOperator::Hyperbolic(
                    HyperbolicOperator::new(CrossFamily::Vp, xi as u32, dim).context(|| format!("vp operator, xi = {xi}"))?,
                ),
                Family::Fourier => ApproxOperator::Hyperbolic(
                    HyperbolicOperator::new(CrossFamily::Fourier, xi as u32, dim)
                        .context(|| format!("fourier operator, xi = {xi}"))?,
                ),
                Family::Trunc => ApproxOperator::Truncate(
                    GTruncation::new(xi, dim, r_lambda).context(|| format!("truncation, xi = {xi}"))?,
                ),
            };
            ops.insert(key, Arc::new(op));
        }
        Ok(MultiplierCache { ops })
    }

    pub fn get(&self, family: Family, xi: f64, dim: usize, r_lambda: f64) -> Option<Arc<ApproxOperator>> {
        self.ops.get(&key(family, xi, dim, r_lambda)).cloned()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

fn key(family: Family, xi: f64, dim: usize, r_lambda: f64) -> CacheKey {
    let r_lambda_bits = if family == Family::Trunc { r_lambda.to_bits() } else { 0 };
    CacheKey { family, xi_bits: xi.to_bits(), dim, r_lambda_bits }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_operator_per_key() {
        let c = MultiplierCache::build(Family::Vp, &[2.0, 3.0, 2.0], 2, 1.0).unwrap();
        assert_eq!(c.len(), 2);
        let a = c.get(Family::Vp, 2.0, 2, 1.0).unwrap();
        let b = c.get(Family::Vp, 2.0, 2, 5.0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(c.get(Family::Vp, 4.0, 2, 1.0).is_none());
        let t = MultiplierCache::build(Family::Trunc, &[3.5], 2, 1.0).unwrap();
        assert!(t.get(Family::Trunc, 3.5, 2, 1.5).is_none());
    }
}
