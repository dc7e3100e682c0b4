//! Kolmogorov widths of the unit ball of the space with coefficient
//! weights `rho_k = prod_j (k_j + 1)^{r_lambda}`, measured in `L_{2,w}`.
//!
//! By Parseval the ball is an ellipsoid with semi-axes `1 / rho_k`, so
//! `d_n` (equal to the linear width `lambda_n` here) is the `(n+1)`-st
//! largest semi-axis, i.e. `s_n^{-r_lambda}` where `s_0 <= s_1 <= ...` is
//! the multiset of products `prod_j (k_j + 1)`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spectral::{largest_xi, XiFamily};

/// Largest product bound the sieve will allocate for.
pub const MAX_ENUMERATION_BOUND: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthRow {
    pub n: u64,
    pub d_n: f64,
    /// `n^{-r_lambda} (ln n)^{r_lambda (d-1)}`; absent for `n < 2`.
    pub theory: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthTable {
    pub dim: usize,
    pub r_lambda: f64,
    pub rows: Vec<WidthRow>,
}

impl WidthTable {
    pub fn d_n(&self, n: u64) -> Option<f64> {
        self.rows.get(usize::try_from(n).ok()?).map(|r| r.d_n)
    }
}

/// `tau[v]` = number of `k in N_0^d` with `prod_j (k_j + 1) = v`, `v <= bound`.
fn product_multiplicities(dim: usize, bound: u64) -> Vec<u64> {
    let b = bound as usize;
    let mut tau = vec![1u64; b + 1];
    tau[0] = 0;
    for _ in 1..dim {
        let mut next = vec![0u64; b + 1];
        for (e, &t) in tau.iter().enumerate().skip(1) {
            for v in (e..=b).step_by(e) {
                next[v] += t;
            }
        }
        tau = next;
    }
    tau
}

/// `s_0..=s_{n_max}` from the products up to `bound`, or `None` if fewer
/// than `n_max + 1` products lie below the bound.
fn smallest_products(dim: usize, bound: u64, n_max: u64) -> Option<Vec<u64>> {
    let tau = product_multiplicities(dim, bound);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for (v, &t) in tau.iter().enumerate() {
        for _ in 0..t {
            if out.len() as u64 > n_max {
                return Some(out);
            }
            out.push(v as u64);
        }
    }
    (out.len() as u64 > n_max).then_some(out)
}

/// `d_n` for `n = 0..=n_max`.
///
/// The products are enumerated up to a bound `P` with at least `n_max + 1`
/// of them below it, and the table is recomputed with `2P` to confirm
/// nothing changes.
pub fn exact_diagonal_widths(dim: usize, r_lambda: f64, n_max: u64) -> Result<WidthTable> {
    if dim == 0 {
        return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
    }
    if !(r_lambda > 0.0) || !r_lambda.is_finite() {
        return Err(Error::InvalidParameter { name: "r_lambda", reason: "must be positive" });
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter { name: "n_max", reason: "must be at least 1" });
    }
    // there are at least `P` products up to `P`
    let bound = n_max + 1;
    if 2 * bound > MAX_ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { bound: 2 * bound });
    }
    let products = smallest_products(dim, bound, n_max).ok_or(Error::EnumerationBound { bound })?;
    let check = smallest_products(dim, 2 * bound, n_max).ok_or(Error::EnumerationBound { bound: 2 * bound })?;
    if products != check {
        return Err(Error::EnumerationBound { bound });
    }
    let rows = products
        .iter()
        .enumerate()
        .map(|(n, &s)| {
            let n = n as u64;
            let d_n = (s as f64).powf(-r_lambda);
            let theory = theory_rate(n as f64, dim, r_lambda).ok();
            WidthRow { n, d_n, theory, ratio: theory.map(|t| d_n / t) }
        })
        .collect();
    Ok(WidthTable { dim, r_lambda, rows })
}

/// `n^{-r_lambda} (ln n)^{r_lambda (d - 1)}`.
pub fn theory_rate(n: f64, dim: usize, r_lambda: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(Error::InvalidParameter { name: "n", reason: "theory rate needs n >= 2" });
    }
    if dim == 0 {
        return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
    }
    Ok(n.powf(-r_lambda) * n.ln().powf(r_lambda * (dim - 1) as f64))
}

/// `xi_n` = largest `xi` whose operator has rank at most `n`, for each `n`.
pub fn xi_sequence(n_list: &[u64], family: XiFamily, dim: usize) -> Result<Vec<f64>> {
    n_list.iter().map(|&n| largest_xi(n, family, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities_are_divisor_counts() {
        let tau = product_multiplicities(2, 12);
        assert_eq!(&tau[1..], &[1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]);
        let tau3 = product_multiplicities(3, 8);
        assert_eq!(&tau3[1..], &[1, 3, 3, 6, 3, 9, 3, 10]);
    }

    #[test]
    fn products_are_sorted_with_multiplicity() {
        assert_eq!(smallest_products(2, 4, 7).unwrap(), vec![1, 2, 2, 3, 3, 4, 4, 4]);
        assert!(smallest_products(2, 2, 7).is_none());
    }
}
