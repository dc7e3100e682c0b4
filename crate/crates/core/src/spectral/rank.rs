use super::cross::{product_count, GTruncation, HyperbolicOperator, Levels};
use super::multiplier::Multiplier1D;
use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Names one of the diagonal operators so its rank can be queried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorDescriptor {
    Fourier { m: u64 },
    Vp { m: u64 },
    DyadicVp { m: u64, k: u32 },
    DyadicFourier { m: u64, k: u32 },
    VpComplement { k: u32 },
    HyperbolicVp { xi: u32, dim: usize },
    HyperbolicFourier { xi: u32, dim: usize },
    TruncateG { xi: f64, dim: usize, r_lambda: f64 },
}

/// Operator families indexed by a scalar `xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiFamily {
    /// `V_xi`, rank `|H(xi)|`.
    HyperbolicVp,
    /// `S_xi`, rank `|H_1(xi)|`.
    HyperbolicFourier,
    /// `S*_xi`, rank `|G(xi)|`.
    TruncateG { r_lambda: f64 },
}

/// Dimension of the range of the operator.
///
/// The rank of `S_xi` is taken as `|H_1(xi)|`, the size of its nominal index
/// set, not the count of its non-zero gains.
pub fn rank_of(op: &OperatorDescriptor) -> Result<u128> {
    let one = |m: Multiplier1D| m.rank().map(u128::from);
    match *op {
        OperatorDescriptor::Fourier { m } => one(Multiplier1D::fourier(m)?),
        OperatorDescriptor::Vp { m } => one(Multiplier1D::vp(m)?),
        OperatorDescriptor::DyadicVp { m, k } => one(Multiplier1D::dyadic_vp(m, k)?),
        OperatorDescriptor::DyadicFourier { m, k } => one(Multiplier1D::dyadic_fourier(m, k)?),
        OperatorDescriptor::VpComplement { .. } => Err(Error::UnboundedSupport),
        OperatorDescriptor::HyperbolicVp { xi, dim } => {
            HyperbolicOperator::new(super::CrossFamily::Vp, xi, dim)?;
            Ok(Levels::Support.cross_cardinality(xi, dim))
        }
        OperatorDescriptor::HyperbolicFourier { xi, dim } => {
            HyperbolicOperator::new(super::CrossFamily::Fourier, xi, dim)?;
            Ok(Levels::Reproduction.cross_cardinality(xi, dim))
        }
        OperatorDescriptor::TruncateG { xi, dim, r_lambda } => Ok(GTruncation::new(xi, dim, r_lambda)?.rank()),
    }
}

/// The largest `xi` whose operator in `family` has rank at most `n`.
///
/// For the integer families this is an integer. For `S*` the rank jumps at
/// `xi = P^r_lambda` with `P` an integer, so the answer is `(a_n - 1)^r_lambda`
/// where `a_n` is the smallest `P` with more than `n` indices below it.
pub fn largest_xi(n: u64, family: XiFamily, dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
    }
    match family {
        XiFamily::HyperbolicVp => integer_search(n, Levels::Support, dim).map(f64::from),
        XiFamily::HyperbolicFourier => integer_search(n, Levels::Reproduction, dim).map(f64::from),
        XiFamily::TruncateG { r_lambda } => {
            if !(r_lambda > 0.0) {
                return Err(Error::InvalidParameter { name: "r_lambda", reason: "must be positive" });
            }
            if n == 0 {
                return Err(Error::NoAdmissibleXi { n, min_rank: 1 });
            }
            let p = smallest_product_exceeding(dim, n)?;
            Ok(((p - 1) as f64).powf(r_lambda))
        }
    }
}

fn integer_search(n: u64, levels: Levels, dim: usize) -> Result<u32> {
    let n = u128::from(n);
    let min_rank = levels.cross_cardinality(0, dim);
    if n < min_rank {
        return Err(Error::NoAdmissibleXi { n: n as u64, min_rank: min_rank.min(u128::from(u64::MAX)) as u64 });
    }
    let mut xi = 0u32;
    while xi < 62 && levels.cross_cardinality(xi + 1, dim) <= n {
        xi += 1;
    }
    Ok(xi)
}

/// Smallest `P` with `product_count(dim, P) > n`, i.e. the `(n+1)`-th
/// smallest value of `prod_j (k_j + 1)`.
pub fn smallest_product_exceeding(dim: usize, n: u64) -> Result<u64> {
    let target = u128::from(n);
    let mut hi = 1u64;
    while product_count(dim, hi) <= target {
        hi = hi.checked_mul(2).ok_or(Error::EnumerationBound { bound: hi })?;
    }
    let mut lo = hi / 2;
    // product_count(lo) <= n < product_count(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if product_count(dim, mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
