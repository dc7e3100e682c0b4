//! Step hyperbolic crosses, the operators built on them and the sets
//! `G(xi) = {k : prod_j (k_j + 1)^{r_lambda} <= xi}`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::multiplier::dyadic_vp_gain;
use super::tensor::{CoeffTensor, MultiIndex};
use crate::error::{Error, Result};
use crate::math::bit_len;

/// How a degree `s` is assigned to a dyadic level. A level cross of size
/// `xi` is `{s : sum_j level(s_j) <= xi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Levels {
    /// Smallest `k` with `s <= 2^(k+1) - 1`; crosses are `H(xi)`.
    Support,
    /// Smallest `k` with `s <= 2^k`; crosses are `H_1(xi)`.
    Reproduction,
    /// The `k` with `s` in the dyadic block `[2^(k-1), 2^k - 1]` (`{0}` for `k = 0`).
    Block,
}

impl Levels {
    pub fn level(self, s: u64) -> u32 {
        match self {
            Levels::Support => bit_len(s).max(1) - 1,
            Levels::Reproduction => {
                if s == 0 {
                    0
                } else {
                    bit_len(s - 1)
                }
            }
            Levels::Block => bit_len(s),
        }
    }

    /// Degrees at level `l`, as an inclusive range.
    pub fn range(self, l: u32) -> (u64, u64) {
        match (self, l) {
            (Levels::Support, 0) => (0, 1),
            (Levels::Support, l) => (1 << l, (1 << (l + 1)) - 1),
            (Levels::Reproduction, 0) => (0, 1),
            (Levels::Reproduction, l) => ((1 << (l - 1)) + 1, 1 << l),
            (Levels::Block, 0) => (0, 0),
            (Levels::Block, l) => (1 << (l - 1), (1 << l) - 1),
        }
    }

    pub fn count(self, l: u32) -> u128 {
        let (lo, hi) = self.range(l);
        u128::from(hi - lo + 1)
    }

    /// `|{s in N_0^d : sum_j level(s_j) <= xi}|`, saturating at `u128::MAX`.
    pub fn cross_cardinality(self, xi: u32, dim: usize) -> u128 {
        let xi = xi as usize;
        let mut dp = vec![0u128; xi + 1];
        dp[0] = 1;
        for _ in 0..dim {
            let mut next = vec![0u128; xi + 1];
            for (t, &c) in dp.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for l in 0..=(xi - t) {
                    let add = c.saturating_mul(self.count(l as u32));
                    next[t + l] = next[t + l].saturating_add(add);
                }
            }
            dp = next;
        }
        dp.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
    }
}

/// Which dyadic blocks a hyperbolic-cross operator sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossFamily {
    /// `sum_{|k|_1 <= xi} v_k` (de la Vallee Poussin blocks).
    Vp,
    /// `sum_{|k|_1 <= xi} s_k` (Fourier blocks).
    Fourier,
}

/// Degrees below this bound get their block gains from a table.
const AXIS_TABLE_LIMIT: u64 = 1 << 16;

/// The operator `sum_{|k|_1 <= xi} v_k` or `sum_{|k|_1 <= xi} s_k` on `R^d`,
/// i.e. the multiplier `Lambda_xi(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicOperator {
    family: CrossFamily,
    xi: u32,
    dim: usize,
    // (v_l(s), v_{l+1}(s)) with l the support level of s
    axis: Vec<(f64, f64)>,
}

impl HyperbolicOperator {
    pub fn new(family: CrossFamily, xi: u32, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
        }
        if xi > 62 {
            return Err(Error::InvalidParameter { name: "xi", reason: "must be at most 62" });
        }
        let axis = match family {
            CrossFamily::Vp => {
                let len = (2u64 << xi).min(AXIS_TABLE_LIMIT);
                (0..len).map(vp_pair).collect()
            }
            CrossFamily::Fourier => Vec::new(),
        };
        Ok(HyperbolicOperator { family, xi, dim, axis })
    }

    pub fn family(&self) -> CrossFamily {
        self.family
    }

    pub fn xi(&self) -> u32 {
        self.xi
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Level function whose cross of size `xi` is the support.
    pub fn support_levels(&self) -> Levels {
        match self.family {
            CrossFamily::Vp => Levels::Support,
            CrossFamily::Fourier => Levels::Block,
        }
    }

    pub fn rank(&self) -> u128 {
        self.support_levels().cross_cardinality(self.xi, self.dim)
    }

    fn pair(&self, s: u64) -> (f64, f64) {
        usize::try_from(s).ok().and_then(|i| self.axis.get(i)).copied().unwrap_or_else(|| vp_pair(s))
    }

    /// `Lambda_xi(s)`.
    pub fn gain(&self, s: &[u32]) -> f64 {
        let levels = self.support_levels();
        let total: u64 = s.iter().map(|&sj| u64::from(levels.level(u64::from(sj)))).sum();
        if total > u64::from(self.xi) {
            return 0.0;
        }
        match self.family {
            CrossFamily::Fourier => 1.0,
            CrossFamily::Vp => {
                let spare = (u64::from(self.xi) - total) as usize;
                if spare >= s.len() {
                    // every choice k_j in {l_j, l_j + 1} is admissible
                    return 1.0;
                }
                // poly[t]: sum over choices with t coordinates raised to l_j + 1
                let mut poly = vec![0.0; spare + 1];
                poly[0] = 1.0;
                for &sj in s {
                    let (lo, hi) = self.pair(u64::from(sj));
                    for t in (0..=spare).rev() {
                        let carry = if t > 0 { poly[t - 1] * hi } else { 0.0 };
                        poly[t] = poly[t] * lo + carry;
                    }
                }
                poly.iter().sum()
            }
        }
    }

    pub fn apply(&self, coeffs: &CoeffTensor) -> Result<CoeffTensor> {
        if coeffs.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coeffs.dim() });
        }
        Ok(coeffs.map_gain(|s| self.gain(s)))
    }
}

/// `(v_l(s), v_{l+1}(s))` for `l = Levels::Support.level(s)`; these are the
/// only non-zero `v`-block gains at `s` and they sum to one.
pub fn vp_pair(s: u64) -> (f64, f64) {
    let l = Levels::Support.level(s);
    (dyadic_vp_gain(1, l, s), dyadic_vp_gain(1, l + 1, s))
}

/// `V_xi f = sum_{|k|_1 <= xi} v_k f`.
pub fn hyperbolic_vp_apply(coeffs: &CoeffTensor, xi: u32) -> Result<CoeffTensor> {
    HyperbolicOperator::new(CrossFamily::Vp, xi, coeffs.dim())?.apply(coeffs)
}

/// `S_xi f = sum_{|k|_1 <= xi} s_k f`, the projection onto a step hyperbolic cross.
pub fn hyperbolic_fourier_apply(coeffs: &CoeffTensor, xi: u32) -> Result<CoeffTensor> {
    HyperbolicOperator::new(CrossFamily::Fourier, xi, coeffs.dim())?.apply(coeffs)
}

/// An explicit finite set of multi-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    indices: BTreeSet<MultiIndex>,
}

impl IndexSet {
    pub fn from_indices(dim: usize, indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for k in indices {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
            set.insert(k);
        }
        Ok(IndexSet { dim, indices: set })
    }

    /// `{s : sum_j levels.level(s_j) <= xi}` by enumeration.
    pub fn level_cross(levels: Levels, xi: u32, dim: usize) -> Self {
        let mut indices = BTreeSet::new();
        let mut cur = vec![0u32; dim];
        fn rec(levels: Levels, budget: u32, j: usize, cur: &mut Vec<u32>, out: &mut BTreeSet<MultiIndex>) {
            if j == cur.len() {
                out.insert(MultiIndex::from(cur.as_slice()));
                return;
            }
            for l in 0..=budget {
                let (lo, hi) = levels.range(l);
                for s in lo..=hi {
                    cur[j] = s as u32;
                    rec(levels, budget - l, j + 1, cur, out);
                }
            }
        }
        rec(levels, xi, 0, &mut cur, &mut indices);
        IndexSet { dim, indices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.indices.contains(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }

    /// Closed under componentwise decrease of any single coordinate.
    pub fn is_downward_closed(&self) -> bool {
        self.indices.iter().all(|k| {
            (0..self.dim).all(|j| {
                if k[j] == 0 {
                    return true;
                }
                let mut lower = k.as_slice().to_vec();
                lower[j] -= 1;
                self.indices.contains(&MultiIndex::new(lower))
            })
        })
    }
}

/// `H(xi) = union_{|k|_1 <= xi} {s : s_j <= 2^(k_j+1) - 1}`.
pub fn index_set_h(xi: u32, dim: usize) -> IndexSet {
    IndexSet::level_cross(Levels::Support, xi, dim)
}

/// `H_1(xi) = union_{|k|_1 <= xi} {s : s_j <= 2^(k_j)}`.
pub fn index_set_h1(xi: u32, dim: usize) -> IndexSet {
    IndexSet::level_cross(Levels::Reproduction, xi, dim)
}

/// The largest integer `B` with `B^r_lambda <= xi`: `k` lies in `G(xi)` iff
/// `prod_j (k_j + 1) <= B`.
pub fn g_product_bound(xi: f64, r_lambda: f64) -> u64 {
    if !(xi >= 1.0) {
        return 0;
    }
    let guess = xi.powf(1.0 / r_lambda).floor();
    if guess >= 1.8e19 {
        return u64::MAX;
    }
    let mut b = guess as u64;
    while b < u64::MAX && ((b + 1) as f64).powf(r_lambda) <= xi {
        b += 1;
    }
    while b > 1 && (b as f64).powf(r_lambda) > xi {
        b -= 1;
    }
    b
}

/// Number of `k in N_0^d` with `prod_j (k_j + 1) <= bound`.
pub fn product_count(dim: usize, bound: u64) -> u128 {
    if bound == 0 {
        return 0;
    }
    if dim == 1 {
        return u128::from(bound);
    }
    // group the first factor by the value of bound / m
    let mut total = 0u128;
    let mut m = 1u64;
    while m <= bound {
        let q = bound / m;
        let last = bound / q;
        total += u128::from(last - m + 1) * product_count(dim - 1, q);
        m = last + 1;
    }
    total
}

/// `|G(xi)|` for `rho_k = prod_j (k_j + 1)^{r_lambda}`.
pub fn g_cardinality(xi: f64, dim: usize, r_lambda: f64) -> u128 {
    product_count(dim, g_product_bound(xi, r_lambda))
}

fn check_g_args(xi: f64, dim: usize, r_lambda: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
    }
    if !(r_lambda > 0.0) || !r_lambda.is_finite() {
        return Err(Error::InvalidParameter { name: "r_lambda", reason: "must be positive" });
    }
    if !(xi >= 1.0) {
        return Err(Error::InvalidParameter { name: "xi", reason: "must be at least 1" });
    }
    Ok(())
}

/// `G(xi)` by recursive descent over coordinates.
pub fn index_set_g(xi: f64, dim: usize, r_lambda: f64) -> Result<IndexSet> {
    check_g_args(xi, dim, r_lambda)?;
    let bound = g_product_bound(xi, r_lambda);
    let mut indices = BTreeSet::new();
    let mut cur = vec![0u32; dim];
    fn rec(budget: u64, j: usize, cur: &mut Vec<u32>, out: &mut BTreeSet<MultiIndex>) {
        if j == cur.len() {
            out.insert(MultiIndex::from(cur.as_slice()));
            return;
        }
        for f in 1..=budget {
            cur[j] = (f - 1) as u32;
            rec(budget / f, j + 1, cur, out);
        }
    }
    rec(bound, 0, &mut cur, &mut indices);
    Ok(IndexSet { dim, indices })
}

/// The projection `S*_xi` onto `G(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTruncation {
    xi: f64,
    dim: usize,
    r_lambda: f64,
    bound: u64,
}

impl GTruncation {
    pub fn new(xi: f64, dim: usize, r_lambda: f64) -> Result<Self> {
        check_g_args(xi, dim, r_lambda)?;
        Ok(GTruncation { xi, dim, r_lambda, bound: g_product_bound(xi, r_lambda) })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_lambda(&self) -> f64 {
        self.r_lambda
    }

    /// Largest admissible `prod_j (k_j + 1)`.
    pub fn product_bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, k: &[u32]) -> bool {
        k.iter().try_fold(1u64, |acc, &kj| acc.checked_mul(u64::from(kj) + 1)).is_some_and(|p| p <= self.bound)
    }

    pub fn rank(&self) -> u128 {
        product_count(self.dim, self.bound)
    }

    pub fn apply(&self, coeffs: &CoeffTensor) -> Result<CoeffTensor> {
        if coeffs.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coeffs.dim() });
        }
        Ok(coeffs.map_gain(|k| if self.contains(k) { 1.0 } else { 0.0 }))
    }
}

/// `S*_xi f`: keeps exactly the coefficients indexed by `G(xi)`.
pub fn truncate_g(coeffs: &CoeffTensor, xi: f64, r_lambda: f64) -> Result<CoeffTensor> {
    GTruncation::new(xi, coeffs.dim(), r_lambda)?.apply(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mi(k: &[u32]) -> MultiIndex {
        MultiIndex::from(k)
    }

    #[test]
    fn small_crosses() {
        let h = index_set_h(0, 1);
        assert_eq!(h.len(), 2);
        assert!(h.contains(&mi(&[1])));
        assert_eq!(index_set_h(1, 2).len(), 12);
        assert_eq!(Levels::Support.cross_cardinality(1, 2), 12);
        for d in 1..=3 {
            for xi in 0..=5 {
                for lv in [Levels::Support, Levels::Reproduction, Levels::Block] {
                    let set = IndexSet::level_cross(lv, xi, d);
                    assert_eq!(set.len() as u128, lv.cross_cardinality(xi, d), "{lv:?} d={d} xi={xi}");
                    assert!(set.is_downward_closed());
                }
            }
        }
    }

    #[test]
    fn level_ranges_tile_the_degrees() {
        for lv in [Levels::Support, Levels::Reproduction, Levels::Block] {
            let mut next = 0;
            for l in 0..10 {
                let (lo, hi) = lv.range(l);
                assert_eq!(lo, next);
                for s in lo..=hi {
                    assert_eq!(lv.level(s), l);
                }
                next = hi + 1;
            }
        }
    }

    #[test]
    fn vp_cross_gains() {
        let op = HyperbolicOperator::new(CrossFamily::Vp, 1, 2).unwrap();
        assert_eq!(op.gain(&[0, 0]), 1.0);
        assert_eq!(op.gain(&[1, 2]), 1.0);
        assert_eq!(op.gain(&[0, 3]), 0.5);
        assert_eq!(op.gain(&[2, 2]), 0.0);
        let one_d = HyperbolicOperator::new(CrossFamily::Vp, 3, 1).unwrap();
        for s in 0..40u32 {
            assert_eq!(one_d.gain(&[s]), crate::spectral::vp_gain(8, u64::from(s)));
        }
    }

    #[test]
    fn vp_cross_matches_block_sum() {
        // brute force sum over all k with |k|_1 <= xi
        for d in 1..=3usize {
            for xi in 0..=4u32 {
                let op = HyperbolicOperator::new(CrossFamily::Vp, xi, d).unwrap();
                let box_len = 2u32 << xi;
                let mut s = vec![0u32; d];
                loop {
                    let mut direct = 0.0;
                    let mut k = vec![0u32; d];
                    loop {
                        if k.iter().sum::<u32>() <= xi {
                            direct += k
                                .iter()
                                .zip(&s)
                                .map(|(&kj, &sj)| dyadic_vp_gain(1, kj, u64::from(sj)))
                                .product::<f64>();
                        }
                        if !advance(&mut k, xi + 1) {
                            break;
                        }
                    }
                    assert!((op.gain(&s) - direct).abs() < 1e-15, "s={s:?}");
                    if !advance(&mut s, box_len) {
                        break;
                    }
                }
            }
        }
    }

    fn advance(k: &mut [u32], limit: u32) -> bool {
        for kj in k.iter_mut() {
            *kj += 1;
            if *kj < limit {
                return true;
            }
            *kj = 0;
        }
        false
    }

    #[test]
    fn fourier_cross_is_block_truncation() {
        let op = HyperbolicOperator::new(CrossFamily::Fourier, 2, 2).unwrap();
        assert_eq!(op.gain(&[1, 1]), 1.0);
        assert_eq!(op.gain(&[3, 0]), 1.0);
        assert_eq!(op.gain(&[2, 1]), 0.0);
        assert_eq!(op.rank(), 8);
    }

    #[test]
    fn g_sets() {
        assert_eq!(index_set_g(3.0, 1, 1.0).unwrap().len(), 3);
        assert_eq!(index_set_g(3.7, 1, 1.0).unwrap().len(), 3);
        let g = index_set_g(3.0, 2, 1.0).unwrap();
        let expected: Vec<MultiIndex> =
            [[0, 0], [0, 1], [0, 2], [1, 0], [2, 0]].iter().map(|k| mi(k)).collect();
        assert_eq!(g.iter().cloned().collect::<Vec<_>>(), expected);
        assert_eq!(g_cardinality(4.0, 2, 1.0), 8);
        assert!(index_set_g(0.5, 2, 1.0).is_err());
        for d in 1..=3 {
            for &r in &[1.0, 1.5, 0.5] {
                for &xi in &[1.0, 2.5, 7.0, 40.0] {
                    let g = index_set_g(xi, d, r).unwrap();
                    assert_eq!(g.len() as u128, g_cardinality(xi, d, r));
                    assert!(g.is_downward_closed());
                }
            }
        }
    }

    #[test]
    fn product_bound_is_exact_at_powers() {
        assert_eq!(g_product_bound(8.0, 1.5), 4);
        assert_eq!(g_product_bound(7.999, 1.5), 3);
        assert_eq!(g_product_bound(0.9, 1.0), 0);
    }

    #[test]
    fn truncation() {
        let t = CoeffTensor::unit(mi(&[1, 1]));
        assert!(truncate_g(&t, 3.0, 1.0).unwrap().is_empty());
        assert_eq!(truncate_g(&t, 4.0, 1.0).unwrap(), t);
    }
}
