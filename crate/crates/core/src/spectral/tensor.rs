use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::math::sum2;

/// A multi-index `k in N_0^d`, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Self {
        MultiIndex(k)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(alloc::vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|&k| u64::from(k)).sum()
    }

    pub fn linf(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `prod_j (k_j + 1)`, saturating at `u64::MAX`.
    pub fn shifted_product(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, &k| acc.saturating_mul(u64::from(k) + 1))
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(k: Vec<u32>) -> Self {
        MultiIndex(k)
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(k: &[u32]) -> Self {
        MultiIndex(k.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, k) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

/// Finitely supported coefficients `f = sum_k c_k p_k` in the tensor
/// orthonormal basis. Absent indices are zero and zeros are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffTensor {
    dim: usize,
    entries: BTreeMap<MultiIndex, f64>,
}

impl CoeffTensor {
    pub fn new(dim: usize) -> Self {
        CoeffTensor { dim, entries: BTreeMap::new() }
    }

    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut t = CoeffTensor::new(dim);
        for (k, v) in entries {
            t.insert(k, v)?;
        }
        Ok(t)
    }

    /// Univariate coefficients `c_0, c_1, ...`.
    pub fn from_univariate(coeffs: &[f64]) -> Self {
        let mut t = CoeffTensor::new(1);
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                t.entries.insert(MultiIndex(alloc::vec![k as u32]), c);
            }
        }
        t
    }

    /// The single basis function `p_k`.
    pub fn unit(k: MultiIndex) -> Self {
        let dim = k.dim();
        let mut entries = BTreeMap::new();
        entries.insert(k, 1.0);
        CoeffTensor { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sets `c_k = value`; a zero value removes the entry.
    pub fn insert(&mut self, k: MultiIndex, value: f64) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: k.dim() });
        }
        if value == 0.0 {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, value);
        }
        Ok(())
    }

    pub fn get(&self, k: &MultiIndex) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    /// Entries in lexicographic index order.
    pub fn iter(&self) -> btree_map::Iter<'_, MultiIndex, f64> {
        self.entries.iter()
    }

    /// `||f||_{L_2,w}^2 = sum_k c_k^2`.
    pub fn norm_sq(&self) -> f64 {
        sum2(self.entries.values().map(|c| c * c))
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn scaled(&self, factor: f64) -> CoeffTensor {
        let mut out = CoeffTensor::new(self.dim);
        for (k, &v) in &self.entries {
            let w = v * factor;
            if w != 0.0 {
                out.entries.insert(k.clone(), w);
            }
        }
        out
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &CoeffTensor) -> Result<CoeffTensor> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = self.clone();
        for (k, &v) in &other.entries {
            let w = out.get(k) + factor * v;
            out.insert(k.clone(), w)?;
        }
        Ok(out)
    }

    /// Largest index per axis (zero for an empty tensor).
    pub fn degree_box(&self) -> MultiIndex {
        let mut b = alloc::vec![0u32; self.dim];
        for k in self.entries.keys() {
            for (m, &kj) in b.iter_mut().zip(k.as_slice()) {
                *m = (*m).max(kj);
            }
        }
        MultiIndex(b)
    }

    /// Multiplies every entry by `gain(k)` and drops the zeros.
    pub fn map_gain(&self, mut gain: impl FnMut(&[u32]) -> f64) -> CoeffTensor {
        let mut out = CoeffTensor::new(self.dim);
        for (k, &v) in &self.entries {
            let w = v * gain(k.as_slice());
            if w != 0.0 {
                out.entries.insert(k.clone(), w);
            }
        }
        out
    }
}

impl<'a> IntoIterator for &'a CoeffTensor {
    type Item = (&'a MultiIndex, &'a f64);
    type IntoIter = btree_map::Iter<'a, MultiIndex, f64>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
