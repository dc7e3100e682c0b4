//! Univariate diagonal operators in the orthonormal basis.

use alloc::vec::Vec;

use super::tensor::CoeffTensor;
use crate::error::{Error, Result};

/// Gain of the de la Vallee Poussin mean `V_m` at degree `j`.
pub fn vp_gain(m: u64, j: u64) -> f64 {
    if j <= m {
        1.0
    } else if j < 2 * m {
        (2 * m - j) as f64 / m as f64
    } else {
        0.0
    }
}

/// Gain of the dyadic block `v_{m,k} = V_{m 2^k} - V_{m 2^(k-1)}` (`v_{m,0} = V_m`).
pub fn dyadic_vp_gain(m: u64, k: u32, j: u64) -> f64 {
    if k == 0 {
        vp_gain(m, j)
    } else {
        vp_gain(m << k, j) - vp_gain(m << (k - 1), j)
    }
}

/// Gain of the dyadic Fourier block `s_{m,k} = S_{m 2^k} - S_{m 2^(k-1)}` (`s_{m,0} = S_m`).
pub fn dyadic_fourier_gain(m: u64, k: u32, j: u64) -> f64 {
    let hi = m << k;
    let lo = if k == 0 { 0 } else { m << (k - 1) };
    if j >= lo && j < hi {
        1.0
    } else {
        0.0
    }
}

/// A diagonal operator `p_j -> gain(j) p_j`: explicit gains followed by a
/// constant tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier1D {
    gains: Vec<f64>,
    tail: f64,
}

impl Multiplier1D {
    pub fn from_gains(gains: Vec<f64>, tail: f64) -> Self {
        let mut m = Multiplier1D { gains, tail };
        while m.gains.last() == Some(&m.tail) {
            m.gains.pop();
        }
        m
    }

    pub fn identity() -> Self {
        Multiplier1D { gains: Vec::new(), tail: 1.0 }
    }

    /// Fourier partial sum `S_m`.
    pub fn fourier(m: u64) -> Result<Self> {
        check_m(m)?;
        Ok(Self::from_gains(alloc::vec![1.0; m as usize], 0.0))
    }

    /// De la Vallee Poussin mean `V_m`.
    pub fn vp(m: u64) -> Result<Self> {
        check_m(m)?;
        Ok(Self::from_gains((0..2 * m).map(|j| vp_gain(m, j)).collect(), 0.0))
    }

    pub fn dyadic_vp(m: u64, k: u32) -> Result<Self> {
        check_m(m)?;
        let len = (m << (k + 1)) as usize;
        Ok(Self::from_gains((0..len as u64).map(|j| dyadic_vp_gain(m, k, j)).collect(), 0.0))
    }

    pub fn dyadic_fourier(m: u64, k: u32) -> Result<Self> {
        check_m(m)?;
        let len = (m << k) as usize;
        Ok(Self::from_gains((0..len as u64).map(|j| dyadic_fourier_gain(m, k, j)).collect(), 0.0))
    }

    /// `E_k = I - V_{2^k}`; its support is unbounded.
    pub fn vp_complement(k: u32) -> Self {
        let m = 1u64 << k;
        Self::from_gains((0..2 * m).map(|j| 1.0 - vp_gain(m, j)).collect(), 1.0)
    }

    pub fn gain(&self, j: u64) -> f64 {
        usize::try_from(j).ok().and_then(|j| self.gains.get(j)).copied().unwrap_or(self.tail)
    }

    /// Smallest `B` with `gain(j) = 0` for all `j >= B`, if any.
    pub fn support_bound(&self) -> Option<u64> {
        (self.tail == 0.0).then_some(self.gains.len() as u64)
    }

    /// Number of degrees with non-zero gain.
    pub fn rank(&self) -> Result<u64> {
        if self.tail != 0.0 {
            return Err(Error::UnboundedSupport);
        }
        Ok(self.gains.iter().filter(|&&g| g != 0.0).count() as u64)
    }

    /// Pointwise `self - other`.
    pub fn difference(&self, other: &Multiplier1D) -> Self {
        let n = self.gains.len().max(other.gains.len());
        let gains = (0..n as u64).map(|j| self.gain(j) - other.gain(j)).collect();
        Self::from_gains(gains, self.tail - other.tail)
    }

    /// Applies the operator to univariate coefficients.
    pub fn apply(&self, coeffs: &CoeffTensor) -> Result<CoeffTensor> {
        tensor_apply(coeffs, core::slice::from_ref(self))
    }
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter { name: "m", reason: "must be at least 1" });
    }
    Ok(())
}

/// Applies `mults[0] (x) ... (x) mults[d-1]` to `coeffs`.
pub fn tensor_apply(coeffs: &CoeffTensor, mults: &[Multiplier1D]) -> Result<CoeffTensor> {
    if mults.len() != coeffs.dim() {
        return Err(Error::DimensionMismatch { expected: coeffs.dim(), found: mults.len() });
    }
    Ok(coeffs.map_gain(|k| {
        mults.iter().zip(k).map(|(m, &kj)| m.gain(u64::from(kj))).product()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::MultiIndex;
    use alloc::vec;

    fn gains(m: &Multiplier1D, n: u64) -> Vec<f64> {
        (0..n).map(|j| m.gain(j)).collect()
    }

    #[test]
    fn fourier_gains() {
        assert_eq!(gains(&Multiplier1D::fourier(1).unwrap(), 3), vec![1.0, 0.0, 0.0]);
        let s3 = Multiplier1D::fourier(3).unwrap();
        assert_eq!((s3.gain(2), s3.gain(3)), (1.0, 0.0));
        assert_eq!(s3.rank(), Ok(3));
    }

    #[test]
    fn vp_gains() {
        assert_eq!(gains(&Multiplier1D::vp(1).unwrap(), 4), vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(gains(&Multiplier1D::vp(2).unwrap(), 5), vec![1.0, 1.0, 1.0, 0.5, 0.0]);
        assert_eq!(Multiplier1D::vp(1).unwrap(), Multiplier1D::fourier(2).unwrap());
    }

    #[test]
    fn dyadic_blocks() {
        assert_eq!(gains(&Multiplier1D::dyadic_vp(1, 1).unwrap(), 5), vec![0.0, 0.0, 1.0, 0.5, 0.0]);
        assert_eq!(dyadic_vp_gain(1, 3, 4), 0.0);
        assert_eq!(dyadic_fourier_gain(1, 2, 3), 1.0);
        // {0}, {1}, {2,3}, {4..7}
        for j in 0..8u64 {
            let hits: Vec<u32> = (0..4).filter(|&k| dyadic_fourier_gain(1, k, j) == 1.0).collect();
            let expected = if j == 0 { 0 } else { 64 - j.leading_zeros() };
            assert_eq!(hits, vec![expected]);
        }
    }

    #[test]
    fn complement_is_unbounded() {
        let e0 = Multiplier1D::vp_complement(0);
        assert_eq!(gains(&e0, 4), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(e0.support_bound(), None);
        assert_eq!(e0.rank(), Err(Error::UnboundedSupport));
        assert_eq!(Multiplier1D::vp(4).unwrap().support_bound(), Some(8));
    }

    #[test]
    fn tensor_of_blocks() {
        let v1 = Multiplier1D::dyadic_vp(1, 1).unwrap();
        let t = CoeffTensor::unit(MultiIndex::new(vec![3, 3]));
        let out = tensor_apply(&t, &[v1.clone(), v1.clone()]).unwrap();
        assert_eq!(out.get(&MultiIndex::new(vec![3, 3])), 0.25);
        assert!(tensor_apply(&t, &[v1]).is_err());
    }

    #[test]
    fn zero_m_is_rejected() {
        assert!(Multiplier1D::vp(0).is_err());
        assert!(Multiplier1D::fourier(0).is_err());
    }
}
