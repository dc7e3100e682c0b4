//! The generating Freud weight, its parameters and the scalar exponents of
//! the convergence-rate formulas.

use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Index of a weighted Lebesgue norm, `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpIndex {
    Finite(f64),
    Infinity,
}

impl LpIndex {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(LpIndex::Infinity);
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter { name: "p/q", reason: "norm index must lie in [1, inf]" });
        }
        Ok(LpIndex::Finite(p))
    }

    /// `1/p` with the convention `1/inf = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            LpIndex::Finite(p) => 1.0 / p,
            LpIndex::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LpIndex::Infinity)
    }

    pub fn value(self) -> f64 {
        match self {
            LpIndex::Finite(p) => p,
            LpIndex::Infinity => f64::INFINITY,
        }
    }
}

/// Parameters `(lambda, a, b, d, r, p, q)` of the weight
/// `w(x) = prod_i exp(-a|x_i|^lambda + b)` and of the smoothness/error pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    lambda: f64,
    a: f64,
    b: f64,
    dim: usize,
    r: u32,
    p: LpIndex,
    q: LpIndex,
}

/// `r_lambda = (1 - 1/lambda) r`, the loss `delta_{lambda,p,q}` and
/// `r_{lambda,p,q} = r_lambda - delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateExponents {
    pub r_lambda: f64,
    pub delta: f64,
    pub r_lambda_pq: f64,
}

impl WeightParams {
    pub fn new(lambda: f64, a: f64, b: f64, dim: usize, r: u32, p: LpIndex, q: LpIndex) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter { name: "lambda", reason: "must be > 1" });
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter { name: "a", reason: "must be > 0" });
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter { name: "b", reason: "must be finite" });
        }
        if dim == 0 {
            return Err(Error::InvalidParameter { name: "d", reason: "must be >= 1" });
        }
        if r == 0 {
            return Err(Error::InvalidParameter { name: "r", reason: "must be >= 1" });
        }
        // Re-validate in case the indices were built by hand.
        LpIndex::new(p.value())?;
        LpIndex::new(q.value())?;
        Ok(WeightParams { lambda, a, b, dim, r, p, q })
    }

    /// Univariate weight with `r = 1`, `p = q = 2`; enough for everything
    /// that only touches the polynomial machinery.
    pub fn univariate(lambda: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(lambda, a, b, 1, 1, LpIndex::Finite(2.0), LpIndex::Finite(2.0))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn p(&self) -> LpIndex {
        self.p
    }
    pub fn q(&self) -> LpIndex {
        self.q
    }

    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter { name: "d", reason: "must be >= 1" });
        }
        self.dim = dim;
        Ok(self)
    }

    /// `ln w(x)` for the univariate generating weight.
    #[inline]
    pub fn log_weight_1d(&self, x: f64) -> f64 {
        -self.a * libm::pow(x.abs(), self.lambda) + self.b
    }

    #[inline]
    pub fn weight_1d(&self, x: f64) -> f64 {
        libm::exp(self.log_weight_1d(x))
    }

    /// `w(x) = prod_i exp(-a|x_i|^lambda + b)`.
    ///
    /// Panics if `x.len()` differs from the dimension.
    pub fn weight_eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "point dimension");
        libm::exp(x.iter().map(|&xi| self.log_weight_1d(xi)).sum::<f64>())
    }

    pub fn rate_exponents(&self) -> RateExponents {
        let r_lambda = (1.0 - 1.0 / self.lambda) * self.r as f64;
        let (ip, iq) = (self.p.reciprocal(), self.q.reciprocal());
        // p <= q  <=>  1/p >= 1/q
        let delta = if ip >= iq {
            (1.0 - 1.0 / self.lambda) * (ip - iq)
        } else {
            (1.0 / self.lambda) * (iq - ip)
        };
        RateExponents { r_lambda, delta, r_lambda_pq: r_lambda - delta }
    }

    /// Freud number `q_m = (m / (a lambda))^{1/lambda}`.
    pub fn freud_number(&self, m: f64) -> f64 {
        libm::pow(m / (self.a * self.lambda), 1.0 / self.lambda)
    }

    /// `nu_lambda = 2^{lambda-1} Gamma(lambda/2)^2 / Gamma(lambda)`.
    pub fn mrs_constant(&self) -> f64 {
        let l = self.lambda;
        libm::exp((l - 1.0) * core::f64::consts::LN_2 + 2.0 * libm::lgamma(l / 2.0) - libm::lgamma(l))
    }

    /// Mhaskar-Rakhmanov-Saff number `a_m = (nu_lambda m)^{1/lambda}`.
    pub fn mrs_number(&self, m: f64) -> f64 {
        libm::pow(self.mrs_constant() * m, 1.0 / self.lambda)
    }

    /// Total mass `int w^2 dx = 2 e^{2b} Gamma(1 + 1/lambda) / (2a)^{1/lambda}`.
    pub fn mass(&self) -> f64 {
        2.0 * libm::exp(2.0 * self.b + libm::lgamma(1.0 + 1.0 / self.lambda))
            / libm::pow(2.0 * self.a, 1.0 / self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, a: f64, b: f64, d: usize) -> WeightParams {
        WeightParams::new(lambda, a, b, d, 2, LpIndex::Finite(2.0), LpIndex::Finite(2.0)).unwrap()
    }

    fn rates(lambda: f64, p: LpIndex, q: LpIndex) -> RateExponents {
        WeightParams::new(lambda, 1.0, 0.0, 1, 2, p, q).unwrap().rate_exponents()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(params(2.0, 0.5, 0.0, 1).weight_eval(&[0.0]), 1.0);
        assert!((params(4.0, 1.0, 1.0, 1).weight_eval(&[1.0]) - 1.0).abs() < 1e-15);
        let v = params(2.0, 0.5, 0.0, 2).weight_eval(&[1.0, 1.0]);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rate_exponent_examples() {
        let f = LpIndex::Finite;
        let e = rates(2.0, f(2.0), f(2.0));
        assert_eq!((e.r_lambda, e.delta, e.r_lambda_pq), (1.0, 0.0, 1.0));
        let e = rates(2.0, f(1.0), f(2.0));
        assert!((e.delta - 0.25).abs() < 1e-15 && (e.r_lambda_pq - 0.75).abs() < 1e-15);
        let e = rates(2.0, f(2.0), f(1.0));
        assert!((e.delta - 0.25).abs() < 1e-15 && (e.r_lambda_pq - 0.75).abs() < 1e-15);
        let e = rates(3.0, f(2.0), LpIndex::Infinity);
        assert!((e.delta - (2.0 / 3.0) * 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let f = LpIndex::Finite(2.0);
        assert!(WeightParams::new(1.0, 1.0, 0.0, 1, 1, f, f).is_err());
        assert!(WeightParams::new(0.5, 1.0, 0.0, 1, 1, f, f).is_err());
        assert!(WeightParams::new(2.0, 0.0, 0.0, 1, 1, f, f).is_err());
        assert!(WeightParams::new(2.0, 1.0, 0.0, 0, 1, f, f).is_err());
        assert!(WeightParams::new(2.0, 1.0, 0.0, 1, 0, f, f).is_err());
        assert!(LpIndex::new(0.5).is_err());
        assert_eq!(LpIndex::new(f64::INFINITY).unwrap(), LpIndex::Infinity);
    }

    #[test]
    fn freud_and_mrs_examples() {
        assert!((params(2.0, 0.5, 0.0, 1).freud_number(4.0) - 2.0).abs() < 1e-15);
        let p2 = params(2.0, 0.5, 0.0, 1);
        assert!((p2.mrs_constant() - 2.0).abs() < 1e-14);
        assert!((p2.mrs_number(2.0) - 2.0).abs() < 1e-14);
        // (4/3)^{1/4}, 50-digit reference
        let p4 = params(4.0, 0.5, 0.0, 1);
        assert!((p4.mrs_number(1.0) - 1.074_569_931_823_541_9).abs() < 1e-14);
    }

    #[test]
    fn exponents_on_grid() {
        let grid = [1.0, 1.5, 2.0, 3.0, 7.0, f64::INFINITY];
        for &lambda in &[1.5, 2.0, 3.0, 4.0] {
            for &p in &grid {
                for &q in &grid {
                    let (lp, lq) = (LpIndex::new(p).unwrap(), LpIndex::new(q).unwrap());
                    let e = rates(lambda, lp, lq);
                    assert!(e.delta >= 0.0);
                    assert!(e.r_lambda_pq <= e.r_lambda);
                    assert_eq!(e.delta == 0.0, p == q);
                    let swapped = rates(lambda, lq, lp);
                    if p != q {
                        let symmetric = (e.delta - swapped.delta).abs() < 1e-15;
                        assert_eq!(symmetric, lambda == 2.0, "lambda={lambda} p={p} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn freud_and_mrs_scale_like_power() {
        for &lambda in &[1.5, 2.0, 4.0, 6.0] {
            let w = params(lambda, 0.7, 0.3, 1);
            let (q1, a1) = (w.freud_number(1.0), w.mrs_number(1.0));
            let mut prev = (0.0, 0.0);
            for m in 1..200 {
                let mf = m as f64;
                let (qm, am) = (w.freud_number(mf), w.mrs_number(mf));
                assert!(qm > prev.0 && am > prev.1);
                let scale = libm::pow(mf, 1.0 / lambda);
                assert!((qm / scale - q1).abs() < 1e-12);
                assert!((am / scale - a1).abs() < 1e-12);
                prev = (qm, am);
            }
        }
    }

    #[test]
    fn mass_closed_form() {
        let w = params(2.0, 0.5, 0.0, 1);
        assert!((w.mass() - core::f64::consts::PI.sqrt()).abs() < 1e-14);
    }
}
