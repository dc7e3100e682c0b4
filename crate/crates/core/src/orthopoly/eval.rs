use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::RecurrenceTable;

const RESCALE_BITS: i32 = 512;
const RESCALE_AT: f64 = 1.340_780_792_994_259_7e154; // 2^512
const SQUARE_RESCALE_BITS: i32 = 128;
const SQUARE_RESCALE_AT: f64 = 3.402_823_669_209_385e38; // 2^128

/// `mantissa * 2^exponent`; never saturates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub exponent: i32,
}

impl ScaledValue {
    /// May return an IEEE infinity.
    pub fn to_f64(self) -> f64 {
        libm::ldexp(self.mantissa, self.exponent)
    }

    /// `ln |value|`.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.exponent as f64 * core::f64::consts::LN_2
    }
}

/// `p_k(x) e^{L}` and `p_k'(x) e^{L}` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct WeightedValues {
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl RecurrenceTable {
    /// `p_k(x)` straight from the recurrence; overflows to infinity for
    /// large `k |x|`.
    pub fn eval_orthonormal(&self, k: usize, x: f64) -> f64 {
        assert!(k <= self.len(), "degree {k} beyond table length {}", self.len());
        let beta = self.beta();
        let mut prev = 0.0;
        let mut cur = 1.0 / beta[0].sqrt();
        for j in 0..k {
            let next = (x * cur - if j > 0 { beta[j].sqrt() * prev } else { 0.0 }) / beta[j + 1].sqrt();
            prev = cur;
            cur = next;
            if !cur.is_finite() {
                break;
            }
        }
        cur
    }

    /// `p_k(x)` as mantissa and binary exponent.
    pub fn eval_scaled(&self, k: usize, x: f64) -> ScaledValue {
        assert!(k <= self.len(), "degree {k} beyond table length {}", self.len());
        let beta = self.beta();
        let mut prev = 0.0;
        let mut cur = 1.0 / beta[0].sqrt();
        let mut exponent = 0;
        for j in 0..k {
            let next = (x * cur - if j > 0 { beta[j].sqrt() * prev } else { 0.0 }) / beta[j + 1].sqrt();
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_AT {
                cur = libm::ldexp(cur, -RESCALE_BITS);
                prev = libm::ldexp(prev, -RESCALE_BITS);
                exponent += RESCALE_BITS;
            }
        }
        ScaledValue { mantissa: cur, exponent }
    }

    /// `p_0(x), ..., p_n(x)` into `out`, unscaled.
    pub fn eval_all(&self, n: usize, x: f64, out: &mut [f64]) {
        assert!(n <= self.len() && out.len() > n);
        let beta = self.beta();
        out[0] = 1.0 / beta[0].sqrt();
        if n >= 1 {
            out[1] = x * out[0] / beta[1].sqrt();
        }
        for j in 1..n {
            out[j + 1] = (x * out[j] - beta[j].sqrt() * out[j - 1]) / beta[j + 1].sqrt();
        }
    }

    /// `p_k(x) e^{log_scale}` and the derivatives `p_k'(x) e^{log_scale}`
    /// for `k = 0..=n`. Intermediate growth is absorbed into a running log
    /// offset, so the products stay finite whenever the true values are.
    pub fn weighted_values(&self, n: usize, x: f64, log_scale: f64) -> WeightedValues {
        assert!(n <= self.len(), "degree {n} beyond table length {}", self.len());
        let beta = self.beta();
        let mut values = Vec::with_capacity(n + 1);
        let mut derivatives = Vec::with_capacity(n + 1);
        let emit = |m: f64, offset: f64| -> f64 {
            if m == 0.0 {
                0.0
            } else {
                (m.abs().ln() + offset).exp().copysign(m)
            }
        };
        let mut offset = log_scale;
        let (mut p_prev, mut p_cur) = (0.0, 1.0 / beta[0].sqrt());
        let (mut d_prev, mut d_cur) = (0.0, 0.0);
        values.push(emit(p_cur, offset));
        derivatives.push(0.0);
        for j in 0..n {
            let sb = if j > 0 { beta[j].sqrt() } else { 0.0 };
            let inv = 1.0 / beta[j + 1].sqrt();
            let p_next = (x * p_cur - sb * p_prev) * inv;
            let d_next = (p_cur + x * d_cur - sb * d_prev) * inv;
            p_prev = p_cur;
            p_cur = p_next;
            d_prev = d_cur;
            d_cur = d_next;
            let big = p_cur.abs().max(d_cur.abs());
            if big > RESCALE_AT {
                let f = libm::ldexp(1.0, -RESCALE_BITS);
                p_prev *= f;
                p_cur *= f;
                d_prev *= f;
                d_cur *= f;
                offset += RESCALE_BITS as f64 * core::f64::consts::LN_2;
            }
            values.push(emit(p_cur, offset));
            derivatives.push(emit(d_cur, offset));
        }
        WeightedValues { values, derivatives }
    }

    /// `e^{log_scale} sum_k coeffs[k] p_k(x)`, with the same overflow
    /// protection as [`weighted_values`](Self::weighted_values).
    pub fn weighted_sum(&self, coeffs: &[f64], x: f64, log_scale: f64) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        let n = coeffs.len() - 1;
        assert!(n <= self.len(), "degree {n} beyond table length {}", self.len());
        let beta = self.beta();
        let mut offset = log_scale;
        let (mut prev, mut cur) = (0.0, 1.0 / beta[0].sqrt());
        let mut sum = coeffs[0] * cur;
        for j in 0..n {
            let sb = if j > 0 { beta[j].sqrt() } else { 0.0 };
            let next = (x * cur - sb * prev) / beta[j + 1].sqrt();
            prev = cur;
            cur = next;
            sum += coeffs[j + 1] * cur;
            if cur.abs() > RESCALE_AT {
                let f = libm::ldexp(1.0, -RESCALE_BITS);
                prev *= f;
                cur *= f;
                sum *= f;
                offset += RESCALE_BITS as f64 * core::f64::consts::LN_2;
            }
        }
        if sum == 0.0 {
            0.0
        } else {
            (sum.abs().ln() + offset).exp().copysign(sum)
        }
    }

    /// `ln sum_{k<n} p_k(x)^2`, overflow safe.
    pub(crate) fn ln_christoffel_sum(&self, n: usize, x: f64) -> f64 {
        let beta = self.beta();
        let mut prev = 0.0;
        let mut cur = 1.0 / beta[0].sqrt();
        let mut sum = cur * cur;
        let mut exponent = 0i32;
        for j in 0..n.saturating_sub(1) {
            let next = (x * cur - if j > 0 { beta[j].sqrt() * prev } else { 0.0 }) / beta[j + 1].sqrt();
            prev = cur;
            cur = next;
            sum += cur * cur;
            // Squares overflow well before the values do, so rescale early.
            if cur.abs() > SQUARE_RESCALE_AT {
                cur = libm::ldexp(cur, -SQUARE_RESCALE_BITS);
                prev = libm::ldexp(prev, -SQUARE_RESCALE_BITS);
                sum = libm::ldexp(sum, -2 * SQUARE_RESCALE_BITS);
                exponent += SQUARE_RESCALE_BITS;
            }
        }
        sum.ln() + 2.0 * exponent as f64 * core::f64::consts::LN_2
    }
}
