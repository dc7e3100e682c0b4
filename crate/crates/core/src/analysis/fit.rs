use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// Least-squares fit of `ln e = alpha ln n + gamma ln ln n + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub alpha: f64,
    pub gamma: f64,
    pub intercept: f64,
    /// Euclidean norm of the residual vector in log space.
    pub residual: f64,
}

/// Fits [`RateFit`] to `(n, e_n)` pairs. Needs at least four samples with
/// `n > 1` strictly increasing and `e_n > 0`.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 4 {
        return Err(Error::InvalidParameter { name: "samples", reason: "need at least 4 samples" });
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidParameter { name: "samples", reason: "n must be strictly increasing" });
        }
    }
    if samples.iter().any(|&(n, e)| !(n > 1.0) || !(e > 0.0) || !n.is_finite() || !e.is_finite()) {
        return Err(Error::InvalidParameter { name: "samples", reason: "need n > 1 and e_n > 0" });
    }
    let rows = samples.len();
    let mut a = Vec::with_capacity(rows * 3);
    let mut b = Vec::with_capacity(rows);
    for &(n, e) in samples {
        let ln = n.ln();
        a.extend_from_slice(&[ln, ln.ln(), 1.0]);
        b.push(e.ln());
    }
    let (x, residual) = least_squares(&a, rows, 3, &b).ok_or(Error::DegenerateFit)?;
    Ok(RateFit { alpha: x[0], gamma: x[1], intercept: x[2], residual })
}
