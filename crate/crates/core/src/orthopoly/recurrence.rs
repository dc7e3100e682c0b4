use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{dot2, gauss_legendre, sum2};
use crate::weights::WeightParams;

/// Recurrence coefficients `beta[0..=N]` of the orthonormal polynomials for
/// `w^2`. `beta[0]` is the total mass, `beta[k] > 0` the squared
/// off-diagonal of the Jacobi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    beta: Vec<f64>,
}

impl RecurrenceTable {
    pub fn from_beta(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() || beta.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter { name: "beta", reason: "coefficients must be positive and finite" });
        }
        Ok(RecurrenceTable { beta })
    }

    /// `N`, the highest recurrence index stored.
    pub fn len(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.beta.len() == 1
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn zeroth_norm(&self) -> f64 {
        self.beta[0].sqrt()
    }

    pub fn truncated(&self, n: usize) -> RecurrenceTable {
        RecurrenceTable { beta: self.beta[..=n.min(self.len())].to_vec() }
    }
}

/// Closed form for `lambda = 2`: `beta_0 = e^{2b} sqrt(pi/(2a))`,
/// `beta_k = k/(4a)`.
pub fn hermite_recurrence(params: &WeightParams, n: usize) -> Result<RecurrenceTable> {
    if params.lambda() != 2.0 {
        return Err(Error::WrongLambda { expected: 2.0, found: params.lambda() });
    }
    let a = params.a();
    let mut beta = Vec::with_capacity(n + 1);
    beta.push((2.0 * params.b()).exp() * (core::f64::consts::PI / (2.0 * a)).sqrt());
    beta.extend((1..=n).map(|k| k as f64 / (4.0 * a)));
    RecurrenceTable::from_beta(beta)
}

#[derive(Debug, Clone, Copy)]
pub struct StieltjesOptions {
    /// Largest `N` accepted.
    pub max_degree: usize,
    /// Gauss-Legendre points per panel.
    pub panel_order: usize,
    /// Relative change of every `beta_k` between refinements.
    pub tolerance: f64,
    pub max_refinements: usize,
    /// Truncation radius in units of the MRS number `a_N`.
    pub radius_factor: f64,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        StieltjesOptions { max_degree: 1000, panel_order: 20, tolerance: 1e-12, max_refinements: 8, radius_factor: 3.0 }
    }
}

pub fn stieltjes_recurrence(params: &WeightParams, n: usize) -> Result<RecurrenceTable> {
    stieltjes_recurrence_with(params, n, &StieltjesOptions::default())
}

/// Discretized Stieltjes procedure (Lanczos form, with reorthogonalization
/// and compensated inner products) on `[-R, R]`, `R = radius_factor * a_N`
/// (widened, if needed, to where `w^2` underflows).
/// The panel count doubles until every coefficient is stable.
pub fn stieltjes_recurrence_with(params: &WeightParams, n: usize, opts: &StieltjesOptions) -> Result<RecurrenceTable> {
    if n > opts.max_degree {
        return Err(Error::InvalidParameter { name: "N", reason: "exceeds the configured maximum degree" });
    }
    // Beyond `underflow` the weight itself is below 1e-304.
    let underflow = (700.0 / (2.0 * params.a())).powf(1.0 / params.lambda());
    let radius = (opts.radius_factor * params.mrs_number(n.max(1) as f64)).max(underflow);
    let mut panels = (n / 4).max(8);
    let mut prev: Option<Vec<f64>> = None;
    let mut last_change = f64::INFINITY;
    for _ in 0..=opts.max_refinements {
        let (x, w) = discretize(params, radius, panels, opts.panel_order);
        let beta = lanczos(&x, &w, n);
        if let Some(p) = &prev {
            last_change = p
                .iter()
                .zip(&beta)
                .map(|(a, b)| ((a - b) / b).abs())
                .fold(0.0, f64::max);
            if last_change <= opts.tolerance {
                let mut beta = beta;
                beta[0] *= (2.0 * params.b()).exp();
                return RecurrenceTable::from_beta(beta);
            }
        }
        prev = Some(beta);
        panels *= 2;
    }
    Err(Error::NonConvergence { what: "stieltjes discretization", detail: last_change })
}

/// Symmetric discrete measure approximating `exp(-2a|x|^lambda) dx` on
/// `[-R, R]` (the `e^{2b}` factor is applied to `beta_0` afterwards).
fn discretize(params: &WeightParams, radius: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = radius / panels as f64;
    let mut edges: Vec<f64> = Vec::new();
    let even_integer = params.lambda().fract() == 0.0 && (params.lambda() as i64) % 2 == 0;
    if even_integer {
        edges.push(0.0);
    } else {
        // |x|^lambda is not smooth at the origin: grade the first panel.
        edges.push(0.0);
        let levels = 14;
        for l in (1..=levels).rev() {
            edges.push(h * 0.15f64.powi(l));
        }
    }
    edges.extend((1..=panels).map(|i| i as f64 * h));

    let two_a = 2.0 * params.a();
    let lambda = params.lambda();
    let mut half_x = Vec::new();
    let mut half_w = Vec::new();
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let (mid, len) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (t, wt) in gx.iter().zip(&gw) {
            let x = mid + len * t;
            let weight = wt * len * (-two_a * x.powf(lambda)).exp();
            if weight > 0.0 {
                half_x.push(x);
                half_w.push(weight);
            }
        }
    }
    let mut x = Vec::with_capacity(2 * half_x.len());
    let mut w = Vec::with_capacity(2 * half_x.len());
    for i in (0..half_x.len()).rev() {
        x.push(-half_x[i]);
        w.push(half_w[i]);
    }
    x.extend_from_slice(&half_x);
    w.extend_from_slice(&half_w);
    (x, w)
}

/// Lanczos on `diag(x)` started from `sqrt(w)`; returns `beta[0..=n]`.
fn lanczos(x: &[f64], w: &[f64], n: usize) -> Vec<f64> {
    let m = x.len();
    let mass = sum2(w.iter().copied());
    let mut beta = Vec::with_capacity(n + 1);
    beta.push(mass);
    let s = mass.sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    basis.push(w.iter().map(|wi| wi.sqrt() / s).collect());
    let mut u = vec![0.0; m];
    for k in 0..n {
        let qk = &basis[k];
        for i in 0..m {
            u[i] = x[i] * qk[i];
        }
        if k > 0 {
            let sb = beta[k].sqrt();
            let qp = &basis[k - 1];
            for i in 0..m {
                u[i] -= sb * qp[i];
            }
        }
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for q in basis.iter() {
                let c = dot2(q, &u);
                for i in 0..m {
                    u[i] -= c * q[i];
                }
            }
        }
        let b = dot2(&u, &u);
        beta.push(b);
        let nb = b.sqrt();
        basis.push(u.iter().map(|v| v / nb).collect());
    }
    beta
}

/// Maximum residual of Freud's string relation
/// `4 b_n (b_{n-1} + b_n + b_{n+1}) = n` (`b_0 := 0`) for the coefficients
/// rescaled to the normalized weight `exp(-t^4)`, `t = (2a)^{1/4} x`.
pub fn validate_string_equation(table: &RecurrenceTable, params: &WeightParams) -> Result<f64> {
    Ok(string_residuals(table, params)?.into_iter().fold(0.0, f64::max))
}

/// Per-`n` residuals for `n = 1..N-1`.
pub fn string_residuals(table: &RecurrenceTable, params: &WeightParams) -> Result<Vec<f64>> {
    if params.lambda() != 4.0 {
        return Err(Error::WrongLambda { expected: 4.0, found: params.lambda() });
    }
    let scale = (2.0 * params.a()).sqrt();
    let bt = |k: usize| if k == 0 { 0.0 } else { table.beta()[k] * scale };
    Ok((1..table.len())
        .map(|n| (4.0 * bt(n) * (bt(n - 1) + bt(n) + bt(n + 1)) - n as f64).abs())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(lambda: f64, a: f64, b: f64) -> WeightParams {
        WeightParams::univariate(lambda, a, b).unwrap()
    }

    #[test]
    fn hermite_examples() {
        let t = hermite_recurrence(&weight(2.0, 0.5, 0.0), 4).unwrap();
        let pi = core::f64::consts::PI;
        assert!((t.beta()[0] - pi.sqrt()).abs() < 1e-15);
        assert!((t.beta()[1] - 0.5).abs() < 1e-15);
        assert!((t.beta()[2] - 1.0).abs() < 1e-15);
        assert!((1.0 / t.zeroth_norm() - pi.powf(-0.25)).abs() < 1e-15);
        let t = hermite_recurrence(&weight(2.0, 1.0, 0.0), 2).unwrap();
        assert!((t.beta()[1] - 0.25).abs() < 1e-15);
        assert!(matches!(
            hermite_recurrence(&weight(4.0, 1.0, 0.0), 2),
            Err(Error::WrongLambda { .. })
        ));
    }

    #[test]
    fn stieltjes_matches_hermite() {
        let p = weight(2.0, 0.5, 0.0);
        let s = stieltjes_recurrence(&p, 20).unwrap();
        let h = hermite_recurrence(&p, 20).unwrap();
        for (a, b) in s.beta().iter().zip(h.beta()) {
            assert!(((a - b) / b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn stieltjes_quartic_reference() {
        // exp(-t^4): beta_k by moment-based recursion in 80-digit arithmetic.
        const REF: [f64; 8] = [
            1.812_804_954_110_954_156,
            0.337_989_120_033_642_364_5,
            0.401_679_659_763_517_358_58,
            0.505_104_232_344_822_297_82,
            0.578_058_150_331_711_321_1,
            0.646_767_382_047_244_970_38,
            0.707_863_150_905_152_461_54,
            0.764_423_126_052_077_323_41,
        ];
        let t = stieltjes_recurrence(&weight(4.0, 0.5, 0.0), 7).unwrap();
        for (k, r) in REF.iter().enumerate() {
            assert!(((t.beta()[k] - r) / r).abs() < 1e-13, "k={k}: {} vs {r}", t.beta()[k]);
        }
    }

    #[test]
    fn zero_length_table_is_the_mass() {
        for &lambda in &[1.5, 2.0, 3.0, 4.0] {
            let p = weight(lambda, 0.8, 0.2);
            let t = stieltjes_recurrence(&p, 0).unwrap();
            assert_eq!(t.len(), 0);
            assert!(((t.beta()[0] - p.mass()) / p.mass()).abs() < 1e-12, "lambda={lambda}");
        }
    }

    #[test]
    fn b_shift_only_scales_the_mass() {
        let t0 = stieltjes_recurrence(&weight(4.0, 0.7, 0.0), 30).unwrap();
        let t1 = stieltjes_recurrence(&weight(4.0, 0.7, 0.9), 30).unwrap();
        assert!((t1.beta()[0] / t0.beta()[0] - (1.8f64).exp()).abs() < 1e-13);
        assert_eq!(&t0.beta()[1..], &t1.beta()[1..]);
    }

    #[test]
    fn string_equation_on_converged_table() {
        let p = weight(4.0, 0.5, 0.0);
        let t = stieltjes_recurrence(&p, 50).unwrap();
        assert!(validate_string_equation(&t, &p).unwrap() <= 1e-8);

        let mut beta = t.beta().to_vec();
        beta[1] += 1e-3;
        let bad = RecurrenceTable::from_beta(beta).unwrap();
        assert!(validate_string_equation(&bad, &p).unwrap() >= 1e-3);

        let short = t.truncated(2);
        assert_eq!(string_residuals(&short, &p).unwrap().len(), 1);
        assert!(validate_string_equation(&t, &weight(2.0, 0.5, 0.0)).is_err());
    }

    #[test]
    fn rejects_degree_above_maximum() {
        let opts = StieltjesOptions { max_degree: 10, ..Default::default() };
        assert!(stieltjes_recurrence_with(&weight(4.0, 0.5, 0.0), 11, &opts).is_err());
    }
}
