//! `||f - A f||_{L_q,w}` for the diagonal operators `A` of the spectral module.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::coeffs::{coefficients_from_oracle, COEFF_TOL};
use super::norms::{lq_norm, NormOptions, Target};
use super::oracle::FunctionOracle;
use crate::error::{Error, Result};
use crate::math::{hurwitz_zeta, sum2};
use crate::orthopoly::Basis;
use crate::spectral::{CoeffTensor, CrossFamily, GTruncation, HyperbolicOperator, Levels, MultiIndex, Multiplier1D};
use crate::weights::LpIndex;

/// A diagonal approximation operator on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproxOperator {
    /// `m_1 (x) ... (x) m_d`.
    Tensor(Vec<Multiplier1D>),
    Hyperbolic(HyperbolicOperator),
    Truncate(GTruncation),
}

impl ApproxOperator {
    pub fn gain(&self, k: &[u32]) -> f64 {
        match self {
            ApproxOperator::Tensor(ms) => ms.iter().zip(k).map(|(m, &kj)| m.gain(u64::from(kj))).product(),
            ApproxOperator::Hyperbolic(op) => op.gain(k),
            ApproxOperator::Truncate(t) => {
                if t.contains(k) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ApproxOperator::Tensor(ms) => ms.len(),
            ApproxOperator::Hyperbolic(op) => op.dim(),
            ApproxOperator::Truncate(t) => t.dim(),
        }
    }

    pub fn apply(&self, coeffs: &CoeffTensor) -> Result<CoeffTensor> {
        if coeffs.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coeffs.dim() });
        }
        Ok(coeffs.map_gain(|k| self.gain(k)))
    }
}

/// `f_hat(k) = prod_j (k_j + 1)^{-s}` on `R^d`, `s > 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableLaw {
    pub dim: usize,
    pub s: f64,
}

impl SeparableLaw {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
        }
        if !(s > 0.5) {
            return Err(Error::InvalidParameter { name: "s", reason: "coefficient law needs s > 1/2" });
        }
        Ok(SeparableLaw { dim, s })
    }

    pub fn coeff(&self, k: &[u32]) -> f64 {
        k.iter().map(|&kj| (f64::from(kj) + 1.0).powf(-self.s)).product()
    }

    /// `g(j) = f_hat_1(j)^2 = (j + 1)^{-2s}`.
    fn sq(&self, j: u64) -> f64 {
        (j as f64 + 1.0).powf(-2.0 * self.s)
    }

    /// `sum_{j >= from} g(j)`.
    fn tail(&self, from: u64) -> f64 {
        hurwitz_zeta(2.0 * self.s, from as f64 + 1.0)
    }

    /// `sum_j g(j) = zeta(2s)`.
    fn total(&self) -> f64 {
        self.tail(0)
    }

    /// `||f||^2 = zeta(2s)^d`.
    pub fn norm_sq(&self) -> f64 {
        self.total().powi(self.dim as i32)
    }

    /// The coefficients on the box `{0..=m}^d`.
    pub fn truncated(&self, m: u32) -> CoeffTensor {
        let mut t = CoeffTensor::new(self.dim);
        let mut idx = vec![0u32; self.dim];
        loop {
            let _ = t.insert(MultiIndex::from(idx.as_slice()), self.coeff(&idx));
            let mut j = self.dim;
            loop {
                if j == 0 {
                    return t;
                }
                j -= 1;
                if idx[j] < m {
                    idx[j] += 1;
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Squared mass at each level of `levels`, up to `max_level`.
    fn level_masses(&self, levels: Levels, max_level: u32) -> Vec<f64> {
        (0..=max_level)
            .map(|l| {
                let (lo, hi) = levels.range(l);
                sum2((lo..=hi).map(|j| self.sq(j)))
            })
            .collect()
    }

    /// `sum` of `g` over `{s : sum_j level(s_j) > budget}`, by recursion on
    /// the first coordinate; every term is non-negative.
    fn outside_mass(&self, levels: Levels, budget: u32) -> f64 {
        let masses = self.level_masses(levels, budget);
        let tails: Vec<f64> = (0..=budget).map(|b| self.tail(levels.range(b).1 + 1)).collect();
        let z = self.total();
        // m[b] for the current number of coordinates
        let mut m: Vec<f64> = tails.clone();
        for d in 2..=self.dim {
            let full = z.powi(d as i32 - 1);
            m = (0..=budget as usize)
                .map(|b| tails[b] * full + sum2((0..=b).map(|l| masses[l] * m[b - l])))
                .collect();
        }
        m[budget as usize]
    }
}

/// How the coefficients of the function to approximate are known.
#[derive(Debug, Clone, Copy)]
pub enum CoefficientSource<'a> {
    /// All non-zero coefficients are listed.
    Finite(&'a CoeffTensor),
    /// A separable power law with infinitely many coefficients.
    Law(SeparableLaw),
    /// Coefficients by quadrature on a reference degree box, doubled until
    /// the tail beyond it moves the error by less than 1% (or by less than
    /// the coefficient accuracy, once the error reaches that floor).
    Oracle { oracle: &'a FunctionOracle, basis: &'a Basis, start_degree: u32 },
}

/// Tail beyond the reference box may change the error by at most this fraction.
pub const TAIL_FRACTION: f64 = 0.01;

/// `||f - A f||_{L_q,w}`.
///
/// `q = 2` is evaluated exactly on coefficients. Other `q` integrate the
/// pointwise residual and need a finite or oracle source (`basis` supplies
/// the weight for that path).
pub fn approx_error(
    source: CoefficientSource<'_>,
    op: &ApproxOperator,
    q: LpIndex,
    basis: Option<&Basis>,
    opts: &NormOptions,
) -> Result<f64> {
    let q2 = q == LpIndex::Finite(2.0);
    match source {
        CoefficientSource::Finite(c) => {
            if c.dim() != op.dim() {
                return Err(Error::DimensionMismatch { expected: op.dim(), found: c.dim() });
            }
            if q2 {
                return Ok(finite_error_sq(c, op).sqrt());
            }
            let basis = basis.ok_or(Error::InvalidParameter { name: "basis", reason: "needed for q != 2" })?;
            let residual = c.map_gain(|k| 1.0 - op.gain(k));
            lq_norm(basis, Target::Expansion(&residual), q, opts)
        }
        CoefficientSource::Law(law) => {
            if law.dim != op.dim() {
                return Err(Error::DimensionMismatch { expected: op.dim(), found: law.dim });
            }
            if !q2 {
                return Err(Error::InvalidParameter { name: "q", reason: "coefficient laws support q = 2 only" });
            }
            Ok(law_error_sq(&law, op)?.sqrt())
        }
        CoefficientSource::Oracle { oracle, basis, start_degree } => {
            if oracle.dim() != op.dim() {
                return Err(Error::DimensionMismatch { expected: op.dim(), found: oracle.dim() });
            }
            let mut m = start_degree.max(1);
            let dim = oracle.dim();
            let coeffs_at = |m: u32| coefficients_from_oracle(oracle, basis, &MultiIndex::new(vec![m; dim]));
            let mut err = oracle_error(oracle, basis, &coeffs_at(m)?, op, q, opts)?;
            loop {
                let next_m = 2 * m;
                let c2 = match coeffs_at(next_m) {
                    Ok(c2) => c2,
                    Err(Error::TableTooShort { .. }) | Err(Error::NonConvergence { .. }) => {
                        let bigger = coeffs_at(m + m / 2).ok();
                        let ratio = match bigger {
                            Some(cb) => {
                                let e = oracle_error(oracle, basis, &cb, op, q, opts)?;
                                if settled(err, e, &cb) {
                                    return Ok(err);
                                }
                                (e - err).abs() / e.max(f64::MIN_POSITIVE)
                            }
                            None => f64::INFINITY,
                        };
                        return Err(Error::TailDominated { ratio });
                    }
                    Err(e) => return Err(e),
                };
                let err2 = oracle_error(oracle, basis, &c2, op, q, opts)?;
                if settled(err, err2, &c2) {
                    return Ok(err2);
                }
                m = next_m;
                err = err2;
            }
        }
    }
}

/// The larger box moves the error by at most [`TAIL_FRACTION`], or by no
/// more than the quadrature accuracy of the coefficients themselves.
fn settled(err: f64, err_bigger: f64, bigger: &CoeffTensor) -> bool {
    let diff = (err_bigger - err).abs();
    diff <= TAIL_FRACTION * err_bigger || diff <= COEFF_TOL * bigger.l2_norm()
}

fn oracle_error(
    oracle: &FunctionOracle,
    basis: &Basis,
    coeffs: &CoeffTensor,
    op: &ApproxOperator,
    q: LpIndex,
    opts: &NormOptions,
) -> Result<f64> {
    if q == LpIndex::Finite(2.0) {
        return Ok(finite_error_sq(coeffs, op).sqrt());
    }
    let approx = op.apply(coeffs)?;
    let opts = NormOptions { abs_tol: opts.abs_tol.max(COEFF_TOL * coeffs.l2_norm()), ..*opts };
    lq_norm(basis, Target::Residual(oracle, &approx), q, &opts)
}

fn finite_error_sq(c: &CoeffTensor, op: &ApproxOperator) -> f64 {
    sum2(c.iter().map(|(k, &v)| {
        let r = (1.0 - op.gain(k.as_slice())) * v;
        r * r
    }))
}

/// Exact `||f - A f||^2` for a coefficient law, as a sum of non-negative terms.
pub fn law_error_sq(law: &SeparableLaw, op: &ApproxOperator) -> Result<f64> {
    match op {
        ApproxOperator::Tensor(ms) => tensor_law_error_sq(law, ms),
        ApproxOperator::Hyperbolic(h) => Ok(match h.family() {
            CrossFamily::Fourier => law.outside_mass(Levels::Block, h.xi()),
            CrossFamily::Vp => law.outside_mass(Levels::Support, h.xi()) + vp_inside_error_sq(law, h.xi()),
        }),
        ApproxOperator::Truncate(t) => Ok(g_complement_mass(law, law.dim, t.product_bound(), &mut BTreeMap::new())),
    }
}

fn tensor_law_error_sq(law: &SeparableLaw, ms: &[Multiplier1D]) -> Result<f64> {
    let bounds: Vec<u64> = ms.iter().map(|m| m.support_bound().ok_or(Error::UnboundedSupport)).collect::<Result<_>>()?;
    if law.dim == 1 {
        let b = bounds[0];
        let inside = sum2((0..b).map(|j| {
            let r = 1.0 - ms[0].gain(j);
            r * r * law.sq(j)
        }));
        return Ok(inside + law.tail(b));
    }
    // box part by enumeration, outside part as a positive telescoping sum
    let mut inside = Vec::new();
    let mut idx = vec![0u64; law.dim];
    if bounds.iter().all(|&b| b > 0) {
        loop {
            let g: f64 = ms.iter().zip(&idx).map(|(m, &j)| m.gain(j)).product();
            let w: f64 = idx.iter().map(|&j| law.sq(j)).product();
            inside.push((1.0 - g) * (1.0 - g) * w);
            let mut j = 0;
            loop {
                if j == law.dim {
                    break;
                }
                idx[j] += 1;
                if idx[j] < bounds[j] {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == law.dim {
                break;
            }
        }
    }
    let z = law.total();
    let mut outside = Vec::new();
    let mut prefix = 1.0;
    for (j, &b) in bounds.iter().enumerate() {
        outside.push(prefix * law.tail(b) * z.powi((law.dim - j - 1) as i32));
        prefix *= sum2((0..b).map(|i| law.sq(i)));
    }
    Ok(sum2(inside) + sum2(outside))
}

/// Error of `V_xi` inside its support. On a box of support levels
/// `l_1..l_d` the gain is `sum_{c : |c| <= xi - |l|} prod_j phi_{c_j}(s_j)`
/// with `phi_0 = v_l`, `phi_1 = v_{l+1}` and `phi_0 + phi_1 = 1`, so
/// `1 - gain = sum_{|c| > xi - |l|} prod_j phi_{c_j}`: a positive sum.
fn vp_inside_error_sq(law: &SeparableLaw, xi: u32) -> f64 {
    let d = law.dim;
    let levels = Levels::Support;
    // moments[l][a][b] = sum_{s at level l} g(s) phi_a(s) phi_b(s)
    let moments: Vec<[[f64; 2]; 2]> = (0..=xi)
        .map(|l| {
            let (lo, hi) = levels.range(l);
            let mut acc = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
            for s in lo..=hi {
                let (p0, p1) = crate::spectral::vp_pair(s);
                let g = law.sq(s);
                let phi = [p0, p1];
                for a in 0..2 {
                    for b in 0..2 {
                        acc[a][b].push(g * phi[a] * phi[b]);
                    }
                }
            }
            let mut m = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    m[a][b] = sum2(acc[a][b].iter().copied());
                }
            }
            m
        })
        .collect();
    let xi_u = xi as usize;
    // state[l][t][u]: coordinates so far use total level l, with t (resp. u)
    // raised coordinates in the first (resp. second) factor
    let mut state = vec![vec![vec![0.0f64; d + 1]; d + 1]; xi_u + 1];
    state[0][0][0] = 1.0;
    for _ in 0..d {
        let mut next = vec![vec![vec![0.0f64; d + 1]; d + 1]; xi_u + 1];
        for l in 0..=xi_u {
            for t in 0..d {
                for u in 0..d {
                    let v = state[l][t][u];
                    if v == 0.0 {
                        continue;
                    }
                    for (nl, m) in moments.iter().enumerate().take(xi_u - l + 1) {
                        for a in 0..2 {
                            for b in 0..2 {
                                next[l + nl][t + a][u + b] += v * m[a][b];
                            }
                        }
                    }
                }
            }
        }
        state = next;
    }
    let mut terms = Vec::new();
    for (l, plane) in state.iter().enumerate() {
        let spare = xi_u - l;
        for (t, row) in plane.iter().enumerate() {
            for (u, &v) in row.iter().enumerate() {
                if t > spare && u > spare {
                    terms.push(v);
                }
            }
        }
    }
    sum2(terms)
}

/// `sum g` over `{k in N_0^d : prod_j (k_j + 1) > bound}`.
fn g_complement_mass(law: &SeparableLaw, d: usize, bound: u64, memo: &mut BTreeMap<(usize, u64), f64>) -> f64 {
    if d == 1 {
        return law.tail(bound);
    }
    if let Some(&v) = memo.get(&(d, bound)) {
        return v;
    }
    let z = law.total();
    let mut terms = vec![law.tail(bound) * z.powi(d as i32 - 1)];
    // group the first factor f = k_1 + 1 by q = bound / f
    let mut f = 1u64;
    while f <= bound {
        let q = bound / f;
        let last = bound / q;
        let weight = sum2((f..=last).map(|x| law.sq(x - 1)));
        terms.push(weight * g_complement_mass(law, d - 1, q, memo));
        f = last + 1;
    }
    let v = sum2(terms);
    memo.insert((d, bound), v);
    v
}
