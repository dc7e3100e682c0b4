//! Empirical constants of the Markov-Bernstein and Nikolskii inequalities
//! and of the `L_q` bound for dyadic sums.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::norms::{lq_norm, NormOptions, Target};
use crate::error::{Error, Result};
use crate::linalg::top_singular;
use crate::orthopoly::Basis;
use crate::spectral::{CoeffTensor, MultiIndex};
use crate::weights::LpIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// `||phi'||_p / (m^{1 - 1/lambda} ||phi||_p)`.
    Bernstein,
    /// `||phi||_q / (m^e ||phi||_p)` with `e = (1 - 1/lambda)(1/p - 1/q)` for
    /// `p < q` and `e = (1/lambda)(1/q - 1/p)` for `q < p`.
    Nikolskii,
    /// `||f||_q / (sum_k ||2^{delta |k|_1} phi_k||_p^q)^{1/q}` for
    /// `f = sum_k phi_k`, `phi_k` of coordinate degrees `2^{k_j}`, `|k|_inf <= log2 m`.
    LqLpSum,
}

/// One row of a probe table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub degree: usize,
    /// Largest normalized ratio over all candidates.
    pub observed_max: f64,
    /// The normalized ratio for `phi = p_m` (Bernstein, Nikolskii), or for
    /// unit constant terms in every block (dyadic sums).
    pub monomial: f64,
    /// Power of `m` divided out of the raw ratio.
    pub exponent: f64,
}

/// What to probe and how hard.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub kind: ProbeKind,
    pub p: LpIndex,
    /// Unused by the Bernstein probe.
    pub q: LpIndex,
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

/// Runs `trials` standard normal draws in the orthonormal basis per degree.
///
/// Draws for degree `m` come from ChaCha8 seeded with `seed` on stream `m`,
/// so each row is reproducible on its own. For `p = 2` the known extremal
/// polynomial is added as a candidate: the top singular vector of the
/// derivative matrix (Bernstein) or the Christoffel kernel (`2 -> inf`).
pub fn inequality_probe(basis: &Basis, spec: &ProbeSpec, opts: &NormOptions) -> Result<Vec<ProbeRow>> {
    let ProbeSpec { kind, p, q, ref degrees, trials, seed } = *spec;
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "must be at least 1" });
    }
    if degrees.iter().any(|&m| m < 2) {
        return Err(Error::InvalidParameter { name: "degrees", reason: "must be at least 2" });
    }
    let lambda = basis.params().lambda();
    let (ip, iq) = (p.reciprocal(), q.reciprocal());
    let exponent = match kind {
        ProbeKind::Bernstein => 1.0 - 1.0 / lambda,
        ProbeKind::Nikolskii if ip > iq => (1.0 - 1.0 / lambda) * (ip - iq),
        ProbeKind::Nikolskii if ip < iq => (iq - ip) / lambda,
        ProbeKind::Nikolskii => {
            return Err(Error::InvalidParameter { name: "q", reason: "Nikolskii probe needs p != q" });
        }
        ProbeKind::LqLpSum => {
            if p.is_infinite() || q.is_infinite() || ip == iq {
                return Err(Error::InvalidParameter { name: "q", reason: "dyadic sum probe needs finite p != q" });
            }
            0.0
        }
    };
    degrees
        .iter()
        .map(|&m| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(m as u64);
            match kind {
                ProbeKind::Bernstein => bernstein_row(basis, p, m, exponent, trials, &mut rng, opts),
                ProbeKind::Nikolskii => nikolskii_row(basis, p, q, m, exponent, trials, &mut rng, opts),
                ProbeKind::LqLpSum => dyadic_row(basis, p, q, m, trials, &mut rng, opts),
            }
        })
        .collect()
}

fn check_degree(basis: &Basis, m: usize) -> Result<()> {
    if m + 1 > basis.max_degree() {
        return Err(Error::TableTooShort { needed: m + 1, available: basis.max_degree() });
    }
    Ok(())
}

fn univariate(coeffs: &[f64]) -> CoeffTensor {
    CoeffTensor::from_univariate(coeffs)
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn unit(m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m + 1];
    v[m] = 1.0;
    v
}

fn bernstein_row(
    basis: &Basis,
    p: LpIndex,
    m: usize,
    exponent: f64,
    trials: usize,
    rng: &mut ChaCha8Rng,
    opts: &NormOptions,
) -> Result<ProbeRow> {
    check_degree(basis, m)?;
    let one_d = basis.params().with_dim(1)?;
    let basis = Basis::from_table(one_d, basis.table().clone());
    let dmat = basis.differentiation_matrix(m)?;
    let scale = (m as f64).powf(exponent);
    let ratio = |c: &[f64]| -> Result<f64> {
        let num = lq_norm(&basis, Target::Expansion(&univariate(&dmat.apply(c))), p, opts)?;
        let den = lq_norm(&basis, Target::Expansion(&univariate(c)), p, opts)?;
        Ok(num / (scale * den))
    };
    let monomial = ratio(&unit(m))?;
    let mut best = monomial;
    for _ in 0..trials {
        best = best.max(ratio(&gaussian_vec(rng, m + 1))?);
    }
    if p == LpIndex::Finite(2.0) {
        let (_, v) = top_singular(dmat.column_major(), m + 1);
        best = best.max(ratio(&v)?);
    }
    Ok(ProbeRow { degree: m, observed_max: best, monomial, exponent })
}

#[allow(clippy::too_many_arguments)]
fn nikolskii_row(
    basis: &Basis,
    p: LpIndex,
    q: LpIndex,
    m: usize,
    exponent: f64,
    trials: usize,
    rng: &mut ChaCha8Rng,
    opts: &NormOptions,
) -> Result<ProbeRow> {
    check_degree(basis, m)?;
    let one_d = basis.params().with_dim(1)?;
    let basis = Basis::from_table(one_d, basis.table().clone());
    let scale = (m as f64).powf(exponent);
    let ratio = |c: &[f64]| -> Result<f64> {
        let t = univariate(c);
        let num = lq_norm(&basis, Target::Expansion(&t), q, opts)?;
        let den = lq_norm(&basis, Target::Expansion(&t), p, opts)?;
        Ok(num / (scale * den))
    };
    let monomial = ratio(&unit(m))?;
    let mut best = monomial;
    for _ in 0..trials {
        best = best.max(ratio(&gaussian_vec(rng, m + 1))?);
    }
    if p == LpIndex::Finite(2.0) && q.is_infinite() {
        // sup over phi of ||phi w||_inf / ||phi||_2 = sup_x w(x) sqrt(K_{m+1}(x, x))
        best = best.max(christoffel_sup(&basis, m) / scale);
    }
    Ok(ProbeRow { degree: m, observed_max: best, monomial, exponent })
}

/// `sup_x w(x) (sum_{k<=m} p_k(x)^2)^{1/2}` by sampling and golden section.
fn christoffel_sup(basis: &Basis, m: usize) -> f64 {
    let params = basis.params();
    let g = |x: f64| (0.5 * basis.table().ln_christoffel_sum(m + 1, x) + params.log_weight_1d(x)).exp();
    let radius = 2.0 * params.mrs_number(m as f64);
    let samples = 64 * (m + 1);
    let h = radius / samples as f64;
    let (mut best_x, mut best) = (0.0, g(0.0));
    for i in 1..=samples {
        let x = i as f64 * h;
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut lo, mut hi) = ((best_x - h).max(0.0), best_x + h);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if g(x1) >= g(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.max(g(0.5 * (lo + hi)))
}

fn dyadic_row(
    basis: &Basis,
    p: LpIndex,
    q: LpIndex,
    m: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
    opts: &NormOptions,
) -> Result<ProbeRow> {
    check_degree(basis, m)?;
    let params = basis.params();
    let dim = params.dim();
    let (ip, iq) = (p.reciprocal(), q.reciprocal());
    let lambda = params.lambda();
    let delta = if ip >= iq { (1.0 - 1.0 / lambda) * (ip - iq) } else { (iq - ip) / lambda };
    let levels = usize::BITS - 1 - m.leading_zeros();
    let qv = q.value();
    let blocks: Vec<Vec<u32>> = block_indices(dim, levels);

    let ratio = |draw: &mut dyn FnMut(&MultiIndex) -> f64| -> Result<f64> {
        let mut f = CoeffTensor::new(dim);
        let mut denom = Vec::with_capacity(blocks.len());
        for k in &blocks {
            let top = MultiIndex::new(k.iter().map(|&l| 1u32 << l).collect());
            let mut phi = CoeffTensor::new(dim);
            for idx in box_indices(&top) {
                let _ = phi.insert(idx.clone(), draw(&idx));
            }
            let l1: u32 = k.iter().sum();
            let scaled = phi.scaled(2f64.powf(delta * f64::from(l1)));
            denom.push(lq_norm(basis, Target::Expansion(&scaled), p, opts)?.powf(qv));
            f = f.axpy(1.0, &phi)?;
        }
        let num = lq_norm(basis, Target::Expansion(&f), q, opts)?;
        Ok(num / crate::math::sum2(denom).powf(1.0 / qv))
    };
    let monomial = ratio(&mut |idx: &MultiIndex| if idx.l1() == 0 { 1.0 } else { 0.0 })?;
    let mut best = monomial;
    for _ in 0..trials {
        best = best.max(ratio(&mut |_: &MultiIndex| rng.sample::<f64, _>(StandardNormal))?);
    }
    Ok(ProbeRow { degree: m, observed_max: best, monomial, exponent: 0.0 })
}

/// Dyadic levels `k in {0..levels}^d`.
fn block_indices(dim: usize, levels: u32) -> Vec<Vec<u32>> {
    let top = MultiIndex::new(vec![levels; dim]);
    box_indices(&top).into_iter().map(|k| k.as_slice().to_vec()).collect()
}

fn box_indices(top: &MultiIndex) -> Vec<MultiIndex> {
    let dim = top.dim();
    let mut out = Vec::new();
    let mut idx = vec![0u32; dim];
    loop {
        out.push(MultiIndex::from(idx.as_slice()));
        let mut j = dim;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if idx[j] < top[j] {
                idx[j] += 1;
                break;
            }
            idx[j] = 0;
        }
    }
}
