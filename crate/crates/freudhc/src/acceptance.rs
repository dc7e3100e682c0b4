//! The acceptance suite: twelve numbered criteria, each a pass/fail check
//! with its tolerance fixed below.

use std::path::Path;
use std::time::Instant;

use freudhc_core::analysis::{
    coefficients_from_oracle, fit_rate, h_norm, inequality_probe, law_error_sq, sobolev_norm, sobolev_norm_expansion,
    ApproxOperator, NormOptions, ProbeKind, ProbeSpec, SeparableLaw,
};
use freudhc_core::orthopoly::{
    gauss_rule, hermite_recurrence, stieltjes_recurrence, validate_string_equation, Basis, RecurrenceTable,
};
use freudhc_core::spectral::{
    dyadic_vp_gain, index_set_h, index_set_h1, rank_of, CoeffTensor, CrossFamily, HyperbolicOperator, MultiIndex,
    Multiplier1D, OperatorDescriptor,
};
use freudhc_core::widths::exact_diagonal_widths;
use freudhc_core::{LpIndex, WeightParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::corpus::{Coefficients, Corpus};
use crate::error::{HarnessError, Result};
use crate::experiments::run_experiment;

/// The suite shipped with the crate.
pub const SHIPPED_SUITE: &str = include_str!("../acceptance.json");
/// Config replayed by the determinism criterion.
pub const DETERMINISM_CONFIG: &str = include_str!("../configs/vp_d2.json");

const ORTHONORMALITY_TOL: f64 = 1e-10;
const HERMITE_REL_TOL: f64 = 1e-12;
const STRING_TOL: f64 = 1e-8;
const MULTIPLIER_TOL: f64 = 1e-15;
const REPRODUCTION_TOL: f64 = 1e-13;
const RATE_1D_TOL: f64 = 0.07;
const EXACT_ORACLE_TOL: f64 = 1e-12;
const RATE_HC_TOL: f64 = 0.1;
const RANK_SPREAD_MAX: f64 = 10.0;
const WIDTH_CONSTANT_MAX: f64 = 4.0;
const WIDTH_1D_TOL: f64 = 1e-9;
const NORM_SPREAD_MAX: f64 = 50.0;
const NORM_TREND_MAX: f64 = 2.0;
const PROBE_TREND_MAX: f64 = 1.5;

/// Which criteria to run, and the seed for their random draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub name: String,
    pub seed: u64,
    pub criteria: Vec<u32>,
}

impl Suite {
    pub fn shipped() -> Self {
        serde_json::from_str(SHIPPED_SUITE).expect("shipped suite parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let suite: Suite = serde_json::from_str(&text).map_err(|e| HarnessError::Json { path: path.into(), source: e })?;
        if let Some(&bad) = suite.criteria.iter().find(|&&c| !(1..=12).contains(&c)) {
            return Err(HarnessError::config(format!("{}: no criterion {bad}", path.display())));
        }
        Ok(suite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    /// `PASS  6 title: detail`.
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "orthonormality",
        2 => "Hermite cross-check",
        3 => "Freud string equation",
        4 => "multiplier identity",
        5 => "reproduction",
        6 => "one-dimensional V_n rate",
        7 => "hyperbolic-cross rate",
        8 => "rank asymptotics",
        9 => "exact widths",
        10 => "norm equivalence",
        11 => "inequality probes",
        12 => "determinism",
        _ => "unknown",
    }
}

/// Runs one criterion; numerical errors count as failures.
pub fn run_criterion(id: u32, seed: u64) -> Outcome {
    let result = match id {
        1 => orthonormality(),
        2 => hermite_cross_check(),
        3 => string_equation(),
        4 => multiplier_identity(seed),
        5 => reproduction(seed),
        6 => rate_1d(),
        7 => rate_hyperbolic(),
        8 => rank_asymptotics(),
        9 => widths(),
        10 => norm_equivalence(seed),
        11 => probes(seed),
        12 => determinism(),
        _ => Err(HarnessError::config(format!("no criterion {id}"))),
    };
    let (passed, detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, title: title(id), passed, detail }
}

pub fn run_suite(suite: &Suite, mut on_outcome: impl FnMut(&Outcome)) -> Vec<Outcome> {
    suite
        .criteria
        .iter()
        .map(|&id| {
            let o = run_criterion(id, suite.seed);
            on_outcome(&o);
            o
        })
        .collect()
}

type Check = Result<(bool, String)>;

fn core<T>(r: freudhc_core::Result<T>, what: &str) -> Result<T> {
    r.map_err(|source| HarnessError::Numerical { context: what.to_string(), source })
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Neumaier summation.
fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// `sum_{k >= from} (k + 1)^{-sigma}`: 32 direct terms, then Euler-Maclaurin.
fn power_tail(sigma: f64, from: u64) -> f64 {
    const B2J_OVER_FACT: [f64; 5] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0];
    let start = from as f64 + 1.0;
    let direct = compensated_sum((0..32).map(|k| (start + k as f64).powf(-sigma)));
    let x = start + 32.0;
    let mut tail = x.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * x.powf(-sigma);
    let (mut rising, mut xp) = (sigma, x.powf(-sigma - 1.0));
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        tail += c * rising * xp;
        let m = 2.0 * j as f64;
        rising *= (sigma + m + 1.0) * (sigma + m + 2.0);
        xp /= x * x;
    }
    direct + tail
}

fn univariate(lambda: f64, a: f64, b: f64) -> Result<WeightParams> {
    core(WeightParams::univariate(lambda, a, b), "weight")
}

fn max_orthonormality_defect(table: &RecurrenceTable, n: usize) -> Result<f64> {
    let rules = (1..=n + 1).map(|m| core(gauss_rule(table, m), "Gauss rule")).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    let mut vals = vec![0.0; n + 1];
    for i in 0..=n {
        for j in 0..=i {
            // (i + j)/2 + 1 nodes integrate degree i + j exactly
            let rule = &rules[(i + j) / 2];
            let mut s = 0.0;
            for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                table.eval_all(i, x, &mut vals[..=i]);
                s += w * vals[i] * vals[j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    Ok(worst)
}

fn orthonormality() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for lambda in [2.0, 4.0] {
        let p = univariate(lambda, 0.5, 0.0)?;
        let t = core(stieltjes_recurrence(&p, 102), "Stieltjes recurrence")?;
        let d = max_orthonormality_defect(&t, 100)?;
        parts.push(format!("lambda={lambda}: {d:.2e}"));
        worst = worst.max(d);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= ORTHONORMALITY_TOL, format!("{} (tol {ORTHONORMALITY_TOL:e}, N=100, {secs:.2}s)", parts.join(", "))))
}

fn hermite_cross_check() -> Check {
    let mut worst = 0.0f64;
    for (a, b) in [(0.5, 0.0), (1.0, 0.3)] {
        let p = univariate(2.0, a, b)?;
        let s = core(stieltjes_recurrence(&p, 100), "Stieltjes recurrence")?;
        let h = core(hermite_recurrence(&p, 100), "Hermite recurrence")?;
        for (x, y) in s.beta().iter().zip(h.beta()) {
            worst = worst.max(((x - y) / y).abs());
        }
    }
    Ok((worst <= HERMITE_REL_TOL, format!("max relative deviation {worst:.2e} for k <= 100 (tol {HERMITE_REL_TOL:e})")))
}

fn string_equation() -> Check {
    let mut worst = 0.0f64;
    for (a, b) in [(0.5, 0.0), (1.7, -0.2)] {
        let p = univariate(4.0, a, b)?;
        let t = core(stieltjes_recurrence(&p, 101), "Stieltjes recurrence")?;
        worst = worst.max(core(validate_string_equation(&t, &p), "string equation")?);
    }
    Ok((worst <= STRING_TOL, format!("max residual {worst:.2e} for n <= 100 (tol {STRING_TOL:e})")))
}

fn multiplier_identity(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4);
    let mut worst = 0.0f64;
    for m in 1..=64u64 {
        for _ in 0..4 {
            let len = 2 * m as usize + 8;
            let f = CoeffTensor::from_univariate(&gaussian(&mut rng, len));
            let direct = core(Multiplier1D::vp(m).and_then(|v| v.apply(&f)), "V_m")?;
            let partial = (m + 1..=2 * m)
                .map(|k| core(Multiplier1D::fourier(k).and_then(|s| s.apply(&f)), "S_k"))
                .collect::<Result<Vec<_>>>()?;
            for j in 0..len as u32 {
                let k = MultiIndex::from(&[j][..]);
                let avg = compensated_sum(partial.iter().map(|p| p.get(&k))) / m as f64;
                worst = worst.max((direct.get(&k) - avg).abs());
            }
        }
    }
    Ok((worst <= MULTIPLIER_TOL, format!("max |V_m - mean S_k| = {worst:.2e} over m <= 64 (tol {MULTIPLIER_TOL:e})")))
}

fn reproduction(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(5);
    let mut worst = 0.0f64;
    for m in 1..=64u64 {
        for _ in 0..4 {
            let phi = CoeffTensor::from_univariate(&gaussian(&mut rng, m as usize + 1));
            let out = core(Multiplier1D::vp(m).and_then(|v| v.apply(&phi)), "V_m")?;
            worst = worst.max(core(out.axpy(-1.0, &phi), "residual")?.l2_norm());
        }
    }
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for dim in 1..=3usize {
        for xi in 0..=6u32 {
            let (bad, n) = brute_force_reproduction(dim, xi)?;
            mismatches += bad;
            checked += n;
        }
    }
    let passed = worst <= REPRODUCTION_TOL && mismatches == 0;
    Ok((
        passed,
        format!(
            "max ||V_m phi - phi|| = {worst:.2e} (tol {REPRODUCTION_TOL:e}); {mismatches} mismatches in {checked} brute-force gains for d <= 3, xi <= 6"
        ),
    ))
}

/// Evaluates `sum_{|k|_1 <= xi} prod_j v_{k_j}(s_j)` from the block gains on
/// a box one past the support and checks it against the operator's gain,
/// `H_1(xi)` (gain exactly one) and `H(xi)` (non-zero gain).
fn brute_force_reproduction(dim: usize, xi: u32) -> Result<(usize, usize)> {
    let op = core(HyperbolicOperator::new(CrossFamily::Vp, xi, dim), "V_xi")?;
    let (h, h1) = (index_set_h(xi, dim), index_set_h1(xi, dim));
    let edge = (2u64 << xi) + 1;
    let gains: Vec<Vec<f64>> = (0..=xi).map(|k| (0..edge).map(|s| dyadic_vp_gain(1, k, s)).collect()).collect();
    let mut ks: Vec<Vec<u32>> = Vec::new();
    for_each_in_box(dim, xi + 1, |k| {
        if k.iter().sum::<u32>() <= xi {
            ks.push(k.to_vec());
        }
    });
    let (mut bad, mut n) = (0usize, 0usize);
    for_each_in_box(dim, edge as u32, |s| {
        let lambda = compensated_sum(
            ks.iter().map(|k| k.iter().zip(s).map(|(&kj, &sj)| gains[kj as usize][sj as usize]).product::<f64>()),
        );
        let idx = MultiIndex::from(s);
        let gain_ok = (lambda - op.gain(s)).abs() <= MULTIPLIER_TOL;
        let h1_ok = ((lambda - 1.0).abs() <= MULTIPLIER_TOL) == h1.contains(&idx);
        let h_ok = lambda.abs() <= MULTIPLIER_TOL || h.contains(&idx);
        n += 1;
        if !(gain_ok && h1_ok && h_ok) {
            bad += 1;
        }
    });
    Ok((bad, n))
}

fn for_each_in_box(dim: usize, limit: u32, mut f: impl FnMut(&[u32])) {
    let mut s = vec![0u32; dim];
    loop {
        f(&s);
        let mut j = 0;
        loop {
            if j == dim {
                return;
            }
            s[j] += 1;
            if s[j] < limit {
                break;
            }
            s[j] = 0;
            j += 1;
        }
    }
}

fn rate_1d() -> Check {
    // lambda = 2, r = 2: r_lambda = 1; f_hat(k) = (k + 1)^{-5/2}
    let law = core(SeparableLaw::new(1, 2.5), "law")?;
    let mut samples = Vec::new();
    let mut oracle_dev = 0.0f64;
    for e in 3..=11u32 {
        let n = 1u64 << e;
        let op = ApproxOperator::Tensor(vec![core(Multiplier1D::vp(n), "V_n")?]);
        let err_sq = core(law_error_sq(&law, &op), "law error")?;
        // closed form: trapezoid part below 2n plus the zeta tail from 2n
        let inside = compensated_sum((n + 1..2 * n).map(|j| {
            let g = (2 * n - j) as f64 / n as f64;
            (1.0 - g).powi(2) * ((j + 1) as f64).powf(-5.0)
        }));
        let oracle = inside + power_tail(5.0, 2 * n);
        oracle_dev = oracle_dev.max(((err_sq - oracle) / oracle).abs());
        samples.push((n as f64, err_sq.sqrt()));
    }
    let fit = core(fit_rate(&samples), "rate fit")?;
    let target = -1.0;
    let rate_ok = (fit.alpha - target).abs() <= RATE_1D_TOL;
    let oracle_ok = oracle_dev <= EXACT_ORACLE_TOL;
    Ok((
        rate_ok && oracle_ok,
        format!(
            "alpha = {:.4} (target {target} +- {RATE_1D_TOL}), gamma = {:.3}; closed-form oracle deviation {oracle_dev:.2e} (tol {EXACT_ORACLE_TOL:e})",
            fit.alpha, fit.gamma
        ),
    ))
}

/// `xi` range of the hyperbolic-cross rate fit.
pub const HC_RATE_XI: std::ops::RangeInclusive<u32> = 4..=16;

fn rate_hyperbolic() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [1.0, 1.5, 2.5] {
        // matched smoothness: r_lambda = s - 1/2, i.e. r = 2s - 1 at lambda = 2
        let r_lambda = s - 0.5;
        let law = core(SeparableLaw::new(2, s), "law")?;
        let mut samples = Vec::new();
        for xi in HC_RATE_XI {
            let op = ApproxOperator::Hyperbolic(core(HyperbolicOperator::new(CrossFamily::Vp, xi, 2), "V_xi")?);
            samples.push((2f64.powi(xi as i32), core(law_error_sq(&law, &op), "law error")?.sqrt()));
        }
        let fit = core(fit_rate(&samples), "rate fit")?;
        let pass = (fit.alpha + r_lambda).abs() <= RATE_HC_TOL && fit.gamma > 0.0;
        ok &= pass;
        parts.push(format!("s={s}: alpha={:.3} (target {:.1}), gamma={:.3}", fit.alpha, -r_lambda, fit.gamma));

        let mut dev = 0.0f64;
        for xi in 0..=10u32 {
            let op = ApproxOperator::Hyperbolic(core(HyperbolicOperator::new(CrossFamily::Fourier, xi, 2), "S_xi")?);
            let err_sq = core(law_error_sq(&law, &op), "law error")?;
            let tail = enumerated_block_tail(s, xi);
            dev = dev.max(((err_sq - tail) / tail).abs());
        }
        ok &= dev <= EXACT_ORACLE_TOL;
        parts.push(format!("S_xi tail deviation {dev:.2e}"));
    }
    Ok((ok, format!("{} (tol alpha +- {RATE_HC_TOL}, tail {EXACT_ORACLE_TOL:e})", parts.join("; "))))
}

/// `sum f_hat(s)^2` over `s in N_0^2` outside `{bitlen(s_1) + bitlen(s_2) <= xi}`,
/// row by row in `s_1` with the `s_2` tail summed in closed form.
fn enumerated_block_tail(s: f64, xi: u32) -> f64 {
    let sigma = 2.0 * s;
    let z = power_tail(sigma, 0);
    let rows = (0..1u64 << xi).map(|s1| {
        let level = 64 - s1.leading_zeros();
        let from = 1u64 << (xi - level);
        ((s1 + 1) as f64).powf(-sigma) * power_tail(sigma, from)
    });
    compensated_sum(rows) + z * power_tail(sigma, 1 << xi)
}

fn rank_asymptotics() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for dim in [2usize, 3] {
        let mut ratios = Vec::new();
        for xi in 4..=14u32 {
            let rank = core(rank_of(&OperatorDescriptor::HyperbolicVp { xi, dim }), "rank")? as f64;
            ratios.push(rank / (2f64.powi(xi as i32) * f64::from(xi).powi(dim as i32 - 1)));
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        ok &= hi / lo <= RANK_SPREAD_MAX;
        parts.push(format!("d={dim}: [{lo:.3}, {hi:.3}], C/c={:.2}", hi / lo));
    }
    Ok((ok, format!("{} (max C/c {RANK_SPREAD_MAX})", parts.join("; "))))
}

fn widths() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for r_lambda in [1.0, 1.5] {
        let t = core(exact_diagonal_widths(2, r_lambda, 4096), "widths")?;
        let ratios: Vec<f64> = t.rows[16..].iter().filter_map(|row| row.ratio).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let c = hi.max(1.0 / lo);
        ok &= c <= WIDTH_CONSTANT_MAX;
        parts.push(format!("d=2 r_lambda={r_lambda}: ratio in [{lo:.3}, {hi:.3}], C={c:.3}"));

        let t1 = core(exact_diagonal_widths(1, r_lambda, 4096), "widths")?;
        let dev = t1.rows.iter().map(|row| (row.d_n * ((row.n + 1) as f64).powf(r_lambda) - 1.0).abs()).fold(0.0, f64::max);
        ok &= dev <= WIDTH_1D_TOL;
        parts.push(format!("d=1: |d_n (n+1)^r - 1| <= {dev:.1e}"));
    }
    Ok((ok, format!("{} (C <= {WIDTH_CONSTANT_MAX}, d=1 tol {WIDTH_1D_TOL:e})", parts.join("; "))))
}

/// Truncation degree of coefficient laws in the norm-equivalence check.
const LAW_DEGREE: [u32; 2] = [48, 16];
/// Degree box of oracle coefficients in the norm-equivalence check.
const ORACLE_DEGREE: [u32; 2] = [48, 24];

/// `(id, degree, sobolev / h)` for every corpus member of dimension at most 2.
pub fn norm_ratios(seed: u64) -> Result<Vec<(String, u32, f64)>> {
    // lambda = 2, r = 2, p = 2: r_lambda = 1
    let (r, r_lambda) = (2u32, 1.0);
    let opts = NormOptions::default();
    let corpus = Corpus::builtin(seed)?;
    let mut out = Vec::new();
    for f in &corpus.functions {
        if f.dim > 2 {
            continue;
        }
        let params = core(WeightParams::new(2.0, 0.5, 0.0, f.dim, r, LpIndex::Finite(2.0), LpIndex::Finite(2.0)), "weight")?;
        let basis = core(Basis::new(params, 256), "basis")?;
        let ctx = |what: &str| format!("{} ({what})", f.id);
        let (degree, sob, h) = match &f.coefficients {
            Coefficients::Finite(c) => {
                let sob = core(sobolev_norm_expansion(&basis, c, r, LpIndex::Finite(2.0), &opts), &ctx("Sobolev norm"))?;
                (c.degree_box().linf(), sob, h_norm(c, r_lambda))
            }
            Coefficients::Law(law) => {
                let m = LAW_DEGREE[f.dim - 1];
                let c = law.truncated(m);
                let sob = core(sobolev_norm_expansion(&basis, &c, r, LpIndex::Finite(2.0), &opts), &ctx("Sobolev norm"))?;
                (m, sob, h_norm(&c, r_lambda))
            }
            Coefficients::Oracle(o) => {
                let m = ORACLE_DEGREE[f.dim - 1];
                let c = core(coefficients_from_oracle(o, &basis, &MultiIndex::new(vec![m; f.dim])), &ctx("coefficients"))?;
                let sob = core(sobolev_norm(&basis, o, r, LpIndex::Finite(2.0), &opts), &ctx("Sobolev norm"))?;
                let scale = c.iter().fold(0.0f64, |a, (_, v)| a.max(v.abs()));
                let effective = c.iter().filter(|(_, v)| v.abs() > 1e-14 * scale).map(|(k, _)| k.linf()).max().unwrap_or(0);
                (effective, sob, h_norm(&c, r_lambda))
            }
        };
        out.push((f.id.clone(), degree, sob / h));
    }
    Ok(out)
}

fn norm_equivalence(seed: u64) -> Check {
    let mut ratios = norm_ratios(seed)?;
    ratios.sort_by_key(|r| r.1);
    let n = ratios.len();
    let lo = ratios.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.2).fold(0.0, f64::max);
    let decile = n.div_ceil(10);
    let mean = |xs: &[(String, u32, f64)]| xs.iter().map(|r| r.2).sum::<f64>() / xs.len() as f64;
    let trend = mean(&ratios[n - decile..]) / mean(&ratios[..decile]);
    let ok = n >= 20 && hi / lo <= NORM_SPREAD_MAX && trend <= NORM_TREND_MAX;
    Ok((
        ok,
        format!(
            "{n} functions, ratio in [{lo:.3}, {hi:.3}], max/min = {:.2} (max {NORM_SPREAD_MAX}), last/first decile = {trend:.3} (max {NORM_TREND_MAX})",
            hi / lo
        ),
    ))
}

/// Degrees of the inequality probes.
pub const PROBE_DEGREES: [usize; 6] = [8, 16, 32, 64, 128, 256];

fn probes(seed: u64) -> Check {
    let params = univariate(2.0, 0.5, 0.0)?;
    let basis = core(Basis::new(params, PROBE_DEGREES[5] + 2), "basis")?;
    let opts = NormOptions::default();
    let two = LpIndex::Finite(2.0);
    let cases = [
        ("Bernstein p=2", ProbeKind::Bernstein, two, two),
        ("Nikolskii 2->inf", ProbeKind::Nikolskii, two, LpIndex::Infinity),
        ("Nikolskii 2->1", ProbeKind::Nikolskii, two, LpIndex::Finite(1.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, kind, p, q) in cases {
        let spec = ProbeSpec { kind, p, q, degrees: PROBE_DEGREES.to_vec(), trials: 8, seed };
        let rows = core(inequality_probe(&basis, &spec, &opts), name)?;
        let (first, last) = (rows[0].observed_max, rows[rows.len() - 1].observed_max);
        let growth = last / first;
        ok &= growth <= PROBE_TREND_MAX;
        parts.push(format!("{name}: {first:.3} -> {last:.3} (x{growth:.3})"));
    }
    Ok((ok, format!("{}, m = 8..256 (max growth {PROBE_TREND_MAX})", parts.join("; "))))
}

fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn determinism() -> Check {
    let cfg = ExperimentConfig::from_json(DETERMINISM_CONFIG)?;
    let mut hashes = Vec::new();
    for jobs in [Some(1), None] {
        let dir = tempfile::tempdir().map_err(|e| HarnessError::io(std::env::temp_dir(), e))?;
        let art = run_experiment(&cfg, Some(dir.path()), jobs)?;
        hashes.push((hash_file(&art.approx_csv)?, hash_file(&art.rates_json)?));
    }
    let same = hashes[0] == hashes[1];
    Ok((same, format!("approx.csv {}, rates.json {} (1 worker vs all cores)", &hashes[0].0[..16], &hashes[0].1[..16])))
}
