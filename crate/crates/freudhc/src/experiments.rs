//! The computations behind each subcommand, returning tables and reports
//! instead of writing them.

use std::path::{Path, PathBuf};
use std::time::Instant;

use freudhc_core::analysis::{
    approx_error, fit_rate, inequality_probe, NormOptions, ProbeKind, ProbeSpec, RateFit,
};
use freudhc_core::orthopoly::{gauss_rule, stieltjes_recurrence, string_residuals, Basis, RecurrenceTable};
use freudhc_core::spectral::{rank_of, OperatorDescriptor};
use freudhc_core::widths::{exact_diagonal_widths, xi_sequence};
use freudhc_core::{LpIndex, WeightParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::MultiplierCache;
use crate::config::{check_xi, ExperimentConfig, Family, Grid, Lp};
use crate::corpus::{Coefficients, Corpus, CorpusFunction};
use crate::error::{Context, HarnessError, Result};
use crate::output::{fmt_f64, fmt_opt, write_file, Table};

/// Degree of the recurrence table used for oracle coefficients.
pub const ORACLE_BASIS_DEGREE: usize = 256;

/// Same, for `lambda = 2`, where the recurrence is closed-form and cheap.
pub const ORACLE_BASIS_DEGREE_HERMITE: usize = 1024;

fn weight_meta(t: &mut Table, params: &WeightParams) {
    let ex = params.rate_exponents();
    t.push_meta("lambda", fmt_f64(params.lambda()));
    t.push_meta("a", fmt_f64(params.a()));
    t.push_meta("b", fmt_f64(params.b()));
    t.push_meta("dim", params.dim().to_string());
    t.push_meta("r", params.r().to_string());
    t.push_meta("p", Lp(params.p()).to_string());
    t.push_meta("q", Lp(params.q()).to_string());
    t.push_meta("r_lambda", fmt_f64(ex.r_lambda));
    t.push_meta("delta", fmt_f64(ex.delta));
}

/// Univariate table up to degree `n`, by the discretized Stieltjes procedure.
pub fn recurrence(params: &WeightParams, n: usize) -> Result<RecurrenceTable> {
    stieltjes_recurrence(params, n).context(|| format!("recurrence to degree {n}"))
}

/// Columns `k, beta_k, beta_tilde_k, string_residual_if_lambda4`.
///
/// `beta_tilde` refers to the normalized weight `exp(-|t|^lambda)`,
/// `t = (2a)^{1/lambda} x`; the residual column is filled for `lambda = 4`
/// and `1 <= k <= N - 1`.
pub fn recurrence_table(params: &WeightParams, n: usize) -> Result<Table> {
    let table = recurrence(params, n)?;
    let mut t = Table::new("recurrence", &["k", "beta_k", "beta_tilde_k", "string_residual_if_lambda4"]);
    weight_meta(&mut t, params);
    t.push_meta("n", n.to_string());
    let scale = (2.0 * params.a()).powf(1.0 / params.lambda());
    let residuals = if params.lambda() == 4.0 {
        string_residuals(&table, params).context(|| "string equation".into())?
    } else {
        Vec::new()
    };
    for (k, &b) in table.beta().iter().enumerate() {
        let tilde = if k == 0 { b * scale * (-2.0 * params.b()).exp() } else { b * scale * scale };
        let res = if k >= 1 { residuals.get(k - 1).copied() } else { None };
        t.rows.push(vec![k.to_string(), fmt_f64(b), fmt_f64(tilde), fmt_opt(res)]);
    }
    Ok(t)
}

/// The `n`-point Gauss rule for `w^2 dx`, columns `node, weight`.
pub fn quadrature_table(params: &WeightParams, n: usize) -> Result<Table> {
    if n == 0 {
        return Err(HarnessError::config("quadrature needs at least one node"));
    }
    let table = recurrence(params, n)?;
    let rule = gauss_rule(&table, n).context(|| format!("{n}-point Gauss rule"))?;
    let mut t = Table::new("quadrature", &["node", "weight"]);
    weight_meta(&mut t, params);
    t.push_meta("n", n.to_string());
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        t.rows.push(vec![fmt_f64(*x), fmt_f64(*w)]);
    }
    Ok(t)
}

/// Columns `n, d_n, theory, ratio`.
pub fn widths_table(dim: usize, r_lambda: f64, n_max: u64) -> Result<Table> {
    let w = exact_diagonal_widths(dim, r_lambda, n_max).context(|| "exact widths".into())?;
    let mut t = Table::new("widths", &["n", "d_n", "theory", "ratio"]);
    t.push_meta("dim", dim.to_string());
    t.push_meta("r_lambda", fmt_f64(r_lambda));
    t.push_meta("n_max", n_max.to_string());
    for row in &w.rows {
        t.rows.push(vec![row.n.to_string(), fmt_f64(row.d_n), fmt_opt(row.theory), fmt_opt(row.ratio)]);
    }
    Ok(t)
}

pub fn probe_kind_name(kind: ProbeKind) -> &'static str {
    match kind {
        ProbeKind::Bernstein => "bernstein",
        ProbeKind::Nikolskii => "nikolskii",
        ProbeKind::LqLpSum => "lq-lp-sum",
    }
}

/// Columns `degree, observed_max, monomial, exponent`.
pub fn probe_table(params: &WeightParams, spec: &ProbeSpec, opts: &NormOptions) -> Result<Table> {
    let top = spec.degrees.iter().copied().max().unwrap_or(2);
    let basis = Basis::new(*params, top + 2).context(|| format!("basis to degree {}", top + 2))?;
    let rows = inequality_probe(&basis, spec, opts).context(|| format!("{} probe", probe_kind_name(spec.kind)))?;
    let mut t = Table::new("probe", &["degree", "observed_max", "monomial", "exponent"]);
    weight_meta(&mut t, params);
    t.push_meta("kind", probe_kind_name(spec.kind));
    t.push_meta("trials", spec.trials.to_string());
    t.push_meta("seed", spec.seed.to_string());
    for r in rows {
        t.rows.push(vec![r.degree.to_string(), fmt_f64(r.observed_max), fmt_f64(r.monomial), fmt_f64(r.exponent)]);
    }
    Ok(t)
}

/// One approximation-error sweep.
#[derive(Debug, Clone)]
pub struct ApproxRequest {
    pub params: WeightParams,
    pub family: Family,
    pub grid: Grid,
    /// Restrict to these ids; otherwise every function of matching dimension.
    pub functions: Option<Vec<String>>,
    pub opts: NormOptions,
    pub timing: bool,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl ApproxRequest {
    pub fn from_config(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Self> {
        Ok(ApproxRequest {
            params: cfg.validate()?,
            family: cfg.family,
            grid: cfg.grid.clone(),
            functions: cfg.functions.clone(),
            opts: cfg.tolerances.norm_options()?,
            timing: cfg.timing,
            jobs,
        })
    }

    fn r_lambda(&self) -> f64 {
        self.params.rate_exponents().r_lambda
    }

    /// The grid as `xi` values, duplicates removed in order.
    pub fn xis(&self) -> Result<Vec<f64>> {
        let dim = self.params.dim();
        let raw = match &self.grid {
            Grid::Xi(xs) => xs.clone(),
            Grid::N(ns) => xi_sequence(ns, self.family.xi_family(self.r_lambda()), dim)
                .context(|| "xi for the requested ranks".into())?,
        };
        let mut out: Vec<f64> = Vec::with_capacity(raw.len());
        for xi in raw {
            check_xi(self.family, xi)?;
            if !out.contains(&xi) {
                out.push(xi);
            }
        }
        Ok(out)
    }

    fn select<'c>(&self, corpus: &'c Corpus) -> Result<Vec<&'c CorpusFunction>> {
        let dim = self.params.dim();
        let q2 = self.params.q() == LpIndex::Finite(2.0);
        match &self.functions {
            Some(ids) => ids
                .iter()
                .map(|id| {
                    let f = corpus.get(id).ok_or_else(|| HarnessError::config(format!("unknown function `{id}`")))?;
                    if f.dim != dim {
                        return Err(HarnessError::config(format!("`{id}` has d = {}, the weight has d = {dim}", f.dim)));
                    }
                    if !q2 && matches!(f.coefficients, Coefficients::Law(_)) {
                        return Err(HarnessError::config(format!("`{id}` is a coefficient law, which needs q = 2")));
                    }
                    Ok(f)
                })
                .collect(),
            None => Ok(corpus
                .functions
                .iter()
                .filter(|f| f.dim == dim && (q2 || !matches!(f.coefficients, Coefficients::Law(_))))
                .collect()),
        }
    }

    fn rank(&self, xi: f64) -> Result<u128> {
        let dim = self.params.dim();
        let d = match self.family {
            Family::Vp => OperatorDescriptor::HyperbolicVp { xi: xi as u32, dim },
            Family::Fourier => OperatorDescriptor::HyperbolicFourier { xi: xi as u32, dim },
            Family::Trunc => OperatorDescriptor::TruncateG { xi, dim, r_lambda: self.r_lambda() },
        };
        rank_of(&d).context(|| format!("rank at xi = {xi}"))
    }
}

fn fmt_xi(family: Family, xi: f64) -> String {
    if family.integer_xi() {
        format!("{}", xi as u32)
    } else {
        fmt_f64(xi)
    }
}

/// Columns `function_id, family, xi, rank, error, runtime_ms`, rows in
/// corpus order then grid order whatever the number of workers.
pub fn approx_table(req: &ApproxRequest, corpus: &Corpus, config_json: Option<&str>) -> Result<Table> {
    let xis = req.xis()?;
    let chosen = req.select(corpus)?;
    let dim = req.params.dim();
    let r_lambda = req.r_lambda();
    let cache = MultiplierCache::build(req.family, &xis, dim, r_lambda)?;
    let ranks: Vec<u128> = xis.iter().map(|&xi| req.rank(xi)).collect::<Result<_>>()?;

    let needs_basis = req.params.q() != LpIndex::Finite(2.0)
        || chosen.iter().any(|f| matches!(f.coefficients, Coefficients::Oracle(_)));
    let basis = if needs_basis {
        let finite_top = chosen.iter().filter_map(|f| f.degree()).max().unwrap_or(0) as usize;
        let base = if req.params.lambda() == 2.0 { ORACLE_BASIS_DEGREE_HERMITE } else { ORACLE_BASIS_DEGREE };
        let degree = base.max(finite_top + 2);
        Some(Basis::new(req.params, degree).context(|| format!("basis to degree {degree}"))?)
    } else {
        None
    };

    let tasks: Vec<(usize, usize)> = (0..chosen.len()).flat_map(|f| (0..xis.len()).map(move |x| (f, x))).collect();
    let work = |&(fi, xi_i): &(usize, usize)| -> Result<Vec<String>> {
        let f = chosen[fi];
        let xi = xis[xi_i];
        let op = cache.get(req.family, xi, dim, r_lambda).expect("operator cached for every grid point");
        let start = Instant::now();
        let source = f.source(basis.as_ref()).expect("a basis is built whenever an oracle is selected");
        let err = approx_error(source, &op, req.params.q(), basis.as_ref(), &req.opts)
            .context(|| format!("{} at xi = {xi}", f.id))?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(vec![
            f.id.clone(),
            req.family.name().to_string(),
            fmt_xi(req.family, xi),
            ranks[xi_i].to_string(),
            fmt_f64(err),
            if req.timing { format!("{ms:.3}") } else { String::new() },
        ])
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(req.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::config(format!("worker pool: {e}")))?;
    let rows: Vec<Result<Vec<String>>> = pool.install(|| tasks.par_iter().map(work).collect());

    let mut t = Table::new("approx", &["function_id", "family", "xi", "rank", "error", "runtime_ms"]);
    weight_meta(&mut t, &req.params);
    t.push_meta("family", req.family.name());
    if let Some(c) = config_json {
        t.push_meta("config", c);
    }
    t.rows = rows.into_iter().collect::<Result<_>>()?;
    Ok(t)
}

/// Fitted and predicted exponents of `e ~ n^alpha (ln n)^gamma`.
///
/// For `vp` and `fourier` the abscissa is `n = 2^xi` and the prediction is
/// `2^{-r xi} xi^{d-1}` with `r = r_lambda - delta`; for `trunc` it is the
/// rank and the prediction is the width rate `n^{-r_lambda} (ln n)^{r_lambda (d-1)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub function_id: String,
    pub family: String,
    pub samples: usize,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub residual: Option<f64>,
    pub theory_alpha: f64,
    pub theory_gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn meta_f64(t: &Table, key: &str) -> Result<f64> {
    t.meta(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| HarnessError::config(format!("CSV metadata lacks a numeric `{key}` line")))
}

/// Fits every function in an `approx` table, or just `function`. Rows with
/// abscissa below `min_n` or zero error are skipped.
pub fn rates_from_table(t: &Table, function: Option<&str>, min_n: f64) -> Result<Vec<RateReport>> {
    let col = |name: &str| t.column(name).ok_or_else(|| HarnessError::config(format!("CSV has no `{name}` column")));
    let (c_id, c_family, c_xi, c_rank, c_err) = (col("function_id")?, col("family")?, col("xi")?, col("rank")?, col("error")?);
    let dim = meta_f64(t, "dim")?;
    let r_lambda = meta_f64(t, "r_lambda")?;
    let delta = meta_f64(t, "delta")?;

    let mut ids: Vec<&str> = Vec::new();
    for row in &t.rows {
        if !ids.contains(&row[c_id].as_str()) {
            ids.push(&row[c_id]);
        }
    }
    if let Some(f) = function {
        if !ids.contains(&f) {
            return Err(HarnessError::config(format!("function `{f}` not in the table")));
        }
        ids = vec![f];
    }
    let num = |s: &str, what: &str| -> Result<f64> {
        s.parse().map_err(|_| HarnessError::config(format!("bad {what} value `{s}`")))
    };
    let mut out = Vec::new();
    for id in ids {
        let rows: Vec<&Vec<String>> = t.rows.iter().filter(|r| r[c_id] == id).collect();
        let family = Family::parse(&rows[0][c_family])?;
        let (theory_alpha, theory_gamma) = match family {
            Family::Vp | Family::Fourier => (-(r_lambda - delta), dim - 1.0),
            Family::Trunc => (-r_lambda, r_lambda * (dim - 1.0)),
        };
        let mut samples: Vec<(f64, f64)> = Vec::new();
        let mut zeros = 0usize;
        for r in rows {
            let n = match family {
                Family::Trunc => num(&r[c_rank], "rank")?,
                _ => 2f64.powf(num(&r[c_xi], "xi")?),
            };
            let e = num(&r[c_err], "error")?;
            if n >= min_n && n > 1.0 {
                if e > 0.0 {
                    samples.push((n, e));
                } else if e == 0.0 {
                    zeros += 1;
                }
            }
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples.dedup_by(|a, b| a.0 == b.0);
        let mut report = RateReport {
            function_id: id.to_string(),
            family: family.name().to_string(),
            samples: samples.len(),
            alpha: None,
            gamma: None,
            residual: None,
            theory_alpha,
            theory_gamma,
            note: None,
        };
        match fit_rate(&samples) {
            Ok(RateFit { alpha, gamma, residual, .. }) => {
                report.alpha = Some(alpha);
                report.gamma = Some(gamma);
                report.residual = Some(residual);
            }
            Err(_) if zeros > 0 => {
                report.note = Some(format!("{zeros} rows with zero error (exact reproduction); too few positive errors to fit"))
            }
            Err(e) => report.note = Some(e.to_string()),
        }
        out.push(report);
    }
    Ok(out)
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub approx_csv: PathBuf,
    pub rates_json: PathBuf,
}

/// `approx` for the configured grid, then `rates` for every function.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>, jobs: Option<usize>) -> Result<RunArtifacts> {
    let req = ApproxRequest::from_config(cfg, jobs)?;
    let corpus = Corpus::load(cfg.corpus.as_deref(), cfg.seed)?;
    let table = approx_table(&req, &corpus, Some(&cfg.header_json()))?;
    let dir = out_dir.unwrap_or(&cfg.output.dir);
    let approx_csv = dir.join(&cfg.output.approx_csv);
    write_file(&approx_csv, table.to_csv_string().as_bytes())?;
    let reports = rates_from_table(&table, None, 1.0)?;
    let rates_json = dir.join(&cfg.output.rates_json);
    let mut text = serde_json::to_string_pretty(&reports).expect("reports serialize");
    text.push('\n');
    write_file(&rates_json, text.as_bytes())?;
    Ok(RunArtifacts { approx_csv, rates_json })
}
