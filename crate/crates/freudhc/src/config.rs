//! JSON experiment configs, `FREUDHC_*` environment overrides and the
//! parsers shared with the command line.

use std::fmt;
use std::path::{Path, PathBuf};

use freudhc_core::analysis::NormOptions;
use freudhc_core::spectral::XiFamily;
use freudhc_core::{LpIndex, WeightParams};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HarnessError, Result};

/// A norm index in JSON: a number `>= 1` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lp(pub LpIndex);

impl Lp {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Lp(LpIndex::Infinity));
        }
        let v: f64 = t.parse().map_err(|_| HarnessError::config(format!("not a norm index: `{s}`")))?;
        if v.is_infinite() {
            return Err(HarnessError::config("write `inf` for the sup norm"));
        }
        LpIndex::new(v).map(Lp).map_err(|e| HarnessError::config(e.to_string()))
    }
}

impl fmt::Display for Lp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            LpIndex::Finite(p) => write!(f, "{p}"),
            LpIndex::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Lp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            LpIndex::Finite(p) => s.serialize_f64(p),
            LpIndex::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Lp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(v) => v.to_string(),
            Raw::Str(s) => s,
        };
        Lp::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn default_a() -> f64 {
    0.5
}
fn default_one() -> usize {
    1
}
fn default_r() -> u32 {
    1
}
fn default_lp() -> Lp {
    Lp(LpIndex::Finite(2.0))
}

/// The object `{lambda, a, b, d, r, p, q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub lambda: f64,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "default_one")]
    pub d: usize,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default = "default_lp")]
    pub p: Lp,
    #[serde(default = "default_lp")]
    pub q: Lp,
}

impl WeightConfig {
    pub fn params(&self) -> Result<WeightParams> {
        WeightParams::new(self.lambda, self.a, self.b, self.d, self.r, self.p.0, self.q.0)
            .map_err(|e| HarnessError::config(format!("weight: {e}")))
    }
}

/// Approximation operator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Hyperbolic de la Vallee Poussin sums.
    Vp,
    /// Projections onto step hyperbolic crosses.
    Fourier,
    /// Truncation to `prod_j (k_j + 1)^{r_lambda} <= xi`.
    Trunc,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Vp => "vp",
            Family::Fourier => "fourier",
            Family::Trunc => "trunc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "vp" => Ok(Family::Vp),
            "fourier" => Ok(Family::Fourier),
            "trunc" => Ok(Family::Trunc),
            _ => Err(HarnessError::config(format!("unknown family `{s}`"))),
        }
    }

    pub fn xi_family(self, r_lambda: f64) -> XiFamily {
        match self {
            Family::Vp => XiFamily::HyperbolicVp,
            Family::Fourier => XiFamily::HyperbolicFourier,
            Family::Trunc => XiFamily::TruncateG { r_lambda },
        }
    }

    /// Whether `xi` must be a non-negative integer.
    pub fn integer_xi(self) -> bool {
        !matches!(self, Family::Trunc)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Operator parameters, either directly or as target ranks `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Grid {
    Xi(Vec<f64>),
    /// Each `n` becomes the largest `xi` with rank at most `n`.
    N(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_approx_csv")]
    pub approx_csv: String,
    #[serde(default = "default_rates_json")]
    pub rates_json: String,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_approx_csv() -> String {
    "approx.csv".into()
}
fn default_rates_json() -> String {
    "rates.json".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir(), approx_csv: default_approx_csv(), rates_json: default_rates_json() }
    }
}

/// Overrides for [`NormOptions`]; absent fields keep the library defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_refinements: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_factor: Option<f64>,
}

impl Tolerances {
    pub fn norm_options(&self) -> Result<NormOptions> {
        let mut o = NormOptions::default();
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(HarnessError::config(format!("tolerances.{name} must be positive")))
            }
        };
        if let Some(v) = self.rel_tol {
            o.rel_tol = positive("rel_tol", v)?;
        }
        if let Some(v) = self.sup_tol {
            o.sup_tol = positive("sup_tol", v)?;
        }
        if let Some(v) = self.abs_tol {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(HarnessError::config("tolerances.abs_tol must be non-negative"));
            }
            o.abs_tol = v;
        }
        if let Some(v) = self.radius_factor {
            o.radius_factor = positive("radius_factor", v)?;
        }
        if let Some(v) = self.max_refinements {
            o.max_refinements = v;
        }
        if let Some(v) = self.panel_order {
            if v == 0 {
                return Err(HarnessError::config("tolerances.panel_order must be positive"));
            }
            o.panel_order = v;
        }
        Ok(o)
    }
}

/// Everything `run` needs. Identical config and seed give byte-identical
/// artifacts unless `timing` is on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub weight: WeightConfig,
    pub family: Family,
    pub grid: Grid,
    /// Corpus file; the built-in corpus when absent. Relative paths are
    /// resolved against the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    /// Restrict to these function ids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Fill the `runtime_ms` column (makes outputs non-reproducible).
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::from_json(&text).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        if let (Some(c), Some(dir)) = (&cfg.corpus, path.parent()) {
            if c.is_relative() {
                cfg.corpus = Some(dir.join(c));
            }
        }
        Ok(cfg)
    }

    /// Applies `FREUDHC_<KEY>` overrides read through `var`.
    ///
    /// Keys: `LAMBDA A B D R P Q SEED FAMILY OUT_DIR CORPUS TIMING`.
    pub fn apply_overrides(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| HarnessError::config(format!("FREUDHC_{key}: cannot parse `{v}`")))
        }
        let get = |key: &str| var(&format!("FREUDHC_{key}"));
        if let Some(v) = get("LAMBDA") {
            self.weight.lambda = num("LAMBDA", &v)?;
        }
        if let Some(v) = get("A") {
            self.weight.a = num("A", &v)?;
        }
        if let Some(v) = get("B") {
            self.weight.b = num("B", &v)?;
        }
        if let Some(v) = get("D") {
            self.weight.d = num("D", &v)?;
        }
        if let Some(v) = get("R") {
            self.weight.r = num("R", &v)?;
        }
        if let Some(v) = get("P") {
            self.weight.p = Lp::parse(&v)?;
        }
        if let Some(v) = get("Q") {
            self.weight.q = Lp::parse(&v)?;
        }
        if let Some(v) = get("SEED") {
            self.seed = num("SEED", &v)?;
        }
        if let Some(v) = get("FAMILY") {
            self.family = Family::parse(v.trim())?;
        }
        if let Some(v) = get("OUT_DIR") {
            self.output.dir = PathBuf::from(v);
        }
        if let Some(v) = get("CORPUS") {
            self.corpus = Some(PathBuf::from(v));
        }
        if let Some(v) = get("TIMING") {
            self.timing = matches!(v.trim(), "1" | "true" | "yes");
        }
        Ok(())
    }

    /// Schema checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<WeightParams> {
        let params = self.weight.params()?;
        match &self.grid {
            Grid::Xi(xs) => {
                if xs.is_empty() {
                    return Err(HarnessError::config("grid.xi is empty"));
                }
                for &x in xs {
                    check_xi(self.family, x)?;
                }
            }
            Grid::N(ns) => {
                if ns.is_empty() || ns.contains(&0) {
                    return Err(HarnessError::config("grid.n must be a non-empty list of positive ranks"));
                }
            }
        }
        self.tolerances.norm_options()?;
        Ok(params)
    }

    /// The config as recorded in artifact headers: output paths are left
    /// out so that the location of a run does not change its files.
    pub fn header_json(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        c.corpus = c.corpus.as_ref().and_then(|p| p.file_name()).map(PathBuf::from);
        serde_json::to_string(&c).expect("config serializes")
    }
}

pub fn check_xi(family: Family, xi: f64) -> Result<()> {
    if family.integer_xi() {
        if !((0.0..=62.0).contains(&xi) && xi.fract() == 0.0) {
            return Err(HarnessError::config(format!("xi = {xi}: {family} needs an integer in 0..=62")));
        }
    } else if !(xi > 0.0 && xi.is_finite()) {
        return Err(HarnessError::config(format!("xi = {xi}: trunc needs a positive finite value")));
    }
    Ok(())
}

/// Parses `2..10` (inclusive), `1,2,5` and `8,16,...,256`. An ellipsis
/// continues the two terms before it geometrically if that lands on the
/// term after it, arithmetically otherwise.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let bad = || HarnessError::config(format!("cannot parse list `{s}`"));
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..").filter(|_| !s.contains(',')) {
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).map(|v| v as f64).collect());
    }
    let mut out: Vec<f64> = Vec::new();
    let mut pending = false;
    for tok in s.split(',').map(str::trim) {
        if tok == "..." || tok == "…" {
            if out.len() < 2 || pending {
                return Err(bad());
            }
            pending = true;
            continue;
        }
        let v: f64 = tok.parse().map_err(|_| bad())?;
        if pending {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
                return Err(bad());
            }
            let extend = |step: &dyn Fn(f64) -> f64| {
                let mut terms = Vec::new();
                let mut cur = step(b);
                while cur <= v * (1.0 + 1e-12) {
                    terms.push(cur);
                    cur = step(cur);
                }
                terms
            };
            let ratio = b / a;
            let geometric = if a > 0.0 && ratio.fract() == 0.0 { extend(&|x| x * ratio) } else { Vec::new() };
            let terms = if geometric.last() == Some(&v) { geometric } else { extend(&|x| x + (b - a)) };
            if terms.last() != Some(&v) {
                return Err(HarnessError::config(format!("`{s}`: the pattern does not reach {v}")));
            }
            out.extend(terms);
            pending = false;
            continue;
        }
        out.push(v);
    }
    if out.is_empty() || pending {
        return Err(bad());
    }
    Ok(out)
}

/// [`parse_list`] restricted to non-negative integers.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    parse_list(s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(HarnessError::config(format!("`{s}`: expected non-negative integers")))
            }
        })
        .collect()
}
