//! Test functions: explicit expansions, separable coefficient laws,
//! Gaussians given by point evaluation, and seeded random expansions.

use std::path::Path;

use freudhc_core::analysis::{CoefficientSource, FunctionOracle, SeparableLaw};
use freudhc_core::orthopoly::Basis;
use freudhc_core::spectral::{CoeffTensor, MultiIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// The corpus shipped with the crate.
pub const BUILTIN_CORPUS: &str = include_str!("../data/corpus.json");

/// Degree box the oracle coefficient search starts from.
pub const ORACLE_START_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub k: Vec<u32>,
    pub c: f64,
}

/// One corpus entry as written in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Expansion { id: String, dim: usize, terms: Vec<Term> },
    /// `f_hat(k) = prod_j (k_j + 1)^{-s}`.
    Law { id: String, dim: usize, s: f64 },
    /// `exp(-c |x|^2)`, coefficients by quadrature.
    Gaussian { id: String, dim: usize, c: f64 },
    /// Standard normal coefficients times `prod_j (k_j + 1)^{-decay}` on
    /// the box `{0..=degree}^d`, drawn from the run seed.
    Random { id: String, dim: usize, degree: u32, decay: f64 },
}

impl FunctionSpec {
    pub fn id(&self) -> &str {
        match self {
            FunctionSpec::Expansion { id, .. }
            | FunctionSpec::Law { id, .. }
            | FunctionSpec::Gaussian { id, .. }
            | FunctionSpec::Random { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub functions: Vec<FunctionSpec>,
}

/// How a corpus function's coefficients are known.
#[derive(Debug)]
pub enum Coefficients {
    Finite(CoeffTensor),
    Law(SeparableLaw),
    Oracle(FunctionOracle),
}

#[derive(Debug)]
pub struct CorpusFunction {
    pub id: String,
    pub kind: &'static str,
    pub dim: usize,
    pub coefficients: Coefficients,
}

impl CorpusFunction {
    /// `None` for an oracle when no basis is given.
    pub fn source<'a>(&'a self, basis: Option<&'a Basis>) -> Option<CoefficientSource<'a>> {
        Some(match &self.coefficients {
            Coefficients::Finite(c) => CoefficientSource::Finite(c),
            Coefficients::Law(l) => CoefficientSource::Law(*l),
            Coefficients::Oracle(o) => {
                CoefficientSource::Oracle { oracle: o, basis: basis?, start_degree: ORACLE_START_DEGREE }
            }
        })
    }

    /// Supremum of the `r_lambda` for which the coefficient norm with
    /// weights `prod_j (k_j + 1)^{r_lambda}` is finite. A law with exponent
    /// `s` has `sum (k + 1)^{2 r_lambda - 2s} < inf` iff `r_lambda < s - 1/2`;
    /// expansions and Gaussians (geometric decay) are unbounded.
    pub fn smoothness(&self) -> f64 {
        match &self.coefficients {
            Coefficients::Law(l) => l.s - 0.5,
            _ => f64::INFINITY,
        }
    }

    /// Largest coordinate degree of a finite expansion.
    pub fn degree(&self) -> Option<u32> {
        match &self.coefficients {
            Coefficients::Finite(c) => Some(c.degree_box().linf()),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub struct Corpus {
    pub functions: Vec<CorpusFunction>,
}

impl Corpus {
    pub fn builtin(seed: u64) -> Result<Self> {
        Self::from_json(BUILTIN_CORPUS, seed)
    }

    pub fn from_json(text: &str, seed: u64) -> Result<Self> {
        let file: CorpusFile = serde_json::from_str(text).map_err(|e| HarnessError::config(format!("corpus: {e}")))?;
        Self::build(&file.functions, seed)
    }

    pub fn load(path: Option<&Path>, seed: u64) -> Result<Self> {
        match path {
            None => Self::builtin(seed),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
                Self::from_json(&text, seed).map_err(|e| HarnessError::config(format!("{}: {e}", p.display())))
            }
        }
    }

    /// Random entries use ChaCha8 seeded with `seed` on the stream given by
    /// their position in `specs`.
    pub fn build(specs: &[FunctionSpec], seed: u64) -> Result<Self> {
        let mut functions = Vec::with_capacity(specs.len());
        for (pos, spec) in specs.iter().enumerate() {
            if functions.iter().any(|f: &CorpusFunction| f.id == spec.id()) {
                return Err(HarnessError::config(format!("duplicate function id `{}`", spec.id())));
            }
            functions.push(build_one(spec, seed, pos as u64)?);
        }
        Ok(Corpus { functions })
    }

    pub fn get(&self, id: &str) -> Option<&CorpusFunction> {
        self.functions.iter().find(|f| f.id == id)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

fn build_one(spec: &FunctionSpec, seed: u64, stream: u64) -> Result<CorpusFunction> {
    let bad = |what: &str| HarnessError::config(format!("corpus entry `{}`: {what}", spec.id()));
    let (kind, dim, coefficients) = match spec {
        FunctionSpec::Expansion { dim, terms, .. } => {
            if *dim == 0 || terms.is_empty() {
                return Err(bad("needs d >= 1 and at least one term"));
            }
            let mut t = CoeffTensor::new(*dim);
            for term in terms {
                if term.k.len() != *dim || !term.c.is_finite() {
                    return Err(bad("every term needs d indices and a finite value"));
                }
                let k = MultiIndex::from(term.k.as_slice());
                t.insert(k.clone(), t.get(&k) + term.c).map_err(|e| bad(&e.to_string()))?;
            }
            ("expansion", *dim, Coefficients::Finite(t))
        }
        FunctionSpec::Law { dim, s, .. } => {
            let law = SeparableLaw::new(*dim, *s).map_err(|e| bad(&e.to_string()))?;
            ("law", *dim, Coefficients::Law(law))
        }
        FunctionSpec::Gaussian { dim, c, .. } => {
            if *dim == 0 || !(*c > 0.0 && c.is_finite()) {
                return Err(bad("needs d >= 1 and c > 0"));
            }
            ("gaussian", *dim, Coefficients::Oracle(gaussian_oracle(spec.id(), *dim, *c)))
        }
        FunctionSpec::Random { dim, degree, decay, .. } => {
            if *dim == 0 || !decay.is_finite() {
                return Err(bad("needs d >= 1 and a finite decay"));
            }
            let count = (u64::from(*degree) + 1).checked_pow(*dim as u32).filter(|&n| n <= 1 << 20);
            if count.is_none() {
                return Err(bad("box has more than 2^20 coefficients"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let law = SeparableLaw { dim: *dim, s: *decay };
            let shape = law.truncated(*degree);
            let entries: Vec<(MultiIndex, f64)> =
                shape.iter().map(|(k, &w)| (k.clone(), w * rng.sample::<f64, _>(StandardNormal))).collect();
            let t = CoeffTensor::from_entries(*dim, entries).map_err(|e| bad(&e.to_string()))?;
            ("random", *dim, Coefficients::Finite(t))
        }
    };
    Ok(CorpusFunction { id: spec.id().to_string(), kind, dim, coefficients })
}

/// `g^(n)(x)` for `g(x) = exp(-c x^2)`: `(-sqrt c)^n H_n(sqrt c x) g(x)`
/// with physicists' Hermite polynomials.
pub fn gaussian_derivative(c: f64, n: u32, x: f64) -> f64 {
    let sc = c.sqrt();
    let t = sc * x;
    let (mut h0, mut h1) = (1.0, 2.0 * t);
    let h = match n {
        0 => h0,
        _ => {
            for k in 1..n {
                let h2 = 2.0 * t * h1 - 2.0 * f64::from(k) * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    (-sc).powi(n as i32) * h * (-c * x * x).exp()
}

fn gaussian_oracle(id: &str, dim: usize, c: f64) -> FunctionOracle {
    FunctionOracle::new(dim, move |x: &[f64]| (-c * x.iter().map(|v| v * v).sum::<f64>()).exp())
        .with_derivatives(move |k: &[u32], x: &[f64]| k.iter().zip(x).map(|(&n, &xj)| gaussian_derivative(c, n, xj)).product())
        .with_tag(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let (c, h) = (0.7, 1e-4);
        for n in 0..4u32 {
            for &x in &[-1.3, 0.0, 0.4, 2.1] {
                let fd = (gaussian_derivative(c, n, x + h) - gaussian_derivative(c, n, x - h)) / (2.0 * h);
                let exact = gaussian_derivative(c, n + 1, x);
                assert!((fd - exact).abs() <= 1e-6, "n={n} x={x}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn builtin_corpus_is_complete() {
        let c = Corpus::builtin(1).unwrap();
        assert!(c.len() >= 22);
        for kind in ["expansion", "law", "gaussian", "random"] {
            assert!(c.functions.iter().any(|f| f.kind == kind), "{kind}");
        }
        for s in [1.0, 1.5, 2.5] {
            assert!(c.functions.iter().any(|f| matches!(&f.coefficients, Coefficients::Law(l) if l.s == s)));
        }
    }

    #[test]
    fn random_entries_follow_the_seed() {
        let spec = [FunctionSpec::Random { id: "r".into(), dim: 2, degree: 5, decay: 1.0 }];
        let coeffs = |seed| match Corpus::build(&spec, seed).unwrap().functions.remove(0).coefficients {
            Coefficients::Finite(t) => t,
            _ => unreachable!(),
        };
        assert_eq!(coeffs(3), coeffs(3));
        assert_ne!(coeffs(3), coeffs(4));
        assert_eq!(coeffs(3).len(), 36);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(Corpus::from_json(r#"{"functions": [{"kind": "law", "id": "x", "dim": 1, "s": 0.4}]}"#, 0).is_err());
        assert!(Corpus::from_json(r#"{"functions": [{"kind": "gaussian", "id": "x", "dim": 1, "c": -1}]}"#, 0).is_err());
        let dup = r#"{"functions": [{"kind": "law", "id": "x", "dim": 1, "s": 1}, {"kind": "law", "id": "x", "dim": 1, "s": 2}]}"#;
        assert!(Corpus::from_json(dup, 0).is_err());
    }
}
