use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::orthopoly::Basis;
use crate::spectral::{CoeffTensor, MultiIndex};

pub type EvalFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// `(k, x) -> D^k f(x)` for a derivative multi-index `k`.
pub type DerivFn = Box<dyn Fn(&[u32], &[f64]) -> f64 + Send + Sync>;

/// A function on `R^d` given by point evaluation, optionally with its mixed
/// derivatives and its exact expansion coefficients.
pub struct FunctionOracle {
    dim: usize,
    eval: EvalFn,
    deriv: Option<DerivFn>,
    exact_coeffs: Option<CoeffTensor>,
    tag: String,
    extent_degree: usize,
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("dim", &self.dim)
            .field("has_deriv", &self.deriv.is_some())
            .field("has_exact_coeffs", &self.exact_coeffs.is_some())
            .field("tag", &self.tag)
            .field("extent_degree", &self.extent_degree)
            .finish()
    }
}

impl FunctionOracle {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FunctionOracle {
            dim,
            eval: Box::new(eval),
            deriv: None,
            exact_coeffs: None,
            tag: String::new(),
            extent_degree: 16,
        }
    }

    pub fn with_derivatives(mut self, deriv: impl Fn(&[u32], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Box::new(deriv));
        self
    }

    pub fn with_exact_coeffs(mut self, coeffs: CoeffTensor) -> Self {
        self.extent_degree = self.extent_degree.max(coeffs.degree_box().linf() as usize);
        self.exact_coeffs = Some(coeffs);
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// The degree `M` whose MRS number sets the quadrature box `[-2 a_M, 2 a_M]^d`.
    pub fn with_extent_degree(mut self, m: usize) -> Self {
        self.extent_degree = m.max(1);
        self
    }

    /// `f = sum_k c_k p_k` with derivatives up to order `r` in each variable,
    /// taken through the differentiation matrix.
    pub fn from_expansion(basis: &Basis, coeffs: &CoeffTensor, r: u32) -> Result<Self> {
        let dim = coeffs.dim();
        let top = coeffs.degree_box().linf() as usize;
        if top > basis.max_degree() {
            return Err(Error::TableTooShort { needed: top, available: basis.max_degree() });
        }
        let dmat = basis.differentiation_matrix(top.max(1))?;
        let mut derivs: BTreeMap<Vec<u32>, CoeffTensor> = BTreeMap::new();
        for order in derivative_orders(dim, r) {
            let mut t = coeffs.clone();
            for (axis, &m) in order.iter().enumerate() {
                for _ in 0..m {
                    t = differentiate_axis(&t, &dmat, axis);
                }
            }
            derivs.insert(order, t);
        }
        let shared = Arc::new((basis.clone(), derivs));
        let base = shared.clone();
        let zero = alloc::vec![0u32; dim];
        let eval = move |x: &[f64]| evaluate(&base.0, &base.1[&zero], x);
        let deriv = move |k: &[u32], x: &[f64]| match shared.1.get(k) {
            Some(t) => evaluate(&shared.0, t, x),
            None => f64::NAN,
        };
        Ok(FunctionOracle::new(dim, eval)
            .with_derivatives(deriv)
            .with_exact_coeffs(coeffs.clone())
            .with_extent_degree(top))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn has_derivatives(&self) -> bool {
        self.deriv.is_some()
    }

    /// `D^k f(x)`; `k = 0` is the function itself.
    pub fn deriv(&self, k: &[u32], x: &[f64]) -> Result<f64> {
        if k.iter().all(|&m| m == 0) {
            return Ok(self.eval(x));
        }
        self.deriv.as_ref().map(|d| d(k, x)).ok_or(Error::MissingDerivative)
    }

    pub fn exact_coeffs(&self) -> Option<&CoeffTensor> {
        self.exact_coeffs.as_ref()
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn extent_degree(&self) -> usize {
        self.extent_degree
    }
}

/// All derivative multi-indices `k in {0..r}^d` in lexicographic order.
pub fn derivative_orders(dim: usize, r: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut k = alloc::vec![0u32; dim];
    loop {
        out.push(k.clone());
        let mut j = dim;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if k[j] < r {
                k[j] += 1;
                break;
            }
            k[j] = 0;
        }
    }
}

/// Applies `d/dx_axis` to an expansion.
pub fn differentiate_axis(coeffs: &CoeffTensor, dmat: &crate::orthopoly::DiffMatrix, axis: usize) -> CoeffTensor {
    let mut acc: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    for (k, &c) in coeffs {
        let kk = k[axis] as usize;
        for j in 0..kk {
            let g = dmat.get(j, kk);
            if g == 0.0 {
                continue;
            }
            let mut idx = k.as_slice().to_vec();
            idx[axis] = j as u32;
            *acc.entry(MultiIndex::new(idx)).or_insert(0.0) += c * g;
        }
    }
    let mut out = CoeffTensor::new(coeffs.dim());
    for (k, v) in acc {
        // dimensions match by construction
        let _ = out.insert(k, v);
    }
    out
}

/// `sum_k c_k p_k(x)` (unweighted).
pub fn evaluate(basis: &Basis, coeffs: &CoeffTensor, x: &[f64]) -> f64 {
    let top = coeffs.degree_box().linf() as usize;
    let mut tables = Vec::with_capacity(x.len());
    for &xj in x {
        let mut v = alloc::vec![0.0; top + 1];
        basis.table().eval_all(top, xj, &mut v);
        tables.push(v);
    }
    coeffs
        .iter()
        .map(|(k, &c)| c * k.as_slice().iter().zip(&tables).map(|(&kj, t)| t[kj as usize]).product::<f64>())
        .sum()
}
