//! Weighted norms `||f||_{L_q,w} = (int |f w|^q)^{1/q}`, mixed Sobolev
//! norms and the coefficient norm of the space with weights
//! `rho_k = prod_j (k_j + 1)^{r_lambda}`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::oracle::{derivative_orders, differentiate_axis, FunctionOracle};
use crate::error::{Error, Result};
use crate::math::{gauss_legendre, sum2};
use crate::orthopoly::Basis;
use crate::spectral::{CoeffTensor, MultiIndex};
use crate::weights::{LpIndex, WeightParams};

type PointFn<'a> = dyn Fn(&[f64]) -> f64 + 'a;

/// Accuracy controls for the quadrature-based norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Relative change between panel doublings that counts as converged.
    pub rel_tol: f64,
    /// Same, for the sampled `q = inf` estimate.
    pub sup_tol: f64,
    /// Absolute change that also counts as converged, for targets whose
    /// values are only known up to some noise level.
    pub abs_tol: f64,
    pub max_refinements: u32,
    /// Gauss-Legendre points per panel.
    pub panel_order: usize,
    /// The box is `[-R, R]^d` with `R = radius_factor * a_M`, widened for
    /// small `M` to where `w^q` drops below `e^{-40}`.
    pub radius_factor: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { rel_tol: 1e-6, sup_tol: 1e-3, abs_tol: 0.0, max_refinements: 7, panel_order: 16, radius_factor: 2.0 }
    }
}

/// What to measure.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Expansion(&'a CoeffTensor),
    Oracle(&'a FunctionOracle),
    /// `D^k f` of an oracle with derivatives.
    Derivative(&'a FunctionOracle, &'a [u32]),
    /// `f - g` for an oracle `f` and an expansion `g`.
    Residual(&'a FunctionOracle, &'a CoeffTensor),
}

impl Target<'_> {
    fn dim(&self) -> usize {
        match self {
            Target::Expansion(c) => c.dim(),
            Target::Oracle(o) | Target::Derivative(o, _) | Target::Residual(o, _) => o.dim(),
        }
    }

    fn extent(&self) -> usize {
        match self {
            Target::Expansion(c) => c.degree_box().linf() as usize,
            Target::Oracle(o) | Target::Derivative(o, _) => o.extent_degree(),
            Target::Residual(o, c) => o.extent_degree().max(c.degree_box().linf() as usize),
        }
    }
}

/// A function of the trailing coordinates after the leading ones were fixed.
trait Section: Sized {
    fn dim(&self) -> usize;
    fn restrict(&self, x: f64) -> Self;
    /// `f(x) w(x)` when one coordinate is left.
    fn value(&self, x: f64) -> f64;
}

/// Boxes up to this many entries are contracted densely.
const DENSE_LIMIT: usize = 1 << 22;

/// Partially contracted expansion: the weights of fixed coordinates are
/// already folded into the coefficients.
struct ExpansionSection<'a> {
    basis: &'a Basis,
    dim: usize,
    storage: Storage,
}

enum Storage {
    /// Row-major over the degree box, first axis slowest.
    Dense { shape: Vec<usize>, data: Vec<f64> },
    Sparse(CoeffTensor),
}

impl<'a> ExpansionSection<'a> {
    fn new(basis: &'a Basis, coeffs: &CoeffTensor) -> Self {
        let dim = coeffs.dim();
        let shape: Vec<usize> = coeffs.degree_box().as_slice().iter().map(|&t| t as usize + 1).collect();
        let size = shape.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).filter(|&n| n <= DENSE_LIMIT);
        let storage = match size {
            Some(size) if !coeffs.is_empty() => {
                let mut data = vec![0.0; size];
                for (k, &c) in coeffs {
                    let at = k.as_slice().iter().zip(&shape).fold(0usize, |acc, (&i, &n)| acc * n + i as usize);
                    data[at] = c;
                }
                Storage::Dense { shape, data }
            }
            Some(_) => Storage::Dense { shape: vec![1; dim], data: vec![0.0] },
            None => Storage::Sparse(coeffs.clone()),
        };
        ExpansionSection { basis, dim, storage }
    }
}

impl Section for ExpansionSection<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn restrict(&self, x: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense { shape, data } => {
                let pw = self.basis.weighted_values(shape[0] - 1, x);
                let stride = data.len() / shape[0];
                let mut out = vec![0.0; stride];
                for (row, &p) in data.chunks_exact(stride).zip(&pw) {
                    if p != 0.0 {
                        for (o, &c) in out.iter_mut().zip(row) {
                            *o += p * c;
                        }
                    }
                }
                Storage::Dense { shape: shape[1..].to_vec(), data: out }
            }
            Storage::Sparse(coeffs) => {
                let top = coeffs.iter().map(|(k, _)| k[0]).max().unwrap_or(0) as usize;
                let pw = self.basis.weighted_values(top, x);
                let mut acc: BTreeMap<MultiIndex, f64> = BTreeMap::new();
                for (k, &c) in coeffs {
                    *acc.entry(MultiIndex::from(&k.as_slice()[1..])).or_insert(0.0) += c * pw[k[0] as usize];
                }
                let mut out = CoeffTensor::new(self.dim - 1);
                for (k, v) in acc {
                    let _ = out.insert(k, v);
                }
                return ExpansionSection::new(self.basis, &out);
            }
        };
        ExpansionSection { basis: self.basis, dim: self.dim - 1, storage }
    }

    fn value(&self, x: f64) -> f64 {
        let p = self.basis.params();
        let lw = p.log_weight_1d(x);
        match &self.storage {
            Storage::Dense { data, .. } => self.basis.table().weighted_sum(data, x, lw),
            Storage::Sparse(coeffs) => {
                let top = coeffs.degree_box()[0] as usize;
                let mut d = vec![0.0; top + 1];
                for (k, &c) in coeffs {
                    d[k[0] as usize] = c;
                }
                self.basis.table().weighted_sum(&d, x, lw)
            }
        }
    }
}

struct PointSection<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    params: &'a WeightParams,
    prefix: Vec<f64>,
    log_w: f64,
    dim: usize,
}

impl Section for PointSection<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn restrict(&self, x: f64) -> Self {
        let mut prefix = self.prefix.clone();
        prefix.push(x);
        PointSection {
            f: self.f,
            params: self.params,
            prefix,
            log_w: self.log_w + self.params.log_weight_1d(x),
            dim: self.dim - 1,
        }
    }

    fn value(&self, x: f64) -> f64 {
        let lw = self.log_w + self.params.log_weight_1d(x);
        if lw < -745.0 {
            return 0.0;
        }
        let mut pt = self.prefix.clone();
        pt.push(x);
        let v = (self.f)(&pt);
        if v == 0.0 {
            0.0
        } else {
            v * lw.exp()
        }
    }
}

/// `f - g` for a point function `f` and an expansion `g`, restricted
/// coordinate by coordinate so `g` is never re-evaluated from scratch.
struct ResidualSection<'a> {
    point: PointSection<'a>,
    expansion: ExpansionSection<'a>,
}

impl Section for ResidualSection<'_> {
    fn dim(&self) -> usize {
        self.point.dim
    }

    fn restrict(&self, x: f64) -> Self {
        ResidualSection { point: self.point.restrict(x), expansion: self.expansion.restrict(x) }
    }

    fn value(&self, x: f64) -> f64 {
        self.point.value(x) - self.expansion.value(x)
    }
}

/// Composite Gauss-Legendre grid on `[-R, R]`.
struct Grid {
    edges: Vec<f64>,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
}

impl Grid {
    fn new(radius: f64, panels: usize, order: usize) -> Self {
        let h = 2.0 * radius / panels as f64;
        let edges = (0..=panels).map(|i| -radius + h * i as f64).collect();
        let (gl_nodes, gl_weights) = gauss_legendre(order);
        Grid { edges, gl_nodes, gl_weights }
    }

    fn panel_points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.gl_nodes.iter().zip(&self.gl_weights).map(move |(&t, &w)| (c + h * t, h * w))
    }

    fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges.windows(2).flat_map(move |e| self.panel_points(e[0], e[1]))
    }

    /// Panel nodes, panel edges and midpoints between consecutive nodes.
    fn samples(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.points().map(|(x, _)| x).collect();
        pts.extend(self.edges.iter().copied());
        pts.sort_by(|a, b| a.total_cmp(b));
        let mids: Vec<f64> = pts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        pts.extend(mids);
        pts.sort_by(|a, b| a.total_cmp(b));
        pts
    }
}

fn is_even_integer(q: f64) -> bool {
    q.fract() == 0.0 && (q as u64).is_multiple_of(2)
}

fn bisect_root(f: &dyn Fn(f64) -> f64, mut a: f64, mut fa: f64, mut b: f64) -> f64 {
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `int |F|^q` over the grid; for non-even `q` each panel is split at the
/// sign changes of `F` so the kinks of `|F|^q` sit on panel edges.
fn integrate_1d(f: &dyn Fn(f64) -> f64, q: f64, grid: &Grid) -> f64 {
    let even = is_even_integer(q);
    let pow = |v: f64| if q == 2.0 { v * v } else { v.abs().powf(q) };
    let mut terms = Vec::new();
    for e in grid.edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let pts: Vec<(f64, f64)> = grid.panel_points(a, b).collect();
        let vals: Vec<f64> = pts.iter().map(|&(x, _)| f(x)).collect();
        if even {
            terms.extend(pts.iter().zip(&vals).map(|(&(_, w), &v)| w * pow(v)));
            continue;
        }
        let mut xs = vec![a];
        xs.extend(pts.iter().map(|p| p.0));
        xs.push(b);
        let mut fs = vec![f(a)];
        fs.extend(vals.iter().copied());
        fs.push(f(b));
        let mut cuts = vec![a];
        for i in 0..xs.len() - 1 {
            if fs[i] != 0.0 && fs[i + 1] != 0.0 && (fs[i] < 0.0) != (fs[i + 1] < 0.0) {
                cuts.push(bisect_root(f, xs[i], fs[i], xs[i + 1]));
            }
        }
        cuts.push(b);
        if cuts.len() == 2 {
            terms.extend(pts.iter().zip(&vals).map(|(&(_, w), &v)| w * pow(v)));
        } else {
            for c in cuts.windows(2) {
                terms.extend(grid.panel_points(c[0], c[1]).map(|(x, w)| w * pow(f(x))));
            }
        }
    }
    sum2(terms)
}

fn integrate_section<S: Section>(s: &S, q: f64, grid: &Grid, rel_tol: f64) -> f64 {
    if s.dim() == 1 {
        return integrate_1d(&|x| s.value(x), q, grid);
    }
    let inner = |x: f64| integrate_section(&s.restrict(x), q, grid, rel_tol);
    let panels: Vec<(f64, f64, f64)> = grid
        .edges
        .windows(2)
        .map(|e| (e[0], e[1], sum2(grid.panel_points(e[0], e[1]).map(|(x, w)| w * inner(x)))))
        .collect();
    if is_even_integer(q) {
        return sum2(panels.iter().map(|p| p.2));
    }
    // |F|^q has weak singularities where zero sets fold, so the outer
    // coordinate is refined adaptively
    let total = sum2(panels.iter().map(|p| p.2)).abs();
    let budget = rel_tol * total / panels.len() as f64;
    sum2(panels.iter().map(|&(a, b, whole)| adaptive_panel(&inner, grid, a, b, whole, budget, 0)))
}

fn adaptive_panel(f: &dyn Fn(f64) -> f64, grid: &Grid, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = sum2(grid.panel_points(a, m).map(|(x, w)| w * f(x)));
    let right = sum2(grid.panel_points(m, b).map(|(x, w)| w * f(x)));
    let halves = left + right;
    if (halves - whole).abs() <= tol || depth >= 8 {
        return halves;
    }
    adaptive_panel(f, grid, a, m, left, 0.5 * tol, depth + 1) + adaptive_panel(f, grid, m, b, right, 0.5 * tol, depth + 1)
}

/// Golden-section search for a local maximum of `|F|` on `[a, b]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c).abs(), f(d).abs());
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d).abs();
        }
    }
    fc.max(fd)
}

fn sup_1d(f: &dyn Fn(f64) -> f64, grid: &Grid) -> f64 {
    let xs = grid.samples();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x).abs()).collect();
    let mut best = 0usize;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = i;
        }
    }
    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(xs.len() - 1)];
    vals[best].max(golden_max(f, lo, hi))
}

fn sup_section<S: Section>(s: &S, grid: &Grid) -> f64 {
    if s.dim() == 1 {
        return sup_1d(&|x| s.value(x), grid);
    }
    grid.samples().into_iter().map(|x| sup_section(&s.restrict(x), grid)).fold(0.0, f64::max)
}

fn measure<S: Section>(s: &S, q: LpIndex, grid: &Grid, rel_tol: f64) -> f64 {
    match q {
        LpIndex::Infinity => sup_section(s, grid),
        LpIndex::Finite(q) => integrate_section(s, q, grid, rel_tol).powf(1.0 / q),
    }
}

/// `||f||_{L_q,w}` on `R^d`.
///
/// `q = 2` on an expansion is Parseval. Otherwise the integral of `|f w|^q`
/// over `[-R, R]^d` (`R = 2 a_M` or more, see [`NormOptions`]) is computed
/// with composite Gauss-Legendre panels,
/// doubled until the norm is stable to `rel_tol`; `q = inf` samples the
/// panel nodes and midpoints and polishes the best sample by golden section.
pub fn lq_norm(basis: &Basis, target: Target<'_>, q: LpIndex, opts: &NormOptions) -> Result<f64> {
    if let (Target::Expansion(c), LpIndex::Finite(q)) = (target, q) {
        if q == 2.0 {
            return Ok(c.l2_norm());
        }
    }
    let params = basis.params();
    let dim = target.dim();
    if dim == 0 {
        return Err(Error::InvalidParameter { name: "d", reason: "dimension must be at least 1" });
    }
    let m = target.extent().max(1);
    if let Target::Expansion(c) | Target::Residual(_, c) = target {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
        }
        if m > basis.max_degree() {
            return Err(Error::TableTooShort { needed: m, available: basis.max_degree() });
        }
    }
    let q_decay = if q.is_infinite() { 1.0 } else { q.value() };
    let floor = (40.0 / (q_decay * params.a())).powf(1.0 / params.lambda());
    let radius = (opts.radius_factor * params.mrs_number(m as f64)).max(floor);
    let mut panels = (3 * m).div_ceil(8).max(4);
    let tol = if q.is_infinite() { opts.sup_tol } else { opts.rel_tol };

    let derivative_fn;
    let oracle_fn;
    let f: Option<&PointFn> = match target {
        Target::Expansion(_) => None,
        Target::Oracle(o) | Target::Residual(o, _) => {
            oracle_fn = move |x: &[f64]| o.eval(x);
            Some(&oracle_fn)
        }
        Target::Derivative(o, k) => {
            if !o.has_derivatives() && k.iter().any(|&m| m > 0) {
                return Err(Error::MissingDerivative);
            }
            derivative_fn = move |x: &[f64]| o.deriv(k, x).unwrap_or(f64::NAN);
            Some(&derivative_fn)
        }
    };

    let run = |panels: usize| -> f64 {
        let grid = Grid::new(radius, panels, opts.panel_order);
        match (f, target) {
            (None, Target::Expansion(c)) => measure(&ExpansionSection::new(basis, c), q, &grid, tol),
            (Some(f), Target::Residual(_, c)) => {
                let point = PointSection { f, params, prefix: Vec::new(), log_w: 0.0, dim };
                measure(&ResidualSection { point, expansion: ExpansionSection::new(basis, c) }, q, &grid, tol)
            }
            (Some(f), _) => measure(&PointSection { f, params, prefix: Vec::new(), log_w: 0.0, dim }, q, &grid, tol),
            _ => unreachable!(),
        }
    };
    let mut prev = run(panels);
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        panels *= 2;
        let cur = run(panels);
        change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        if !cur.is_finite() {
            break;
        }
        if change <= tol || (cur - prev).abs() <= opts.abs_tol {
            return Ok(if q.is_infinite() { cur.max(prev) } else { cur });
        }
        prev = cur;
    }
    Err(Error::NonConvergence { what: "weighted norm quadrature", detail: change })
}

fn combine(parts: &[f64], p: LpIndex) -> f64 {
    match p {
        LpIndex::Infinity => parts.iter().copied().fold(0.0, f64::max),
        LpIndex::Finite(p) => sum2(parts.iter().map(|v| v.powf(p))).powf(1.0 / p),
    }
}

/// `(sum_{|k|_inf <= r} ||D^k f||_{L_p,w}^p)^{1/p}`, or the maximum for `p = inf`.
pub fn sobolev_norm(basis: &Basis, oracle: &FunctionOracle, r: u32, p: LpIndex, opts: &NormOptions) -> Result<f64> {
    if r > 0 && !oracle.has_derivatives() {
        return Err(Error::MissingDerivative);
    }
    let orders = derivative_orders(oracle.dim(), r);
    let mut parts = Vec::with_capacity(orders.len());
    for k in &orders {
        parts.push(lq_norm(basis, Target::Derivative(oracle, k), p, opts)?);
    }
    Ok(combine(&parts, p))
}

/// The same norm for an expansion, with derivatives taken through the
/// differentiation matrix.
pub fn sobolev_norm_expansion(
    basis: &Basis,
    coeffs: &CoeffTensor,
    r: u32,
    p: LpIndex,
    opts: &NormOptions,
) -> Result<f64> {
    let top = (coeffs.degree_box().linf() as usize).max(1);
    if top > basis.max_degree() {
        return Err(Error::TableTooShort { needed: top, available: basis.max_degree() });
    }
    let dmat = basis.differentiation_matrix(top)?;
    let mut parts = Vec::new();
    for order in derivative_orders(coeffs.dim(), r) {
        let mut t = coeffs.clone();
        for (axis, &m) in order.iter().enumerate() {
            for _ in 0..m {
                t = differentiate_axis(&t, &dmat, axis);
            }
        }
        parts.push(lq_norm(basis, Target::Expansion(&t), p, opts)?);
    }
    Ok(combine(&parts, p))
}

/// `rho_k = prod_j (k_j + 1)^{r_lambda}`.
pub fn rho(k: &MultiIndex, r_lambda: f64) -> f64 {
    k.as_slice().iter().map(|&kj| (f64::from(kj) + 1.0).powf(r_lambda)).product()
}

/// `(sum_k |rho_k c_k|^2)^{1/2}`.
pub fn h_norm(coeffs: &CoeffTensor, r_lambda: f64) -> f64 {
    sum2(coeffs.iter().map(|(k, &c)| {
        let v = rho(k, r_lambda) * c;
        v * v
    }))
    .sqrt()
}

/// [`h_norm`] with `r_lambda = (1 - 1/lambda) r` taken from `params`.
pub fn h_norm_for(coeffs: &CoeffTensor, params: &WeightParams) -> f64 {
    h_norm(coeffs, params.rate_exponents().r_lambda)
}
