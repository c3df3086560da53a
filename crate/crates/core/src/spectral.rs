//! Dense nonnegative matrices on a digraph: Perron–Frobenius eigenpairs,
//! s-normalization and e-geodesics.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Row sums of a stochastic matrix must be within this of 1.
pub const STOCHASTIC_TOL: f64 = 1e-10;
/// Power iteration stops when successive iterates agree to this in ∞-norm.
pub const PF_TOL: f64 = 1e-14;
/// The iterated power must match a rank-one matrix to this, entrywise relative.
const RANK_ONE_TOL: f64 = 1e-10;

/// Real function on the edges of a digraph, stored as a dense matrix that is
/// zero off the edge set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEdgeFunction", into = "RawEdgeFunction")]
pub struct EdgeFunction {
    graph: Digraph,
    values: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawEdgeFunction {
    graph: Digraph,
    /// One value per edge, in lexicographic edge order.
    values: Vec<f64>,
}

impl TryFrom<RawEdgeFunction> for EdgeFunction {
    type Error = Error;

    fn try_from(raw: RawEdgeFunction) -> Result<Self> {
        EdgeFunction::from_edge_values(raw.graph, &raw.values)
    }
}

impl From<EdgeFunction> for RawEdgeFunction {
    fn from(f: EdgeFunction) -> Self {
        RawEdgeFunction {
            values: f.edge_values(),
            graph: f.graph,
        }
    }
}

impl EdgeFunction {
    pub fn new(graph: Digraph, values: DMatrix<f64>) -> Result<Self> {
        let n = graph.num_vertices();
        if values.shape() != (n, n) {
            return Err(Error::DimensionMismatch(values.nrows(), n));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositive);
        }
        for a in 0..n {
            for b in 0..n {
                if values[(a, b)] != 0.0 && !graph.has_edge(a, b) {
                    return Err(Error::NotPositive);
                }
            }
        }
        Ok(EdgeFunction { graph, values })
    }

    pub fn from_edge_values(graph: Digraph, vals: &[f64]) -> Result<Self> {
        if vals.len() != graph.num_edges() {
            return Err(Error::DimensionMismatch(vals.len(), graph.num_edges()));
        }
        let n = graph.num_vertices();
        let mut values = DMatrix::zeros(n, n);
        for (&(a, b), &v) in graph.edges().iter().zip(vals) {
            values[(a, b)] = v;
        }
        EdgeFunction::new(graph, values)
    }

    pub fn from_fn(graph: Digraph, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let vals: Vec<f64> = graph.edges().iter().map(|&(a, b)| f(a, b)).collect();
        EdgeFunction::from_edge_values(graph, &vals)
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, y: usize, y2: usize) -> f64 {
        self.values[(y, y2)]
    }

    pub fn num_states(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn edge_values(&self) -> Vec<f64> {
        self.graph.edges().iter().map(|&(a, b)| self.values[(a, b)]).collect()
    }

    /// Strictly positive on every edge.
    pub fn is_positive(&self) -> bool {
        self.graph.edges().iter().all(|&(a, b)| self.values[(a, b)] > 0.0)
    }

    pub fn row_sum(&self, y: usize) -> f64 {
        self.values.row(y).sum()
    }

    /// `diag(w) · F · diag(w)⁻¹`.
    pub fn conjugate(&self, w: &[f64]) -> Result<EdgeFunction> {
        if w.len() != self.num_states() {
            return Err(Error::DimensionMismatch(w.len(), self.num_states()));
        }
        if w.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::NotPositive);
        }
        EdgeFunction::from_fn(self.graph.clone(), |a, b| self.get(a, b) * w[a] / w[b])
    }

    /// Entry-wise log on the edges.
    pub fn log_values(&self) -> Result<Vec<f64>> {
        if !self.is_positive() {
            return Err(Error::NotPositive);
        }
        Ok(self.edge_values().iter().map(|v| v.ln()).collect())
    }
}

/// Edge function that is positive on its support with unit row sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EdgeFunction", into = "EdgeFunction")]
pub struct StochasticMatrix(EdgeFunction);

impl TryFrom<EdgeFunction> for StochasticMatrix {
    type Error = Error;

    fn try_from(f: EdgeFunction) -> Result<Self> {
        StochasticMatrix::new(f)
    }
}

impl From<StochasticMatrix> for EdgeFunction {
    fn from(p: StochasticMatrix) -> Self {
        p.0
    }
}

impl StochasticMatrix {
    pub fn new(f: EdgeFunction) -> Result<Self> {
        if !f.is_positive() {
            return Err(Error::NotPositive);
        }
        for y in 0..f.num_states() {
            let sum = f.row_sum(y);
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic { row: y, sum });
            }
        }
        Ok(StochasticMatrix(f))
    }

    pub fn into_inner(self) -> EdgeFunction {
        self.0
    }
}

impl Deref for StochasticMatrix {
    type Target = EdgeFunction;

    fn deref(&self) -> &EdgeFunction {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfEigenpair {
    pub rho: f64,
    /// Positive right eigenvector normalized to sum 1.
    pub v: Vec<f64>,
}

impl PfEigenpair {
    /// ∞-norm of `F v − ρ v`.
    pub fn residual(&self, f: &EdgeFunction) -> f64 {
        let v = DVector::from_column_slice(&self.v);
        (f.values() * &v - &v * self.rho).amax()
    }
}

/// Right PF pair by power iteration on `F + cI`, `c` the largest row sum.
/// The shift makes the iteration matrix primitive, so periodic supports
/// converge too.
pub fn pf_eigenpair(f: &EdgeFunction) -> Result<PfEigenpair> {
    let n = f.num_states();
    if n == 0 || f.graph().num_edges() == 0 || !f.graph().strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    if !f.is_positive() {
        return Err(Error::NotPositive);
    }
    let c = (0..n).map(|y| f.row_sum(y)).fold(0.0, f64::max);
    let mut a = f.values().clone();
    for i in 0..n {
        a[(i, i)] += c;
    }
    // Each round applies the current power A^(2^k) and then squares it, so
    // round k has taken 2^(k+1) - 1 shifted power steps in total. Small
    // iterate changes alone are not trusted: with a tiny spectral gap the
    // iterates stall long before converging, so the power must also have
    // collapsed to rank one.
    let cap = 100 * n * n;
    let mut v = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..cap {
        let mut w = &a * &v;
        w /= w.sum();
        // relative per entry, so tiny components are resolved too
        let delta = w.iter().zip(v.iter()).map(|(a, b)| (a - b).abs() / a).fold(0.0, f64::max);
        v = w;
        if !delta.is_finite() {
            break;
        }
        if delta < PF_TOL && rank_one_gap(&a, &v) < RANK_ONE_TOL {
            let fv = f.values() * &v;
            let rho = fv.sum() / v.sum();
            return Ok(PfEigenpair {
                rho,
                v: v.iter().copied().collect(),
            });
        }
        a = &a * &a;
        let m = a.amax();
        a /= m;
    }
    Err(Error::NonConvergence(cap))
}

/// Largest relative deviation of `a` from `v · colsums(a)`.
fn rank_one_gap(a: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    let mut gap: f64 = 0.0;
    for (j, col) in a.column_iter().enumerate() {
        let s = col.sum();
        for i in 0..v.len() {
            let want = v[i] * s;
            gap = gap.max((a[(i, j)] - want).abs() / want);
        }
    }
    gap
}

/// `P(y,y') = F(y,y') v(y') / (ρ v(y))`, rows renormalized to absorb rounding.
pub fn s_normalize(f: &EdgeFunction) -> Result<StochasticMatrix> {
    let pf = pf_eigenpair(f)?;
    let n = f.num_states();
    let mut values = DMatrix::zeros(n, n);
    for &(a, b) in f.graph().edges() {
        values[(a, b)] = f.get(a, b) * pf.v[b] / (pf.rho * pf.v[a]);
    }
    for y in 0..n {
        let s = values.row(y).sum();
        values.row_mut(y).apply(|x| *x /= s);
    }
    StochasticMatrix::new(EdgeFunction::new(f.graph().clone(), values)?)
}

/// Entry-wise `exp(Σ αᵢ log Fᵢ)` for weights summing to 1.
pub fn log_combination(fs: &[&EdgeFunction], weights: &[f64]) -> Result<EdgeFunction> {
    if fs.len() != weights.len() {
        return Err(Error::DimensionMismatch(fs.len(), weights.len()));
    }
    let total: f64 = weights.iter().sum();
    if fs.is_empty() || (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum(total));
    }
    let graph = fs[0].graph();
    if fs.iter().any(|f| f.graph() != graph) {
        return Err(Error::SupportMismatch);
    }
    let mut acc = vec![0.0; graph.num_edges()];
    for (f, &w) in fs.iter().zip(weights) {
        for (s, l) in acc.iter_mut().zip(f.log_values()?) {
            *s += w * l;
        }
    }
    let vals: Vec<f64> = acc.iter().map(|s| s.exp()).collect();
    EdgeFunction::from_edge_values(graph.clone(), &vals)
}

/// Point at parameter `t` on the e-geodesic through `p0` (t = 0) and `p1` (t = 1).
pub fn e_geodesic_point(p0: &StochasticMatrix, p1: &StochasticMatrix, t: f64) -> Result<StochasticMatrix> {
    let f = log_combination(&[p0, p1], &[1.0 - t, t])?;
    s_normalize(&f)
}
