//! Integer bases for the lumpable cone's span and for N(Y,E), and the exact
//! dimensional criterion built from them.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::Result;
use crate::exact::{rank, IntVector};
use crate::lumping::{block_profile, BlockProfile, LumpingMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub manifold_dim: usize,
    pub span_dim: usize,
    pub n_dim: usize,
    pub ehull_sum_dim: usize,
    pub target: usize,
    pub is_e_family: bool,
}

/// The all-ones vector followed by `N_{y0}(y,y') = [y'=y0] − [y=y0]` for y0 ≥ 1.
pub fn n_basis(g: &Digraph) -> Vec<IntVector> {
    let e = g.edges();
    let mut basis = vec![IntVector::from_i64s(&vec![1; e.len()])];
    for y0 in 1..g.num_vertices() {
        let vals: Vec<i64> = e
            .iter()
            .map(|&(a, b)| i64::from(b == y0) - i64::from(a == y0))
            .collect();
        basis.push(IntVector::from_i64s(&vals));
    }
    basis
}

fn cone_basis_from(g: &Digraph, p: &BlockProfile) -> Vec<IntVector> {
    let m = g.num_edges();
    let mut basis = Vec::with_capacity(p.u.len() + p.r.len());
    for &block in &p.u {
        let i = p.block_index(block).expect("U is a subset of D");
        let mut v = IntVector::zeros(m);
        for &(a, b) in &p.anchors[i] {
            v.0[g.edge_index(a, b).expect("anchor edges lie in E")] = BigInt::from(1);
        }
        basis.push(v);
    }
    for &(a, b) in &p.r {
        basis.push(IntVector::unit(m, g.edge_index(a, b).expect("R is a subset of E")));
    }
    basis
}

/// Anchor indicators for blocks in U, then single-edge indicators for R.
pub fn cone_basis(g: &Digraph, k: &LumpingMap) -> Result<Vec<IntVector>> {
    let p = block_profile(g, k)?;
    Ok(cone_basis_from(g, &p))
}

fn manifold_dim_from(g: &Digraph, k: &LumpingMap, p: &BlockProfile) -> usize {
    let plus = g.num_edges() + p.blocks.len();
    let minus = p.row_total(k) + k.num_classes();
    plus.checked_sub(minus)
        .expect("non-vacuous families have nonnegative dimension")
}

/// `|E| − Σ_{(x,x')∈D} |S_x| + |D| − |X|`.
pub fn manifold_dim(g: &Digraph, k: &LumpingMap) -> Result<usize> {
    let p = block_profile(g, k)?;
    Ok(manifold_dim_from(g, k, &p))
}

/// `|U| + |R|`.
pub fn span_dim(g: &Digraph, k: &LumpingMap) -> Result<usize> {
    let p = block_profile(g, k)?;
    Ok(p.u.len() + p.r.len())
}

/// Rank of the cone basis together with the N basis.
pub fn ehull_dim(g: &Digraph, k: &LumpingMap) -> Result<usize> {
    let p = block_profile(g, k)?;
    ehull_dim_from(g, &p)
}

fn ehull_dim_from(g: &Digraph, p: &BlockProfile) -> Result<usize> {
    let mut all = cone_basis_from(g, p);
    all.extend(n_basis(g));
    rank(&all)
}

pub fn dimensional_criterion(g: &Digraph, k: &LumpingMap) -> Result<DimensionReport> {
    let p = block_profile(g, k)?;
    dimensional_criterion_from(g, k, &p)
}

pub(crate) fn dimensional_criterion_from(
    g: &Digraph,
    k: &LumpingMap,
    p: &BlockProfile,
) -> Result<DimensionReport> {
    let manifold_dim = manifold_dim_from(g, k, p);
    let n_dim = g.num_vertices();
    let ehull_sum_dim = ehull_dim_from(g, p)?;
    let target = manifold_dim + n_dim;
    Ok(DimensionReport {
        manifold_dim,
        span_dim: p.u.len() + p.r.len(),
        n_dim,
        ehull_sum_dim,
        target,
        is_e_family: ehull_sum_dim == target,
    })
}

/// Both sides of the counting inequality; the family is not an e-family
/// when `lhs > rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifiedInequality {
    pub lhs: usize,
    pub rhs: usize,
}

impl SimplifiedInequality {
    pub fn fires(&self) -> bool {
        self.lhs > self.rhs
    }
}

pub(crate) fn simplified_inequality(
    g: &Digraph,
    k: &LumpingMap,
    p: &BlockProfile,
) -> SimplifiedInequality {
    let lhs = p.row_total(k);
    let rhs = (p.blocks.len() - p.u.len())
        + (g.num_vertices() - k.num_classes())
        + (g.num_edges() - p.r.len());
    SimplifiedInequality { lhs, rhs }
}

/// `Some` when `Σ|S_x| > (|D|−|U|) + (|Y|−|X|) + (|E|−|R|)`, which rules the
/// family out; `None` is inconclusive.
pub fn simplified_necessary(g: &Digraph, k: &LumpingMap) -> Result<Option<SimplifiedInequality>> {
    let p = block_profile(g, k)?;
    let s = simplified_inequality(g, k, &p);
    Ok(s.fires().then_some(s))
}
