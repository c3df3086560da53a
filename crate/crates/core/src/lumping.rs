//! Lumping maps, lumped graphs, the block taxonomy and the Kemeny–Snell test.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, Edge};
use crate::error::{Error, Result};
use crate::spectral::{EdgeFunction, StochasticMatrix};

/// Default relative tolerance for the lumpability test.
pub const DEFAULT_LUMP_TOL: f64 = 1e-8;

/// Surjective map from states `0..n` onto classes `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LumpingMap {
    kappa: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl TryFrom<Vec<usize>> for LumpingMap {
    type Error = Error;

    fn try_from(kappa: Vec<usize>) -> Result<Self> {
        LumpingMap::new(kappa)
    }
}

impl From<LumpingMap> for Vec<usize> {
    fn from(k: LumpingMap) -> Self {
        k.kappa
    }
}

impl LumpingMap {
    pub fn new(kappa: Vec<usize>) -> Result<Self> {
        let m = kappa.iter().map(|&x| x + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); m];
        for (y, &x) in kappa.iter().enumerate() {
            classes[x].push(y);
        }
        if let Some(x) = classes.iter().position(|c| c.is_empty()) {
            return Err(Error::NonSurjective(x));
        }
        Ok(LumpingMap { kappa, classes })
    }

    /// Consecutive classes of the given sizes: sizes `[1, 2]` give `[0, 1, 1]`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::ClassSizes {
                sizes: sizes.to_vec(),
                states: sizes.iter().sum(),
            });
        }
        let kappa = sizes
            .iter()
            .enumerate()
            .flat_map(|(x, &s)| std::iter::repeat_n(x, s))
            .collect();
        LumpingMap::new(kappa)
    }

    pub fn identity(n: usize) -> Self {
        LumpingMap::new((0..n).collect()).expect("identity is surjective")
    }

    pub fn all_to_one(n: usize) -> Self {
        LumpingMap::new(vec![0; n]).expect("constant map onto one class")
    }

    pub fn num_states(&self) -> usize {
        self.kappa.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, y: usize) -> usize {
        self.kappa[y]
    }

    pub fn kappa(&self) -> &[usize] {
        &self.kappa
    }

    /// States of class `x` in ascending order.
    pub fn class(&self, x: usize) -> &[usize] {
        &self.classes[x]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    fn check_graph(&self, g: &Digraph) -> Result<()> {
        if self.num_states() != g.num_vertices() {
            return Err(Error::SizeMismatch {
                lumping: self.num_states(),
                graph: g.num_vertices(),
            });
        }
        Ok(())
    }
}

/// Letter label for class `x`: a, b, ..., z, then x26, x27, ...
pub fn class_label(x: usize) -> String {
    if x < 26 {
        char::from(b'a' + x as u8).to_string()
    } else {
        format!("x{x}")
    }
}

pub struct BlockLabel(pub usize, pub usize);

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", class_label(self.0), class_label(self.1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LumpedStructure {
    pub lumped_graph: Digraph,
    pub class_sizes: Vec<usize>,
}

pub fn lumped_graph(g: &Digraph, k: &LumpingMap) -> Result<LumpedStructure> {
    k.check_graph(g)?;
    let m = k.num_classes();
    let mut present = vec![false; m * m];
    for &(a, b) in g.edges() {
        present[k.class_of(a) * m + k.class_of(b)] = true;
    }
    let blocks = (0..m * m).filter(|&i| present[i]).map(|i| (i / m, i % m));
    Ok(LumpedStructure {
        lumped_graph: Digraph::new(m, blocks)?,
        class_sizes: k.class_sizes(),
    })
}

/// Edge counts `s(y, x')` from each state into each class, row-major.
fn fan_out(g: &Digraph, k: &LumpingMap) -> Vec<usize> {
    let m = k.num_classes();
    let mut s = vec![0; g.num_vertices() * m];
    for &(a, b) in g.edges() {
        s[a * m + k.class_of(b)] += 1;
    }
    s
}

/// True iff some lumpable irreducible stochastic matrix is supported on `g`:
/// the graph has an edge, is strongly connected, and every row of every
/// lumped block reaches the target class.
pub fn is_nonvacuous(g: &Digraph, k: &LumpingMap) -> bool {
    if k.num_states() != g.num_vertices() || g.num_edges() == 0 || !g.strongly_connected() {
        return false;
    }
    let m = k.num_classes();
    let s = fan_out(g, k);
    g.edges().iter().all(|&(a, b)| {
        let (x, x2) = (k.class_of(a), k.class_of(b));
        k.class(x).iter().all(|&y| s[y * m + x2] > 0)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    num_classes: usize,
    /// Lumped edges D in lexicographic order.
    pub blocks: Vec<(usize, usize)>,
    /// `merging_rows[i]` is M for `blocks[i]`.
    pub merging_rows: Vec<Vec<usize>>,
    /// Blocks with at least one non-merging row.
    pub u: Vec<(usize, usize)>,
    /// Edges lying in merging rows, lexicographic.
    pub r: Vec<Edge>,
    /// `anchors[i]` holds one edge per row of `blocks[i]`.
    pub anchors: Vec<Vec<Edge>>,
    /// Blocks with a merging row and at least two rows.
    pub multi_row_merging: Vec<(usize, usize)>,
    s: Vec<usize>,
}

impl BlockProfile {
    /// Number of edges from `y` into class `x2`.
    pub fn s(&self, y: usize, x2: usize) -> usize {
        self.s[y * self.num_classes + x2]
    }

    pub fn block_index(&self, block: (usize, usize)) -> Option<usize> {
        self.blocks.binary_search(&block).ok()
    }

    /// Blocks with a nonempty merging-row set.
    pub fn merging_blocks(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .zip(&self.merging_rows)
            .filter(|(_, m)| !m.is_empty())
            .map(|(&b, _)| b)
            .collect()
    }

    pub fn is_multi_row_merging(&self, block: (usize, usize)) -> bool {
        self.multi_row_merging.binary_search(&block).is_ok()
    }

    /// Sum of |S_x| over lumped edges (x, x').
    pub fn row_total(&self, k: &LumpingMap) -> usize {
        self.blocks.iter().map(|&(x, _)| k.class(x).len()).sum()
    }
}

pub fn block_profile(g: &Digraph, k: &LumpingMap) -> Result<BlockProfile> {
    k.check_graph(g)?;
    if !is_nonvacuous(g, k) {
        return Err(Error::Vacuous);
    }
    let m = k.num_classes();
    let s = fan_out(g, k);
    let blocks: Vec<(usize, usize)> = lumped_graph(g, k)?.lumped_graph.edges().to_vec();
    let mut merging_rows = Vec::with_capacity(blocks.len());
    let mut u = Vec::new();
    let mut multi_row_merging = Vec::new();
    let mut anchors = Vec::with_capacity(blocks.len());
    let mut in_merging_row = vec![false; g.num_vertices() * m];

    for &(x, x2) in &blocks {
        let rows = k.class(x);
        let merging: Vec<usize> = rows.iter().copied().filter(|&y| s[y * m + x2] >= 2).collect();
        if merging.len() < rows.len() {
            u.push((x, x2));
        }
        if !merging.is_empty() && rows.len() >= 2 {
            multi_row_merging.push((x, x2));
        }
        for &y in &merging {
            in_merging_row[y * m + x2] = true;
        }
        let anchor: Vec<Edge> = rows
            .iter()
            .map(|&y| {
                let y2 = g
                    .successors(y)
                    .find(|&b| k.class_of(b) == x2)
                    .expect("non-vacuous block rows are populated");
                (y, y2)
            })
            .collect();
        anchors.push(anchor);
        merging_rows.push(merging);
    }

    let r = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| in_merging_row[a * m + k.class_of(b)])
        .collect();

    Ok(BlockProfile {
        num_classes: m,
        blocks,
        merging_rows,
        u,
        r,
        anchors,
        multi_row_merging,
        s,
    })
}

/// Largest spread of block row sums `F(y, S_x')` across the rows of a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// max over blocks of (max − min) block row sum.
    pub absolute: f64,
    /// The same spread divided by the largest row sum of its block.
    pub relative: f64,
}

pub fn lumpability_violation(f: &EdgeFunction, k: &LumpingMap) -> Result<Violation> {
    k.check_graph(f.graph())?;
    let m = k.num_classes();
    let n = k.num_states();
    let mut sums = vec![0.0; n * m];
    for &(a, b) in f.graph().edges() {
        sums[a * m + k.class_of(b)] += f.get(a, b);
    }
    let mut v = Violation { absolute: 0.0, relative: 0.0 };
    for class in k.classes() {
        for x2 in 0..m {
            let (lo, hi) = class.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
                let t = sums[y * m + x2];
                (lo.min(t), hi.max(t))
            });
            let spread = hi - lo;
            v.absolute = v.absolute.max(spread);
            if hi.abs() > 0.0 {
                v.relative = v.relative.max(spread / hi.abs());
            }
        }
    }
    Ok(v)
}

/// Kemeny–Snell test with tolerance relative to each block's largest row sum.
pub fn is_lumpable(f: &EdgeFunction, k: &LumpingMap, tol: f64) -> bool {
    lumpability_violation(f, k).is_ok_and(|v| v.relative <= tol)
}

pub fn is_lumpable_matrix(p: &StochasticMatrix, k: &LumpingMap, tol: f64) -> bool {
    is_lumpable(p, k, tol)
}

/// Lumped function on D, reading each block sum off the first row of its class.
pub fn push_forward_function(f: &EdgeFunction, k: &LumpingMap, tol: f64) -> Result<EdgeFunction> {
    let v = lumpability_violation(f, k)?;
    if v.relative > tol {
        return Err(Error::NotLumpable(v.relative));
    }
    let d = lumped_graph(f.graph(), k)?.lumped_graph;
    let heads: Vec<usize> = k.classes().iter().map(|c| c[0]).collect();
    EdgeFunction::from_fn(d, |x, x2| {
        k.class(x2).iter().map(|&y2| f.get(heads[x], y2)).sum()
    })
}

pub fn push_forward(p: &StochasticMatrix, k: &LumpingMap, tol: f64) -> Result<StochasticMatrix> {
    StochasticMatrix::new(push_forward_function(p, k, tol)?)
}

/// Sliding-window lift of `base`: states are the edges of `base` and each
/// state lumps onto the head of its edge.
pub fn hudson_expansion(base: &Digraph) -> Result<(Digraph, LumpingMap)> {
    if base.num_edges() == 0 || !base.strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let states = base.edges();
    let mut edges = Vec::new();
    for (i, &(_, head)) in states.iter().enumerate() {
        let lo = states.partition_point(|&(a, _)| a < head);
        for (j, &(tail, _)) in states.iter().enumerate().skip(lo) {
            if tail != head {
                break;
            }
            edges.push((i, j));
        }
    }
    let g = Digraph::new(states.len(), edges)?;
    let k = LumpingMap::new(states.iter().map(|&(_, b)| b).collect())?;
    Ok((g, k))
}

/// The complete digraph on the states of `k`.
pub fn complete_family(k: &LumpingMap) -> Digraph {
    Digraph::complete(k.num_states())
}
