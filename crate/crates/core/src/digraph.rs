//! Directed graphs on dense vertex sets `0..n` with reachability primitives.
//!
//! Edges are kept in lexicographic `(y, y')` order. That order is the
//! coordinate layout used for every edge function and integer basis vector in
//! the crate, so `edge_index` is the single source of truth for it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDigraph", into = "RawDigraph")]
pub struct Digraph {
    n: usize,
    edges: Vec<Edge>,
    // CSR offsets into `edges`, length n + 1
    offsets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawDigraph {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawDigraph> for Digraph {
    type Error = Error;

    fn try_from(raw: RawDigraph) -> Result<Self> {
        Digraph::new(raw.n, raw.edges)
    }
}

impl From<Digraph> for RawDigraph {
    fn from(g: Digraph) -> Self {
        RawDigraph { n: g.n, edges: g.edges }
    }
}

impl Digraph {
    /// Builds a digraph, rejecting out-of-range endpoints and duplicate edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::EdgeOutOfRange(a, b, n));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted(n, edges))
    }

    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut offsets = vec![0; n + 1];
        for &(a, _) in &edges {
            offsets[a + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Digraph { n, edges, offsets }
    }

    /// Digraph on `n` vertices whose edges are the set bits of `mask`, bit
    /// `y * n + y'` standing for `(y, y')`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n * n <= 64);
        let edges = (0..n * n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (i / n, i % n))
            .collect();
        Self::from_sorted(n, edges)
    }

    /// Row-major adjacency bitmask, inverse of [`Digraph::from_mask`].
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.n * self.n <= 64);
        self.edges
            .iter()
            .fold(0u64, |m, &(a, b)| m | 1 << (a * self.n + b))
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        Self::from_sorted(n, edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn successors(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[self.offsets[y]..self.offsets[y + 1]]
            .iter()
            .map(|&(_, b)| b)
    }

    pub fn out_degree(&self, y: usize) -> usize {
        self.offsets[y + 1] - self.offsets[y]
    }

    /// Position of `(y, y')` in the lexicographic edge order.
    pub fn edge_index(&self, y: usize, y2: usize) -> Option<usize> {
        if y >= self.n {
            return None;
        }
        let lo = self.offsets[y];
        self.edges[lo..self.offsets[y + 1]]
            .binary_search(&(y, y2))
            .ok()
            .map(|i| lo + i)
    }

    pub fn has_edge(&self, y: usize, y2: usize) -> bool {
        self.edge_index(y, y2).is_some()
    }

    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.n == other.n && self.edges.iter().all(|&(a, b)| other.has_edge(a, b))
    }

    /// True iff every vertex reaches every other one. Graphs with at most one
    /// vertex count as strongly connected.
    pub fn strongly_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        // forward and backward reachability from vertex 0
        let fwd = self.reach_from(0, false);
        fwd.iter().all(|&r| r) && self.reach_from(0, true).iter().all(|&r| r)
    }

    fn reach_from(&self, start: usize, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        if reverse {
            let mut preds = vec![Vec::new(); self.n];
            for &(a, b) in &self.edges {
                preds[b].push(a);
            }
            while let Some(v) = stack.pop() {
                for &w in &preds[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        } else {
            while let Some(v) = stack.pop() {
                for w in self.successors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen
    }

    /// Strongly connected components via Tarjan's algorithm. Each component
    /// is sorted, and components are ordered by their smallest member.
    pub fn scc(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0;
        // explicit call stack of (vertex, next successor position)
        let mut calls: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            calls.push((root, self.offsets[root]));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
                if *pos < self.offsets[v + 1] {
                    let w = self.edges[*pos].1;
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        calls.push((w, self.offsets[w]));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
        comps.sort_unstable_by_key(|c| c[0]);
        comps
    }

    /// Subgraph induced on `keep`, relabelled `0..keep.len()` in ascending
    /// original order. Returns the graph and the new-to-old vertex map.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<(Digraph, Vec<usize>)> {
        let mut map: Vec<usize> = keep.to_vec();
        map.sort_unstable();
        map.dedup();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            if v >= self.n {
                return Err(Error::VertexOutOfRange(v));
            }
            new_of[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| new_of[a] != usize::MAX && new_of[b] != usize::MAX)
            .map(|&(a, b)| (new_of[a], new_of[b]))
            .collect();
        // relabelling is monotone, so lexicographic order is preserved
        Ok((Self::from_sorted(map.len(), edges), map))
    }

    /// Same vertex set with `removed` taken out. Every removed edge must exist.
    pub fn remove_edges(&self, removed: &[Edge]) -> Result<Digraph> {
        for &(a, b) in removed {
            if !self.has_edge(a, b) {
                return Err(Error::MissingEdge(a, b));
            }
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| !removed.contains(e))
            .collect();
        Ok(Self::from_sorted(self.n, edges))
    }

    /// Union with extra edges (existing ones are ignored).
    pub fn with_edges(&self, added: &[Edge]) -> Result<Digraph> {
        let mut edges = self.edges.clone();
        for &e in added {
            if !self.has_edge(e.0, e.1) && !edges.contains(&e) {
                edges.push(e);
            }
        }
        Digraph::new(self.n, edges)
    }

    /// Relabels vertices by `perm` (vertex `y` becomes `perm[y]`).
    pub fn relabel(&self, perm: &[usize]) -> Digraph {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a], perm[b]))
            .collect();
        edges.sort_unstable();
        Self::from_sorted(self.n, edges)
    }
}
