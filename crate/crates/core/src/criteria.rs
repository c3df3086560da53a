//! Combinatorial criteria, the layered decision procedure, and the chaining
//! and diagonal-stripping utilities for nested edge sets.

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, Edge};
use crate::dimension::{dimensional_criterion_from, simplified_inequality, DimensionReport, SimplifiedInequality};
use crate::error::{Error, Result};
use crate::lumping::{block_profile, is_nonvacuous, lumped_graph, BlockProfile, LumpingMap};

/// Default number of class subsets examined per block in the redundancy search.
pub const DEFAULT_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    EFamily,
    NotEFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    Degenerate,
    NoMultiRowMerging,
    LazyCycle,
    RedundantMergingBlock,
    SimplifiedInequality,
    DimensionalCriterion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Degenerate { num_states: usize, num_classes: usize },
    NoMultiRowMerging { merging_blocks: Vec<(usize, usize)> },
    /// Classes in cycle order starting from class 0.
    LazyCycle { cycle: Vec<usize> },
    RedundantMergingBlock { block: (usize, usize), subset: Vec<usize> },
    SimplifiedInequality(SimplifiedInequality),
    DimensionalCriterion(DimensionReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub rule: Rule,
    pub certificate: Certificate,
}

impl Verdict {
    fn new(decision: Decision, rule: Rule, certificate: Certificate) -> Self {
        Verdict { decision, rule, certificate }
    }

    pub fn is_e_family(&self) -> bool {
        self.decision == Decision::EFamily
    }
}

/// |X| = 1 or |X| = |Y|.
pub fn is_degenerate(k: &LumpingMap) -> bool {
    k.num_classes() == 1 || k.num_classes() == k.num_states()
}

/// EFamily when no block has a merging row and at least two rows.
pub fn no_multi_row_criterion(profile: &BlockProfile) -> Option<Verdict> {
    profile.multi_row_merging.is_empty().then(|| {
        Verdict::new(
            Decision::EFamily,
            Rule::NoMultiRowMerging,
            Certificate::NoMultiRowMerging {
                merging_blocks: profile.merging_blocks(),
            },
        )
    })
}

/// EFamily when every within-class edge is a self-loop and the off-diagonal
/// lumped graph is one directed cycle through every class.
pub fn lazy_cycle_criterion(g: &Digraph, k: &LumpingMap) -> Option<Verdict> {
    let m = k.num_classes();
    if m < 2 || k.num_states() != g.num_vertices() {
        return None;
    }
    if g.edges().iter().any(|&(a, b)| a != b && k.class_of(a) == k.class_of(b)) {
        return None;
    }
    let d = lumped_graph(g, k).ok()?.lumped_graph;
    let mut next = vec![None; m];
    let mut indeg = vec![0; m];
    for &(x, x2) in d.edges() {
        if x == x2 {
            continue;
        }
        if next[x].replace(x2).is_some() {
            return None;
        }
        indeg[x2] += 1;
    }
    if indeg.iter().any(|&c| c != 1) {
        return None;
    }
    let mut cycle = vec![0];
    let mut x = next[0]?;
    while x != 0 {
        cycle.push(x);
        x = next[x]?;
    }
    (cycle.len() == m).then(|| Verdict::new(Decision::EFamily, Rule::LazyCycle, Certificate::LazyCycle { cycle }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RedundancyOutcome {
    Redundant(Vec<usize>),
    NotRedundant,
    Unknown,
}

/// Does removing the block's edges from the subgraph on `Y|_T` leave it
/// strongly connected?
fn subset_witnesses(g: &Digraph, k: &LumpingMap, block: (usize, usize), subset: &[usize]) -> bool {
    let keep: Vec<usize> = subset.iter().flat_map(|&x| k.class(x).iter().copied()).collect();
    let (sub, map) = g.induced_subgraph(&keep).expect("classes are in range");
    let removed: Vec<Edge> = sub
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| k.class_of(map[a]) == block.0 && k.class_of(map[b]) == block.1)
        .collect();
    sub.remove_edges(&removed)
        .expect("removed edges come from the subgraph")
        .strongly_connected()
}

/// Subsets of `0..m` containing `must`, as sorted vectors: the full set
/// first, then by increasing size, lexicographic within a size.
fn redundancy_subsets(m: usize, must: &[usize]) -> impl Iterator<Item = Vec<usize>> {
    let must = must.to_vec();
    let free: Vec<usize> = (0..m).filter(|x| !must.contains(x)).collect();
    let f = free.len();
    let full: Vec<usize> = (0..m).collect();
    // sizes stop short of the full set, which goes first
    let rest = (0..f).flat_map(move |size| {
        let free = free.clone();
        let must = must.clone();
        Combinations::new(f, size).map(move |pick| {
            let mut t: Vec<usize> = must.clone();
            t.extend(pick.iter().map(|&i| free[i]));
            t.sort_unstable();
            t
        })
    });
    std::iter::once(full).chain(rest)
}

/// k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    idx: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.idx.clone()?;
        let k = cur.len();
        let mut nxt = cur.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.idx = None;
                break;
            }
            i -= 1;
            if nxt[i] < self.n - k + i {
                nxt[i] += 1;
                for j in i + 1..k {
                    nxt[j] = nxt[j - 1] + 1;
                }
                self.idx = Some(nxt);
                break;
            }
        }
        Some(cur)
    }
}

pub fn is_redundant_block(
    g: &Digraph,
    k: &LumpingMap,
    block: (usize, usize),
    budget: usize,
) -> Result<RedundancyOutcome> {
    let d = lumped_graph(g, k)?.lumped_graph;
    if !d.has_edge(block.0, block.1) {
        return Err(Error::BlockNotInLumpedGraph(block.0, block.1));
    }
    let must: Vec<usize> = if block.0 == block.1 { vec![block.0] } else { vec![block.0, block.1] };
    for (examined, t) in redundancy_subsets(k.num_classes(), &must).enumerate() {
        if examined == budget {
            return Ok(RedundancyOutcome::Unknown);
        }
        if subset_witnesses(g, k, block, &t) {
            return Ok(RedundancyOutcome::Redundant(t));
        }
    }
    Ok(RedundancyOutcome::NotRedundant)
}

/// NotEFamily when some multi-row merging block is redundant.
pub fn redundant_merging_criterion(g: &Digraph, k: &LumpingMap, budget: usize) -> Result<Option<Verdict>> {
    let profile = block_profile(g, k)?;
    redundant_merging_from(g, k, &profile, budget)
}

fn redundant_merging_from(
    g: &Digraph,
    k: &LumpingMap,
    profile: &BlockProfile,
    budget: usize,
) -> Result<Option<Verdict>> {
    for &block in &profile.multi_row_merging {
        if let RedundancyOutcome::Redundant(subset) = is_redundant_block(g, k, block, budget)? {
            return Ok(Some(Verdict::new(
                Decision::NotEFamily,
                Rule::RedundantMergingBlock,
                Certificate::RedundantMergingBlock { block, subset },
            )));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideConfig {
    /// Subset budget per block for the redundancy search.
    pub budget: usize,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig { budget: DEFAULT_BUDGET }
    }
}

/// Layered decision: vacuity check, degenerate lumping, no multi-row merging,
/// lazy cycle, redundant merging block, counting inequality, and finally the
/// dimensional criterion, which always concludes.
pub fn decide(g: &Digraph, k: &LumpingMap, config: &DecideConfig) -> Result<Verdict> {
    let profile = block_profile(g, k)?;
    if is_degenerate(k) {
        return Ok(Verdict::new(
            Decision::EFamily,
            Rule::Degenerate,
            Certificate::Degenerate {
                num_states: k.num_states(),
                num_classes: k.num_classes(),
            },
        ));
    }
    if let Some(v) = no_multi_row_criterion(&profile) {
        return Ok(v);
    }
    if let Some(v) = lazy_cycle_criterion(g, k) {
        return Ok(v);
    }
    if let Some(v) = redundant_merging_from(g, k, &profile, config.budget)? {
        return Ok(v);
    }
    let s = simplified_inequality(g, k, &profile);
    if s.fires() {
        return Ok(Verdict::new(
            Decision::NotEFamily,
            Rule::SimplifiedInequality,
            Certificate::SimplifiedInequality(s),
        ));
    }
    let report = dimensional_criterion_from(g, k, &profile)?;
    let decision = if report.is_e_family { Decision::EFamily } else { Decision::NotEFamily };
    Ok(Verdict::new(decision, Rule::DimensionalCriterion, Certificate::DimensionalCriterion(report)))
}

/// Every layer evaluated independently, for consistency checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerReport {
    pub degenerate: bool,
    pub no_multi_row: bool,
    pub lazy_cycle: bool,
    pub redundant_merging: bool,
    pub simplified: bool,
    pub dimensions: DimensionReport,
}

impl LayerReport {
    /// Names of the layers whose fast-path verdict contradicts the dimensional one.
    pub fn disagreements(&self) -> Vec<&'static str> {
        let e = self.dimensions.is_e_family;
        let mut bad = Vec::new();
        if self.degenerate && !e {
            bad.push("degenerate");
        }
        if self.no_multi_row && !e {
            bad.push("no_multi_row");
        }
        if self.lazy_cycle && !e {
            bad.push("lazy_cycle");
        }
        if self.redundant_merging && e {
            bad.push("redundant_merging");
        }
        if self.simplified && e {
            bad.push("simplified");
        }
        bad
    }
}

pub fn evaluate_layers(g: &Digraph, k: &LumpingMap, config: &DecideConfig) -> Result<LayerReport> {
    let profile = block_profile(g, k)?;
    Ok(LayerReport {
        degenerate: is_degenerate(k),
        no_multi_row: no_multi_row_criterion(&profile).is_some(),
        lazy_cycle: lazy_cycle_criterion(g, k).is_some(),
        redundant_merging: redundant_merging_from(g, k, &profile, config.budget)?.is_some(),
        simplified: simplified_inequality(g, k, &profile).fires(),
        dimensions: dimensional_criterion_from(g, k, &profile)?,
    })
}

fn check_nested(small: &Digraph, big: &Digraph, k: &LumpingMap) -> Result<()> {
    if !small.is_subgraph_of(big) {
        return Err(Error::NotNested);
    }
    if !is_nonvacuous(small, k) || !is_nonvacuous(big, k) {
        return Err(Error::Vacuous);
    }
    Ok(())
}

/// Increasing chain from `small` to `big`: one block-link per new lumped
/// block (its anchor edges in `big`, blocks in lexicographic order), then one
/// edge-link per remaining edge in lexicographic order.
pub fn chain(small: &Digraph, big: &Digraph, k: &LumpingMap) -> Result<Vec<Digraph>> {
    check_nested(small, big, k)?;
    let d_small = lumped_graph(small, k)?.lumped_graph;
    let big_profile = block_profile(big, k)?;
    let mut steps = vec![small.clone()];
    let mut cur = small.clone();
    for (i, &(x, x2)) in big_profile.blocks.iter().enumerate() {
        if d_small.has_edge(x, x2) {
            continue;
        }
        cur = cur.with_edges(&big_profile.anchors[i])?;
        steps.push(cur.clone());
    }
    for &(a, b) in big.edges() {
        if !cur.has_edge(a, b) {
            cur = cur.with_edges(&[(a, b)])?;
            steps.push(cur.clone());
        }
    }
    Ok(steps)
}

/// Closed-form chain length: new edges in old blocks, plus
/// `|E' ∩ block| − |S_x| + 1` for each new block.
pub fn chain_length(small: &Digraph, big: &Digraph, k: &LumpingMap) -> Result<usize> {
    check_nested(small, big, k)?;
    let d_small = lumped_graph(small, k)?.lumped_graph;
    let m = k.num_classes();
    let mut per_block = vec![0usize; m * m];
    let mut old = 0;
    for &(a, b) in big.edges() {
        if small.has_edge(a, b) {
            continue;
        }
        let (x, x2) = (k.class_of(a), k.class_of(b));
        if d_small.has_edge(x, x2) {
            old += 1;
        } else {
            per_block[x * m + x2] += 1;
        }
    }
    let fresh: usize = per_block
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| c - k.class(i / m).len() + 1)
        .sum();
    Ok(old + fresh)
}

/// False only when `big` is an e-family while `small` is not.
pub fn check_monotone_pair(small: &Digraph, big: &Digraph, k: &LumpingMap, config: &DecideConfig) -> Result<bool> {
    check_nested(small, big, k)?;
    let vb = decide(big, k, config)?;
    if !vb.is_e_family() {
        return Ok(true);
    }
    Ok(decide(small, k, config)?.is_e_family())
}

/// Removes every diagonal block `(x,x)` made only of self-loops.
pub fn strip_diagonal_blocks(g: &Digraph, k: &LumpingMap) -> Result<Digraph> {
    if !is_nonvacuous(g, k) {
        return Err(Error::Vacuous);
    }
    let m = k.num_classes();
    let mut only_loops = vec![true; m];
    let mut present = vec![false; m];
    for &(a, b) in g.edges() {
        let x = k.class_of(a);
        if x == k.class_of(b) {
            present[x] = true;
            if a != b {
                only_loops[x] = false;
            }
        }
    }
    let removed: Vec<Edge> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| a == b && present[k.class_of(a)] && only_loops[k.class_of(a)])
        .collect();
    let out = g.remove_edges(&removed)?;
    if !is_nonvacuous(&out, k) {
        return Err(Error::StripVacuous);
    }
    Ok(out)
}
