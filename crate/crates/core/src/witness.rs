//! Numerical witnesses `(P0, P1, t)` whose e-geodesic point is not lumpable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lumping::{block_profile, is_lumpable_matrix, lumpability_violation, lumped_graph, LumpingMap};
use crate::spectral::{e_geodesic_point, log_combination, s_normalize, EdgeFunction, StochasticMatrix};

pub const DEFAULT_SEED: u64 = 0x6c75_6d70;
pub const DEFAULT_WITNESS_TOL: f64 = 1e-6;
pub const DEFAULT_ATTEMPTS: usize = 1000;
/// Membership tolerance for the endpoints of a witness.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
pub const T_GRID: [f64; 7] = [2.0, -2.0, 1.0, -1.0, 0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSource {
    Constructive { block: (usize, usize) },
    Random { attempt: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub p0: StochasticMatrix,
    pub p1: StochasticMatrix,
    pub t: f64,
    /// Absolute block-sum spread of the geodesic point.
    pub violation: f64,
    pub source: WitnessSource,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    pub attempts: usize,
    pub tol: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            attempts: DEFAULT_ATTEMPTS,
            tol: DEFAULT_WITNESS_TOL,
            seed: DEFAULT_SEED,
            execution: Execution::default(),
        }
    }
}

/// The pair-sum `η_a + η_b` required for `block`, with the merging row used.
fn eta_budget(g: &Digraph, k: &LumpingMap, block: (usize, usize)) -> Result<(f64, usize, usize, usize)> {
    let p = block_profile(g, k)?;
    if !p.is_multi_row_merging(block) {
        return Err(Error::NotMultiRowMerging(block.0, block.1));
    }
    let i = p.block_index(block).expect("multi-row merging blocks lie in D");
    let star = p.merging_rows[i][0];
    let mut targets = g.successors(star).filter(|&b| k.class_of(b) == block.1);
    let ya = targets.next().expect("merging rows have two targets");
    let yb = targets.next().expect("merging rows have two targets");
    let d = lumped_graph(g, k)?.lumped_graph;
    let c = 2.0 / (d.out_degree(block.0) * p.s(star, block.1)) as f64;
    Ok((c, star, ya, yb))
}

/// The default split `(c/3, 2c/3)` of the pair-sum for `block`.
pub fn default_eta(g: &Digraph, k: &LumpingMap, block: (usize, usize)) -> Result<(f64, f64)> {
    let (c, ..) = eta_budget(g, k, block)?;
    Ok((c / 3.0, 2.0 * c / 3.0))
}

/// `(P_{a,b}, P_{b,a})`: uniform over out-blocks and within-block targets,
/// except `η_a`, `η_b` on the first two targets of the block's first
/// merging row.
pub fn merging_pair_construction(
    g: &Digraph,
    k: &LumpingMap,
    block: (usize, usize),
    eta_a: f64,
    eta_b: f64,
) -> Result<(StochasticMatrix, StochasticMatrix)> {
    let (c, star, ya, yb) = eta_budget(g, k, block)?;
    if !(0.0 < eta_a && eta_a < eta_b && eta_b < 1.0) {
        return Err(Error::InvalidEta(format!("need 0 < {eta_a} < {eta_b} < 1")));
    }
    if (eta_a + eta_b - c).abs() > 1e-12 {
        return Err(Error::InvalidEta(format!("{eta_a} + {eta_b} must equal {c}")));
    }
    let p = block_profile(g, k)?;
    let d = lumped_graph(g, k)?.lumped_graph;
    let build = |ea: f64, eb: f64| -> Result<StochasticMatrix> {
        let f = EdgeFunction::from_fn(g.clone(), |a, b| match (a, b) {
            _ if (a, b) == (star, ya) => ea,
            _ if (a, b) == (star, yb) => eb,
            _ => 1.0 / (d.out_degree(k.class_of(a)) * p.s(a, k.class_of(b))) as f64,
        })?;
        StochasticMatrix::new(f)
    };
    Ok((build(eta_a, eta_b)?, build(eta_b, eta_a)?))
}

fn dirichlet(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..len)
        .map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE))
        .collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

/// Random lumpable stochastic matrix on `g`: each class draws its lumped row
/// from a flat Dirichlet over its out-blocks, and each row splits every block
/// mass over its targets by another flat Dirichlet.
pub fn random_lumpable(g: &Digraph, k: &LumpingMap, rng: &mut impl Rng) -> Result<StochasticMatrix> {
    let d = lumped_graph(g, k)?.lumped_graph;
    let m = k.num_classes();
    let mut block_mass = vec![0.0; m * m];
    for x in 0..m {
        let outs: Vec<usize> = d.successors(x).collect();
        for (&x2, q) in outs.iter().zip(dirichlet(rng, outs.len())) {
            block_mass[x * m + x2] = q;
        }
    }
    let mut vals = vec![0.0; g.num_edges()];
    for y in 0..g.num_vertices() {
        let x = k.class_of(y);
        for x2 in d.successors(x) {
            let idx: Vec<usize> = g
                .successors(y)
                .filter(|&b| k.class_of(b) == x2)
                .map(|b| g.edge_index(y, b).expect("successor edge"))
                .collect();
            if idx.is_empty() {
                return Err(Error::Vacuous);
            }
            for (&i, w) in idx.iter().zip(dirichlet(rng, idx.len())) {
                vals[i] = block_mass[x * m + x2] * w;
            }
        }
    }
    StochasticMatrix::new(EdgeFunction::from_edge_values(g.clone(), &vals)?)
}

/// Random positive lumpable function: a random lumpable matrix with each
/// class's rows scaled by a common factor in `[0.5, 2)`.
pub fn random_lumpable_function(g: &Digraph, k: &LumpingMap, rng: &mut impl Rng) -> Result<EdgeFunction> {
    let p = random_lumpable(g, k, rng)?;
    let scale: Vec<f64> = (0..k.num_classes()).map(|_| rng.random_range(0.5..2.0)).collect();
    EdgeFunction::from_fn(g.clone(), |a, b| p.get(a, b) * scale[k.class_of(a)])
}

/// Relative size of the perturbation probes applied to a geodesic point.
const PROBE: f64 = 1e-10;
/// Largest relative drift of the violation under a probe.
const DRIFT: f64 = 1e-3;

fn point_violation(f: &EdgeFunction, k: &LumpingMap) -> Option<f64> {
    let p = s_normalize(f).ok()?;
    lumpability_violation(&p, k).ok().map(|v| v.absolute)
}

/// Violation of the geodesic point at `t`, if it exceeds `tol` and survives
/// two sign-pattern perturbations of relative size `PROBE`. Nearly
/// decomposable points have PF vectors too ill-conditioned for `f64`, and
/// their apparent violation is rounding noise that the probes expose.
fn stable_violation(p0: &StochasticMatrix, p1: &StochasticMatrix, k: &LumpingMap, t: f64, tol: f64) -> Option<f64> {
    let f = log_combination(&[p0, p1], &[1.0 - t, t]).ok()?;
    let v = point_violation(&f, k)?;
    if v <= tol {
        return None;
    }
    let patterns: [fn(usize, usize) -> bool; 2] = [|a, b| (a + b) % 2 == 0, |a, _| a % 2 == 0];
    for pat in patterns {
        let probe = EdgeFunction::from_fn(f.graph().clone(), |a, b| {
            f.get(a, b) * if pat(a, b) { 1.0 + PROBE } else { 1.0 - PROBE }
        })
        .ok()?;
        if (point_violation(&probe, k)? - v).abs() > DRIFT * v {
            return None;
        }
    }
    Some(v)
}

/// Midpoint witness from the default `η` split on `block`.
pub fn constructive_witness(g: &Digraph, k: &LumpingMap, block: (usize, usize)) -> Result<Witness> {
    let (ea, eb) = default_eta(g, k, block)?;
    let (p0, p1) = merging_pair_construction(g, k, block, ea, eb)?;
    let pt = e_geodesic_point(&p0, &p1, 0.5)?;
    let violation = lumpability_violation(&pt, k)?.absolute;
    Ok(Witness {
        p0,
        p1,
        t: 0.5,
        violation,
        source: WitnessSource::Constructive { block },
    })
}

fn random_attempt(g: &Digraph, k: &LumpingMap, config: &WitnessConfig, attempt: usize) -> Option<Witness> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(attempt as u64));
    let p0 = random_lumpable(g, k, &mut rng).ok()?;
    let p1 = random_lumpable(g, k, &mut rng).ok()?;
    T_GRID.iter().find_map(|&t| {
        stable_violation(&p0, &p1, k, t, config.tol).map(|violation| Witness {
            p0: p0.clone(),
            p1: p1.clone(),
            t,
            violation,
            source: WitnessSource::Random { attempt },
        })
    })
}

/// Constructive midpoints on each multi-row merging block first, then seeded
/// random pairs scanned over the t-grid. The first random hit by attempt
/// index is returned whatever the execution strategy. `None` proves nothing.
pub fn search_witness(g: &Digraph, k: &LumpingMap, config: &WitnessConfig) -> Result<Option<Witness>> {
    let profile = block_profile(g, k)?;
    for &block in &profile.multi_row_merging {
        let w = constructive_witness(g, k, block)?;
        if stable_violation(&w.p0, &w.p1, k, w.t, config.tol).is_some() {
            return Ok(Some(w));
        }
    }
    Ok(config
        .execution
        .find_first(0..config.attempts, |i| random_attempt(g, k, config, i)))
}

/// Recomputes the geodesic point: both endpoints must be lumpable members
/// of the family and the point's violation must exceed `tol`.
pub fn verify_witness(g: &Digraph, k: &LumpingMap, w: &Witness, tol: f64) -> bool {
    if w.p0.graph() != g || w.p1.graph() != g {
        return false;
    }
    if !is_lumpable_matrix(&w.p0, k, MEMBERSHIP_TOL) || !is_lumpable_matrix(&w.p1, k, MEMBERSHIP_TOL) {
        return false;
    }
    stable_violation(&w.p0, &w.p1, k, w.t, tol).is_some()
}
