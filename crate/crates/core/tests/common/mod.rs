#![allow(dead_code)]

use lumpex_core::lumping::is_nonvacuous;
use lumpex_core::{Digraph, LumpingMap};
use rand::Rng;

/// Every set partition of `0..n` as a lumping, labels in first-occurrence order.
pub fn all_lumpings(n: usize) -> Vec<LumpingMap> {
    fn grow(kappa: &mut Vec<usize>, n: usize, out: &mut Vec<LumpingMap>) {
        if kappa.len() == n {
            out.push(LumpingMap::new(kappa.clone()).unwrap());
            return;
        }
        let next = kappa.iter().max().map_or(0, |m| m + 1);
        for x in 0..=next {
            kappa.push(x);
            grow(kappa, n, out);
            kappa.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

pub fn nondegenerate(k: &LumpingMap) -> bool {
    k.num_classes() > 1 && k.num_classes() < k.num_states()
}

/// Labeled edge masks of all non-vacuous families on `k`.
pub fn nonvacuous_masks(k: &LumpingMap) -> Vec<u64> {
    let n = k.num_states();
    (1u64..1 << (n * n))
        .filter(|&m| is_nonvacuous(&Digraph::from_mask(n, m), k))
        .collect()
}

/// Random non-vacuous family on `n` states: a random lumping and random edges
/// around a Hamiltonian cycle, completed until block rows agree.
pub fn random_family(n: usize, rng: &mut impl Rng) -> (Digraph, LumpingMap) {
    loop {
        let m = rng.random_range(1..=n);
        let mut kappa: Vec<usize> = (0..n).map(|y| if y < m { y } else { rng.random_range(0..m) }).collect();
        for i in (1..n).rev() {
            kappa.swap(i, rng.random_range(0..=i));
        }
        let k = LumpingMap::new(kappa).unwrap();
        let density = rng.random_range(0.15..0.7);
        let mut edges: Vec<(usize, usize)> = (0..n).map(|y| (y, (y + 1) % n)).collect();
        for y in 0..n {
            for y2 in 0..n {
                if rng.random_bool(density) {
                    edges.push((y, y2));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let g = Digraph::new(n, edges).unwrap();
        if let Some(g) = complete_rows(&g, &k, rng) {
            return (g, k);
        }
    }
}

/// Adds one edge per missing (row, target class) pair so that all rows of a
/// class reach the same classes.
fn complete_rows(g: &Digraph, k: &LumpingMap, rng: &mut impl Rng) -> Option<Digraph> {
    let mut added = Vec::new();
    for &(a, b) in g.edges() {
        let x2 = k.class_of(b);
        for &y in k.class(k.class_of(a)) {
            if !g.successors(y).any(|t| k.class_of(t) == x2) && !added.iter().any(|&(s, t)| s == y && k.class_of(t) == x2) {
                let targets = k.class(x2);
                added.push((y, targets[rng.random_range(0..targets.len())]));
            }
        }
    }
    let g = g.with_edges(&added).ok()?;
    is_nonvacuous(&g, k).then_some(g)
}
