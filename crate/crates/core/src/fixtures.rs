//! Bundled example families.

use crate::digraph::Digraph;
use crate::io::{parse_compact, parse_family};
use crate::lumping::LumpingMap;

pub const EX1: &str = include_str!("../fixtures/ex1.json");
pub const EX2: &str = include_str!("../fixtures/ex2.json");
pub const EX_LC: &str = include_str!("../fixtures/ex_lc.txt");
pub const EX6: &str = include_str!("../fixtures/ex6.txt");
pub const THREE_STATE: &str = include_str!("../data/three_state.txt");

fn load(text: &str) -> (Digraph, LumpingMap) {
    parse_family(text).expect("bundled fixtures parse")
}

/// Four states, classes {0} and {1,2,3}, 11 edges.
pub fn ex1() -> (Digraph, LumpingMap) {
    load(EX1)
}

/// Four states, classes {0,1} and {2,3}, 9 edges.
pub fn ex2() -> (Digraph, LumpingMap) {
    load(EX2)
}

/// Lazy cycle on classes {0,1} and {2,3}.
pub fn ex_lc() -> (Digraph, LumpingMap) {
    load(EX_LC)
}

/// Six states in three pairs with a redundant merging block (b,c).
pub fn ex6() -> (Digraph, LumpingMap) {
    load(EX6)
}

/// The twelve reference three-state e-family patterns, lumping `[0, 1, 1]`.
pub fn three_state_grids() -> Vec<Digraph> {
    THREE_STATE
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_compact(l).expect("reference grids parse"))
        .collect()
}

/// Fixture text by name.
pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "ex1" => Some(EX1),
        "ex2" => Some(EX2),
        "ex_lc" | "exlc" => Some(EX_LC),
        "ex6" => Some(EX6),
        _ => None,
    }
}

pub fn names() -> &'static [&'static str] {
    &["ex1", "ex2", "ex_lc", "ex6"]
}

/// All named fixtures plus the reference grids (`grid01`..`grid12`).
pub fn all() -> Vec<(String, (Digraph, LumpingMap))> {
    let mut out: Vec<(String, (Digraph, LumpingMap))> = names()
        .iter()
        .map(|n| (n.to_string(), load(source(n).expect("listed fixture"))))
        .collect();
    let k = LumpingMap::new(vec![0, 1, 1]).expect("surjective");
    for (i, g) in three_state_grids().into_iter().enumerate() {
        out.push((format!("grid{:02}", i + 1), (g, k.clone())));
    }
    out
}
