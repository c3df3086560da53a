//! Enumeration of lumpable families on small state spaces up to relabeling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::{decide, DecideConfig, Verdict};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fixtures::three_state_grids;
use crate::lumping::LumpingMap;

/// Largest state space `enumerate_families` accepts.
pub const MAX_CENSUS_STATES: usize = 5;
/// Largest state space a key fits in (n² bits of a `u64`).
pub const MAX_KEY_STATES: usize = 8;

/// Sorted class-size multiset plus the smallest row-major adjacency string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey {
    pub sizes: Vec<usize>,
    pub bits: String,
}

/// Row-major bit-string as an integer whose most significant bit is entry
/// (0,0), so integer order is string order.
fn string_order_mask(g: &Digraph, perm: &[usize]) -> u64 {
    let n = g.num_vertices();
    let top = (n * n).saturating_sub(1);
    g.edges()
        .iter()
        .fold(0u64, |m, &(a, b)| m | 1 << (top - (perm[a] * n + perm[b])))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Relabelings `σ` of the states onto the canonical lumping (classes sorted
/// by size, laid out consecutively) that map each class onto a class.
pub fn admissible_relabelings(k: &LumpingMap) -> Vec<Vec<usize>> {
    let sizes = k.class_sizes();
    let mut canon_sizes: Vec<usize> = sizes.clone();
    canon_sizes.sort_unstable();
    let starts: Vec<usize> = canon_sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();

    let m = sizes.len();
    let mut out = Vec::new();
    for class_perm in permutations(m) {
        // class x goes to canonical class class_perm[x]
        if (0..m).any(|x| sizes[x] != canon_sizes[class_perm[x]]) {
            continue;
        }
        let mut partial = vec![vec![usize::MAX; k.num_states()]];
        for x in 0..m {
            let members = k.class(x);
            let base = starts[class_perm[x]];
            let inner = permutations(members.len());
            partial = partial
                .into_iter()
                .flat_map(|sigma| {
                    inner.iter().map(move |p| {
                        let mut s = sigma.clone();
                        for (i, &y) in members.iter().enumerate() {
                            s[y] = base + p[i];
                        }
                        s
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

fn key_with(g: &Digraph, sizes: &[usize], perms: &[Vec<usize>]) -> CanonicalKey {
    let n = g.num_vertices();
    let best = perms.iter().map(|p| string_order_mask(g, p)).min().unwrap_or(0);
    let bits = (0..n * n).map(|i| if best >> (n * n - 1 - i) & 1 == 1 { '1' } else { '0' }).collect();
    CanonicalKey { sizes: sizes.to_vec(), bits }
}

/// Invariant of the family under relabeling of states and classes.
pub fn canonical_form(g: &Digraph, k: &LumpingMap) -> Result<CanonicalKey> {
    let n = g.num_vertices();
    if n > MAX_KEY_STATES {
        return Err(Error::BoundExceeded(n, MAX_KEY_STATES));
    }
    if k.num_states() != n {
        return Err(Error::SizeMismatch { lumping: k.num_states(), graph: n });
    }
    let mut sizes = k.class_sizes();
    sizes.sort_unstable();
    Ok(key_with(g, &sizes, &admissible_relabelings(k)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyClass {
    pub canonical_key: CanonicalKey,
    /// Member with the smallest edge mask under the enumeration lumping.
    pub representative: Digraph,
    pub lumping: LumpingMap,
    pub verdict: Verdict,
    /// Number of labeled edge sets in the class.
    pub class_size: usize,
}

/// Bit-level non-vacuity test on a row-major mask, for the enumeration loop.
fn mask_nonvacuous(n: usize, mask: u64, kappa: &[usize], class_masks: &[u64]) -> bool {
    if mask == 0 {
        return false;
    }
    let full = (1u64 << n) - 1;
    let rows: Vec<u64> = (0..n).map(|y| mask >> (y * n) & full).collect();
    let mut cols = vec![0u64; n];
    for (y, &r) in rows.iter().enumerate() {
        for (y2, c) in cols.iter_mut().enumerate() {
            *c |= (r >> y2 & 1) << y;
        }
    }
    let reach = |adj: &[u64]| {
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full
    };
    if !reach(&rows) || !reach(&cols) {
        return false;
    }
    // every row of a class must agree on which classes it reaches
    let reached = |y: usize| -> u64 {
        class_masks
            .iter()
            .enumerate()
            .fold(0, |acc, (x, &cm)| acc | u64::from(rows[y] & cm != 0) << x)
    };
    let mut class_reach = vec![None; class_masks.len()];
    (0..n).all(|y| {
        let r = reached(y);
        *class_reach[kappa[y]].get_or_insert(r) == r
    })
}

struct Bucket {
    count: usize,
    min_mask: u64,
}

/// Every non-vacuous family on `n_states` states with the given class sizes
/// (laid out consecutively in the given order), grouped by canonical key
/// and classified. Output is sorted by key.
pub fn enumerate_families(
    n_states: usize,
    class_sizes: &[usize],
    config: &DecideConfig,
    exec: Execution,
) -> Result<Vec<FamilyClass>> {
    if n_states > MAX_CENSUS_STATES {
        return Err(Error::BoundExceeded(n_states, MAX_CENSUS_STATES));
    }
    if class_sizes.iter().sum::<usize>() != n_states || class_sizes.contains(&0) {
        return Err(Error::ClassSizes { sizes: class_sizes.to_vec(), states: n_states });
    }
    let k = LumpingMap::from_sizes(class_sizes)?;
    let n = n_states;
    let perms = admissible_relabelings(&k);
    let mut sorted_sizes = class_sizes.to_vec();
    sorted_sizes.sort_unstable();
    let class_masks: Vec<u64> = k
        .classes()
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &y| m | 1 << y))
        .collect();

    let total: u64 = 1 << (n * n);
    let chunks = 256.min(total as usize);
    let chunk_len = total.div_ceil(chunks as u64);
    let partial = exec.map_range(0..chunks, |c| {
        let lo = c as u64 * chunk_len;
        let hi = (lo + chunk_len).min(total);
        let mut local: BTreeMap<CanonicalKey, Bucket> = BTreeMap::new();
        for mask in lo..hi {
            if !mask_nonvacuous(n, mask, k.kappa(), &class_masks) {
                continue;
            }
            let g = Digraph::from_mask(n, mask);
            let key = key_with(&g, &sorted_sizes, &perms);
            let b = local.entry(key).or_insert(Bucket { count: 0, min_mask: mask });
            b.count += 1;
            b.min_mask = b.min_mask.min(mask);
        }
        local
    });

    let mut merged: BTreeMap<CanonicalKey, Bucket> = BTreeMap::new();
    for local in partial {
        for (key, b) in local {
            let e = merged.entry(key).or_insert(Bucket { count: 0, min_mask: b.min_mask });
            e.count += b.count;
            e.min_mask = e.min_mask.min(b.min_mask);
        }
    }

    let buckets: Vec<(CanonicalKey, Bucket)> = merged.into_iter().collect();
    let classified = exec.map_slice(&buckets, |(key, b)| {
        let g = Digraph::from_mask(n, b.min_mask);
        decide(&g, &k, config).map(|verdict| FamilyClass {
            canonical_key: key.clone(),
            representative: g,
            lumping: k.clone(),
            verdict,
            class_size: b.count,
        })
    });
    classified.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub n_states: usize,
    pub class_sizes: Vec<usize>,
    pub num_classes: usize,
    pub num_e_families: usize,
}

pub fn summarize(n_states: usize, class_sizes: &[usize], classes: &[FamilyClass]) -> CensusSummary {
    CensusSummary {
        n_states,
        class_sizes: class_sizes.to_vec(),
        num_classes: classes.len(),
        num_e_families: classes.iter().filter(|c| c.verdict.is_e_family()).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeStateReport {
    pub classes: Vec<FamilyClass>,
    pub num_classes: usize,
    pub num_e_families: usize,
    /// Reference patterns with no matching e-family class.
    pub unmatched_reference: Vec<String>,
    /// E-family classes matching no reference pattern.
    pub unmatched_classes: Vec<CanonicalKey>,
}

impl ThreeStateReport {
    /// 26 classes, 12 e-families, and a one-to-one match with the reference.
    pub fn matches_reference(&self) -> bool {
        self.num_classes == 26
            && self.num_e_families == 12
            && self.unmatched_reference.is_empty()
            && self.unmatched_classes.is_empty()
    }
}

/// Three states with class sizes {1, 2}, checked against the reference list.
pub fn classify_three_state(config: &DecideConfig, exec: Execution) -> Result<ThreeStateReport> {
    let classes = enumerate_families(3, &[1, 2], config, exec)?;
    let k = LumpingMap::from_sizes(&[1, 2])?;
    let mut reference = Vec::new();
    for g in three_state_grids() {
        reference.push((crate::io::compact_pattern(&g), canonical_form(&g, &k)?));
    }
    let e_keys: Vec<&CanonicalKey> = classes
        .iter()
        .filter(|c| c.verdict.is_e_family())
        .map(|c| &c.canonical_key)
        .collect();
    let unmatched_reference: Vec<String> = reference
        .iter()
        .filter(|(_, key)| !e_keys.contains(&key))
        .map(|(p, _)| p.clone())
        .collect();
    let mut ref_keys: Vec<&CanonicalKey> = reference.iter().map(|(_, key)| key).collect();
    ref_keys.sort();
    ref_keys.dedup();
    let mut unmatched_reference = unmatched_reference;
    if ref_keys.len() != reference.len() {
        unmatched_reference.push("duplicate reference pattern".into());
    }
    let unmatched_classes = e_keys
        .iter()
        .filter(|key| !ref_keys.contains(key))
        .map(|&key| key.clone())
        .collect();
    Ok(ThreeStateReport {
        num_classes: classes.len(),
        num_e_families: e_keys.len(),
        classes,
        unmatched_reference,
        unmatched_classes,
    })
}
