//! Family documents (JSON or pattern grids) and report serialization.
//!
//! A pattern grid is one row per state over `+` (edge) and `0` (no edge).
//! Whitespace is ignored, `|` marks a class boundary between columns, any
//! line containing `-` separates row blocks, and `#` starts a comment. An
//! explicit `lumping: 0 0 1 1` line overrides the boundaries.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::criteria::{Rule, Verdict};
use crate::digraph::Digraph;
use crate::dimension::DimensionReport;
use crate::error::{Error, Result};
use crate::lumping::{class_label, BlockProfile, LumpingMap};
use crate::witness::Witness;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub num_states: usize,
    pub lumping: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<String>>,
}

impl FamilySpec {
    pub fn from_family(g: &Digraph, k: &LumpingMap) -> Self {
        FamilySpec {
            name: None,
            num_states: g.num_vertices(),
            lumping: k.kappa().to_vec(),
            edges: Some(g.edges().to_vec()),
            pattern: None,
        }
    }

    pub fn into_family(self) -> Result<(Digraph, LumpingMap)> {
        let n = self.num_states;
        if self.lumping.len() != n {
            return Err(Error::SizeMismatch { lumping: self.lumping.len(), graph: n });
        }
        let k = LumpingMap::new(self.lumping)?;
        let g = match (self.edges, self.pattern) {
            (Some(edges), None) => Digraph::new(n, edges)?,
            (None, Some(rows)) => {
                let rows: Vec<&str> = rows.iter().map(String::as_str).collect();
                pattern_graph(&rows, n)?
            }
            _ => return Err(Error::Parse("exactly one of `edges` and `pattern` is required".into())),
        };
        Ok((g, k))
    }
}

fn pattern_graph(rows: &[&str], n: usize) -> Result<Digraph> {
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    let mut edges = Vec::new();
    for (y, row) in rows.iter().enumerate() {
        let cells: Vec<char> = row.chars().filter(|c| !c.is_whitespace() && *c != '|').collect();
        if cells.len() != n {
            return Err(Error::Parse(format!("row {y} has {} entries, expected {n}", cells.len())));
        }
        for (y2, c) in cells.into_iter().enumerate() {
            match c {
                '+' => edges.push((y, y2)),
                '0' => {}
                other => return Err(Error::Parse(format!("unexpected `{other}` in row {y}"))),
            }
        }
    }
    Digraph::new(n, edges)
}

fn parse_grid(text: &str) -> Result<(Digraph, LumpingMap)> {
    let mut rows = Vec::new();
    let mut lumping = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.contains('-') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("lumping:") {
            let k: std::result::Result<Vec<usize>, _> =
                rest.split([' ', ',']).filter(|s| !s.is_empty()).map(str::parse).collect();
            lumping = Some(k.map_err(|e| Error::Parse(format!("bad lumping line: {e}")))?);
            continue;
        }
        rows.push(line);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty pattern".into()));
    }
    let kappa = match lumping {
        Some(k) => k,
        None => {
            // class boundaries from `|` in the first row
            let mut kappa = Vec::new();
            let mut x = 0;
            for c in rows[0].chars().filter(|c| !c.is_whitespace()) {
                if c == '|' {
                    x += 1;
                } else {
                    kappa.push(x);
                }
            }
            if x == 0 {
                return Err(Error::Parse("no lumping given: add `lumping:` or `|` separators".into()));
            }
            kappa
        }
    };
    FamilySpec { name: None, num_states: n, lumping: kappa, edges: None, pattern: Some(rows.iter().map(|s| s.to_string()).collect()) }
        .into_family()
}

/// Parses a JSON family document or a pattern grid.
pub fn parse_family(text: &str) -> Result<(Digraph, LumpingMap)> {
    if text.trim_start().starts_with('{') {
        let spec: FamilySpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.into_family()
    } else {
        parse_grid(text)
    }
}

/// JSON document in edge-list form.
pub fn family_to_json(g: &Digraph, k: &LumpingMap) -> String {
    serde_json::to_string_pretty(&FamilySpec::from_family(g, k)).expect("family specs serialize")
}

fn contiguous(k: &LumpingMap) -> bool {
    k.kappa().windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
}

/// Pattern grid with block separators when classes are contiguous, and an
/// explicit `lumping:` line.
pub fn family_to_grid(g: &Digraph, k: &LumpingMap) -> String {
    let n = g.num_vertices();
    let blocks = contiguous(k);
    let kappa = k.kappa();
    let mut out = String::new();
    let _ = writeln!(out, "lumping: {}", kappa.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    let boundary = |y: usize| blocks && y > 0 && kappa[y] != kappa[y - 1];
    for y in 0..n {
        if boundary(y) {
            let mut sep = String::new();
            for y2 in 0..n {
                if boundary(y2) {
                    sep.push_str("-+-");
                } else if y2 > 0 {
                    sep.push('-');
                }
                sep.push('-');
            }
            let _ = writeln!(out, "{sep}");
        }
        let mut line = String::new();
        for y2 in 0..n {
            if boundary(y2) {
                line.push_str(" | ");
            } else if y2 > 0 {
                line.push(' ');
            }
            line.push(if g.has_edge(y, y2) { '+' } else { '0' });
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

/// Compact `+`/`0` rows joined by `/`, as in the reference data.
pub fn compact_pattern(g: &Digraph) -> String {
    let n = g.num_vertices();
    (0..n)
        .map(|y| (0..n).map(|y2| if g.has_edge(y, y2) { '+' } else { '0' }).collect::<String>())
        .collect::<Vec<_>>()
        .join("/")
}

/// Graph from a compact `+0+/0++/...` pattern.
pub fn parse_compact(pattern: &str) -> Result<Digraph> {
    let rows: Vec<&str> = pattern.trim().split('/').collect();
    pattern_graph(&rows, rows.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub num_blocks: usize,
    pub num_u: usize,
    pub num_r: usize,
    pub merging_blocks: Vec<(usize, usize)>,
    pub multi_row_merging_blocks: Vec<(usize, usize)>,
}

impl From<&BlockProfile> for ProfileSummary {
    fn from(p: &BlockProfile) -> Self {
        ProfileSummary {
            num_blocks: p.blocks.len(),
            num_u: p.u.len(),
            num_r: p.r.len(),
            merging_blocks: p.merging_blocks(),
            multi_row_merging_blocks: p.multi_row_merging.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub family: FamilySpec,
    pub verdict: Verdict,
    pub dimensions: DimensionReport,
    pub profile: ProfileSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub fn rule_name(rule: Rule) -> &'static str {
    match rule {
        Rule::Degenerate => "Degenerate",
        Rule::NoMultiRowMerging => "NoMultiRowMerging",
        Rule::LazyCycle => "LazyCycle",
        Rule::RedundantMergingBlock => "RedundantMergingBlock",
        Rule::SimplifiedInequality => "SimplifiedInequality",
        Rule::DimensionalCriterion => "DimensionalCriterion",
    }
}

/// Block name like `(b,c)`.
pub fn block_name(block: (usize, usize)) -> String {
    format!("({},{})", class_label(block.0), class_label(block.1))
}
