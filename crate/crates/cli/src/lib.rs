//! Command-line front end. [`run`] parses arguments and returns the exit
//! status with everything that would be printed, so it is testable in-process.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lumpex_core::census::{classify_three_state, enumerate_families, summarize, FamilyClass};
use lumpex_core::criteria::{chain, chain_length, DEFAULT_BUDGET};
use lumpex_core::dimension::{cone_basis, dimensional_criterion, n_basis};
use lumpex_core::exact::IntVector;
use lumpex_core::io::{
    block_name, compact_pattern, family_to_grid, parse_family, rule_name, FamilySpec, ProfileSummary, Report,
    SCHEMA_VERSION,
};
use lumpex_core::lumping::{block_profile, class_label, lumped_graph};
use lumpex_core::witness::{search_witness, Witness, WitnessConfig, WitnessSource, DEFAULT_SEED, DEFAULT_WITNESS_TOL};
use lumpex_core::{
    decide, fixtures, Certificate, DecideConfig, Digraph, DimensionReport, Error, Execution, LumpingMap, Verdict,
};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VACUOUS: i32 = 2;

/// Environment variable overriding the witness seed.
pub const SEED_ENV: &str = "LUMPEX_SEED";

#[derive(Parser, Debug)]
#[command(name = "lumpex", version, about = "Decide whether lumpable stochastic matrices on a digraph form an exponential family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Layered verdict with certificate
    Check {
        /// Family file (JSON or pattern grid), `fixture:NAME`, or `-` for stdin
        file: String,
        /// Subset budget per block for the redundancy search
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Dimension report of the dimensional criterion
    Dims {
        file: String,
        #[command(flatten)]
        out: Output,
    },
    /// Cone basis and N basis as integer matrices over the edges
    Basis {
        file: String,
        #[command(flatten)]
        out: Output,
    },
    /// Numerical non-closure witness search
    Witness {
        file: String,
        /// Random seed (falls back to LUMPEX_SEED, then a fixed default)
        #[arg(long)]
        seed: Option<u64>,
        /// Violation threshold
        #[arg(long, default_value_t = DEFAULT_WITNESS_TOL)]
        tol: f64,
        /// Random attempts after the constructive seeds
        #[arg(long, default_value_t = lumpex_core::witness::DEFAULT_ATTEMPTS)]
        budget: usize,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Classify every non-vacuous family on a small state space
    Census {
        #[arg(long)]
        states: usize,
        /// Class sizes, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Edge-link and block-link chain between nested families
    Chain {
        small: String,
        big: String,
        #[command(flatten)]
        out: Output,
    },
    /// List the bundled fixtures
    Fixtures,
}

#[derive(Args, Debug, Clone, Copy)]
struct Output {
    /// Machine-readable JSON output
    #[arg(long)]
    json: bool,
    /// Include wall-clock timing
    #[arg(long)]
    timing: bool,
}

/// Exit status and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { status: EXIT_OK, stdout, stderr: String::new() }
    }

    fn error(e: &Error) -> Self {
        let status = if matches!(e, Error::Vacuous) { EXIT_VACUOUS } else { EXIT_INPUT };
        Outcome { status, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

/// Process environment consulted by [`run_with_env`].
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub seed: Option<String>,
    pub stdin: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Env { seed: std::env::var(SEED_ENV).ok(), stdin: None }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_env(args, &Env::from_process())
}

pub fn run_with_env<I, T>(args: I, env: &Env) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { status: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(cli.command, env) {
        Ok(out) => Outcome::ok(out),
        Err(e) => Outcome::error(&e),
    }
}

fn dispatch(command: Command, env: &Env) -> Result<String, Error> {
    match command {
        Command::Check { file, budget, out } => check(&load(&file, env)?, budget, out),
        Command::Dims { file, out } => dims(&load(&file, env)?, out),
        Command::Basis { file, out } => basis(&load(&file, env)?, out),
        Command::Witness { file, seed, tol, budget, sequential, out } => {
            let seed = resolve_seed(seed, env)?;
            let config = WitnessConfig { attempts: budget, tol, seed, execution: execution(sequential) };
            witness(&load(&file, env)?, &config, out)
        }
        Command::Census { states, sizes, budget, sequential, out } => {
            census(states, &sizes, &DecideConfig { budget }, execution(sequential), out)
        }
        Command::Chain { small, big, out } => chain_cmd(&load(&small, env)?, &load(&big, env)?, out),
        Command::Fixtures => Ok(fixtures::all().into_iter().map(|(name, _)| format!("fixture:{name}\n")).collect()),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

/// `--seed`, then the environment, then the built-in default.
fn resolve_seed(flag: Option<u64>, env: &Env) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env.seed.as_deref().map(str::trim) {
        None | Some("") => Ok(DEFAULT_SEED),
        Some(s) => s.parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={s} is not an unsigned integer"))),
    }
}

type Family = (Digraph, LumpingMap);

fn load(arg: &str, env: &Env) -> Result<Family, Error> {
    if let Some(name) = arg.strip_prefix("fixture:") {
        let name = if name == "exlc" { "ex_lc" } else { name };
        return fixtures::all()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Parse(format!("unknown fixture `{name}`")));
    }
    let text = if arg == "-" {
        match &env.stdin {
            Some(s) => s.clone(),
            None => std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Parse(format!("stdin: {e}")))?,
        }
    } else {
        std::fs::read_to_string(PathBuf::from(arg)).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    parse_family(&text)
}

fn json_text(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn classes_line(k: &LumpingMap) -> String {
    k.classes()
        .iter()
        .enumerate()
        .map(|(x, c)| {
            let states: Vec<String> = c.iter().map(usize::to_string).collect();
            format!("{} = {{{}}}", class_label(x), states.join(","))
        })
        .collect::<Vec<_>>()
        .join("  ")
}

/// The pattern grid with block separators, without its `lumping:` line.
fn grid(g: &Digraph, k: &LumpingMap) -> String {
    family_to_grid(g, k).lines().skip(1).map(|l| format!("  {l}\n")).collect()
}

fn family_header(out: &mut String, g: &Digraph, k: &LumpingMap) {
    let _ = writeln!(out, "states: {}  edges: {}  classes: {}", g.num_vertices(), g.num_edges(), classes_line(k));
    out.push_str(&grid(g, k));
}

fn blocks(list: &[(usize, usize)]) -> String {
    if list.is_empty() {
        return "none".into();
    }
    list.iter().map(|&b| block_name(b)).collect::<Vec<_>>().join(" ")
}

fn certificate_text(c: &Certificate) -> String {
    match c {
        Certificate::Degenerate { num_states, num_classes } => {
            format!("degenerate lumping ({num_classes} classes on {num_states} states)")
        }
        Certificate::NoMultiRowMerging { merging_blocks } => {
            format!("no multi-row merging block (merging blocks: {})", blocks(merging_blocks))
        }
        Certificate::LazyCycle { cycle } => {
            let mut names: Vec<String> = cycle.iter().map(|&x| class_label(x)).collect();
            if let Some(first) = names.first().cloned() {
                names.push(first);
            }
            format!("lazy cycle {}", names.join(" -> "))
        }
        Certificate::RedundantMergingBlock { block, subset } => {
            let names: Vec<String> = subset.iter().map(|&x| class_label(x)).collect();
            format!("redundant merging block {} within classes {{{}}}", block_name(*block), names.join(","))
        }
        Certificate::SimplifiedInequality(s) => format!("counting inequality {} > {}", s.lhs, s.rhs),
        Certificate::DimensionalCriterion(d) => format!(
            "ehull dimension {} {} target {}",
            d.ehull_sum_dim,
            if d.is_e_family { "=" } else { "!=" },
            d.target
        ),
    }
}

fn dims_text(d: &DimensionReport) -> String {
    format!(
        "manifold {}  span {}  N {}  ehull {}  target {}",
        d.manifold_dim, d.span_dim, d.n_dim, d.ehull_sum_dim, d.target
    )
}

fn verdict_text(v: &Verdict) -> String {
    format!(
        "verdict: {:?}\nrule: {}\ncertificate: {}\n",
        v.decision,
        rule_name(v.rule),
        certificate_text(&v.certificate)
    )
}

fn check((g, k): &Family, budget: usize, out: Output) -> Result<String, Error> {
    let start = Instant::now();
    let verdict = decide(g, k, &DecideConfig { budget })?;
    let dimensions = dimensional_criterion(g, k)?;
    let profile = ProfileSummary::from(&block_profile(g, k)?);
    let timing_ms = out.timing.then(|| elapsed_ms(start));
    if out.json {
        let report = Report {
            schema_version: SCHEMA_VERSION,
            family: FamilySpec::from_family(g, k),
            verdict,
            dimensions,
            profile,
            witness: None,
            timing_ms,
        };
        return Ok(json_text(&report));
    }
    let mut s = String::new();
    family_header(&mut s, g, k);
    s.push_str(&verdict_text(&verdict));
    let _ = writeln!(s, "dimensions: {}", dims_text(&dimensions));
    let _ = writeln!(
        s,
        "blocks: |D| {}  |U| {}  |R| {}  merging {}  multi-row merging {}",
        profile.num_blocks,
        profile.num_u,
        profile.num_r,
        blocks(&profile.merging_blocks),
        blocks(&profile.multi_row_merging_blocks)
    );
    if let Some(ms) = timing_ms {
        let _ = writeln!(s, "time: {ms:.3} ms");
    }
    Ok(s)
}

fn dims((g, k): &Family, out: Output) -> Result<String, Error> {
    let d = dimensional_criterion(g, k)?;
    if out.json {
        return Ok(json_text(&d));
    }
    Ok(format!("{}\ne-family: {}\n", dims_text(&d), d.is_e_family))
}

fn int_rows(vs: &[IntVector]) -> Vec<Vec<String>> {
    vs.iter().map(|v| v.0.iter().map(ToString::to_string).collect()).collect()
}

fn basis((g, k): &Family, out: Output) -> Result<String, Error> {
    let cone = cone_basis(g, k)?;
    let n = n_basis(g);
    if out.json {
        // entries are small integers; emit numbers when they fit
        let to_json = |vs: &[IntVector]| -> serde_json::Value {
            vs.iter()
                .map(|v| match v.to_i64s() {
                    Some(xs) => json!(xs),
                    None => json!(v.0.iter().map(ToString::to_string).collect::<Vec<_>>()),
                })
                .collect()
        };
        return Ok(json_text(&json!({
            "edges": g.edges(),
            "cone_basis": to_json(&cone),
            "n_basis": to_json(&n),
        })));
    }
    let mut s = String::new();
    let header: Vec<String> = g.edges().iter().map(|&(a, b)| format!("{a}{b}")).collect();
    let width = header.iter().map(String::len).max().unwrap_or(1).max(2);
    let row = |cells: &[String]| -> String {
        cells.iter().map(|c| format!("{c:>width$}")).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(s, "edges:      {}", row(&header));
    for (title, vs) in [("cone", &cone), ("N", &n)] {
        let _ = writeln!(s, "{title} basis ({} vectors):", vs.len());
        for r in int_rows(vs) {
            let _ = writeln!(s, "            {}", row(&r));
        }
    }
    Ok(s)
}

fn matrix_text(m: &lumpex_core::StochasticMatrix) -> String {
    let n = m.num_states();
    (0..n)
        .map(|y| {
            let row: Vec<String> = (0..n).map(|t| format!("{:.6}", m.get(y, t))).collect();
            format!("  {}\n", row.join(" "))
        })
        .collect()
}

fn witness((g, k): &Family, config: &WitnessConfig, out: Output) -> Result<String, Error> {
    let start = Instant::now();
    let found: Option<Witness> = search_witness(g, k, config)?;
    let timing_ms = out.timing.then(|| elapsed_ms(start));
    if out.json {
        let mut v = json!({ "seed": config.seed, "tol": config.tol, "attempts": config.attempts, "witness": found });
        if let Some(ms) = timing_ms {
            v["timing_ms"] = json!(ms);
        }
        return Ok(json_text(&v));
    }
    let mut s = String::new();
    match found {
        None => {
            let _ = writeln!(s, "none found ({} attempts, seed {}, tol {:e})", config.attempts, config.seed, config.tol);
        }
        Some(w) => {
            let source = match w.source {
                WitnessSource::Constructive { block } => format!("constructive on block {}", block_name(block)),
                WitnessSource::Random { attempt } => format!("random attempt {attempt} (seed {})", config.seed),
            };
            let _ = writeln!(s, "witness: {source}\nt = {}\nviolation = {:e}", w.t, w.violation);
            let _ = write!(s, "P0:\n{}P1:\n{}", matrix_text(&w.p0), matrix_text(&w.p1));
        }
    }
    if let Some(ms) = timing_ms {
        let _ = writeln!(s, "time: {ms:.3} ms");
    }
    Ok(s)
}

fn class_json(c: &FamilyClass) -> serde_json::Value {
    json!({
        "canonical_key": c.canonical_key,
        "pattern": compact_pattern(&c.representative),
        "lumping": c.lumping,
        "class_size": c.class_size,
        "verdict": c.verdict,
    })
}

fn census(states: usize, sizes: &[usize], config: &DecideConfig, exec: Execution, out: Output) -> Result<String, Error> {
    let start = Instant::now();
    let classes = enumerate_families(states, sizes, config, exec)?;
    let summary = summarize(states, sizes, &classes);
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    // the bundled reference list covers three states with sizes {1, 2}
    let reference = if states == 3 && sorted == [1, 2] {
        let r = classify_three_state(config, exec)?;
        Some((r.matches_reference(), r.unmatched_reference, r.unmatched_classes))
    } else {
        None
    };
    let timing_ms = out.timing.then(|| elapsed_ms(start));
    if out.json {
        let mut v = json!({
            "schema_version": SCHEMA_VERSION,
            "summary": summary,
            "classes": classes.iter().map(class_json).collect::<Vec<_>>(),
        });
        if let Some((ok, refs, cls)) = &reference {
            v["reference"] = json!({ "matches": ok, "unmatched_reference": refs, "unmatched_classes": cls });
        }
        if let Some(ms) = timing_ms {
            v["timing_ms"] = json!(ms);
        }
        return Ok(json_text(&v));
    }
    let mut s = String::new();
    let n = states;
    let _ = writeln!(s, "{:>4}  {:<w$}  {:>6}  {:<11}  rule", "#", "pattern", "count", "verdict", w = n * n + n - 1);
    for (i, c) in classes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>4}  {:<w$}  {:>6}  {:<11}  {}",
            i + 1,
            compact_pattern(&c.representative),
            c.class_size,
            format!("{:?}", c.verdict.decision),
            rule_name(c.verdict.rule),
            w = n * n + n - 1
        );
    }
    let _ = writeln!(
        s,
        "{} classes, {} e-families (states {}, class sizes {:?})",
        summary.num_classes, summary.num_e_families, states, sizes
    );
    if let Some((ok, refs, cls)) = reference {
        if ok {
            let _ = writeln!(s, "reference: all 12 bundled e-family grids matched one-to-one");
        } else {
            let _ = writeln!(s, "reference: MISMATCH (unmatched grids {refs:?}, unmatched classes {})", cls.len());
        }
    }
    if let Some(ms) = timing_ms {
        let _ = writeln!(s, "time: {ms:.3} ms");
    }
    Ok(s)
}

fn chain_cmd((small, ks): &Family, (big, kb): &Family, out: Output) -> Result<String, Error> {
    if ks != kb {
        return Err(Error::Parse("the two families must share the lumping".into()));
    }
    let steps = chain(small, big, ks)?;
    let closed_form = chain_length(small, big, ks)?;
    let links: Vec<(&'static str, Vec<(usize, usize)>)> = steps
        .windows(2)
        .map(|w| {
            let added: Vec<(usize, usize)> = w[1].edges().iter().copied().filter(|&(a, b)| !w[0].has_edge(a, b)).collect();
            let same = lumped_graph(&w[0], ks).map(|d| d.lumped_graph) == lumped_graph(&w[1], ks).map(|d| d.lumped_graph);
            (if same { "edge" } else { "block" }, added)
        })
        .collect();
    if out.json {
        let v = json!({
            "length": links.len(),
            "closed_form_length": closed_form,
            "links": links.iter().map(|(kind, added)| json!({ "kind": kind, "added": added })).collect::<Vec<_>>(),
        });
        return Ok(json_text(&v));
    }
    let mut s = String::new();
    let _ = writeln!(s, "chain length {} (closed form {})", links.len(), closed_form);
    for (i, (kind, added)) in links.iter().enumerate() {
        let edges: Vec<String> = added.iter().map(|(a, b)| format!("({a},{b})")).collect();
        let _ = writeln!(s, "{:>3}. {kind}-link +{}", i + 1, edges.join(" "));
    }
    Ok(s)
}
