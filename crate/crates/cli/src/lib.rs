//! The `sct` command line. Every subcommand reads one CTBL table, prints a
//! human summary or (with `--json`) a JSON document with sorted keys on
//! stdout, and keeps progress and timing on stderr.

use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sct_core::enumerate::{
    enumerate_theories, extend_block, good_sets, verify_exactly_two, Mode, Progress, Scope, SweepOptions,
    SweepReport, TheoryList,
};
use sct_core::{
    conjugation_partition, filtration, galois_partition, is_good, parse_ctbl, table_rationality,
    CharacterTable, IndexSet, IrrPartition, SuperTheory,
};

#[derive(Debug, Parser)]
#[command(name = "sct", version, about = "Supercharacter theories from character tables")]
pub struct Cli {
    /// Print a JSON document instead of the human summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a table and check all of its invariants.
    Validate { file: PathBuf },
    /// Decide whether a set of characters is good.
    IsGood {
        file: PathBuf,
        /// Comma-separated character indices.
        #[arg(long)]
        set: String,
    },
    /// Filtration of a partial partition, blocks separated by `|`.
    Filtration {
        file: PathBuf,
        #[arg(long)]
        blocks: String,
    },
    /// Every good subset of the nonprincipal characters in a size range.
    GoodSets {
        file: PathBuf,
        #[arg(long)]
        min_size: usize,
        #[arg(long)]
        max_size: usize,
        #[command(flatten)]
        workers: Workers,
        /// Reject bad sets modulo two large primes first.
        #[arg(long)]
        modular: bool,
    },
    /// List every supercharacter theory.
    Theories {
        file: PathBuf,
        /// Try every set partition (small tables only).
        #[arg(long, conflicts_with = "pruned")]
        oracle: bool,
        /// Backtrack over good blocks (the default).
        #[arg(long)]
        pruned: bool,
    },
    /// Number of supercharacter theories.
    Count { file: PathBuf },
    /// Check that m(G) and M(G) are the only theories on a scope of subsets.
    VerifyTwo {
        file: PathBuf,
        /// Every subset with size in A..=B.
        #[arg(long, value_name = "A,B", group = "scope")]
        sizes: Option<String>,
        /// N uniformly drawn subsets.
        #[arg(long, value_name = "N", group = "scope", requires = "seed")]
        sample: Option<u64>,
        #[arg(long, requires = "sample")]
        seed: Option<u64>,
        /// Every proper subset of size at least 2.
        #[arg(long, group = "scope")]
        full: bool,
        #[command(flatten)]
        workers: Workers,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Use the modular fast path (default for --sample and --full).
        #[arg(long, conflicts_with = "exact")]
        modular: bool,
        /// Test every subset exactly.
        #[arg(long)]
        exact: bool,
    },
    /// Theories having the given set as a character block.
    Extend {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Rationality plus the conjugation and Galois orbit partitions.
    Classify { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads (default: all cores).
    #[arg(long, env = "SCT_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable or malformed table, bad flag values.
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
        }
    }
}

impl From<sct_core::Error> for CliError {
    fn from(e: sct_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Whether a verification subcommand passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Fail => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn load_table(path: &Path) -> CliResult<CharacterTable> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_ctbl(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `"1,2,5"` to a set of character indices.
pub fn parse_set(text: &str, k: usize) -> CliResult<IndexSet> {
    let indices = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<usize>().map_err(|_| CliError::Input(format!("not an index: {s:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let set = IndexSet::from_indices(&indices, k)?;
    if set.len() != indices.len() {
        return Err(CliError::Input(format!("repeated index in {text:?}")));
    }
    Ok(set)
}

/// `"1,2|3"` to a partial partition.
pub fn parse_blocks(text: &str, k: usize) -> CliResult<IrrPartition> {
    let blocks = text.split('|').map(|b| parse_set(b, k)).collect::<CliResult<Vec<_>>>()?;
    Ok(IrrPartition::new(k, blocks)?)
}

fn parse_pair(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Input(format!("expected A,B, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn check_threads(threads: Option<usize>) -> CliResult<Option<usize>> {
    match threads {
        Some(0) => Err(CliError::Input("--threads must be at least 1".into())),
        t => Ok(t),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report serializes")
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<Outcome> {
    let mut text = String::new();
    let doc: Value;
    let mut outcome = Outcome::Ok;
    match &cli.command {
        Command::Validate { file } => {
            let t = load_table(file)?;
            doc = json!({
                "valid": true,
                "name": t.name(),
                "order": t.order(),
                "exponent": t.exponent(),
                "classes": t.k(),
                "integral": t.is_integral(),
                "sha256": t.digest(),
            });
            writeln!(
                text,
                "ok: {} (order {}, {} classes, exponent {})",
                t.name(),
                t.order(),
                t.k(),
                t.exponent()
            )
            .unwrap();
        }
        Command::IsGood { file, set } => {
            let t = load_table(file)?;
            let x = parse_set(set, t.k())?;
            let verdict = is_good(&t, x)?;
            let mut v = to_json(&verdict);
            v["set"] = to_json(&x);
            doc = v;
            writeln!(text, "{verdict}").unwrap();
        }
        Command::Filtration { file, blocks } => {
            let t = load_table(file)?;
            let p = parse_blocks(blocks, t.k())?;
            let f = filtration(&t, &p)?;
            let kept: Vec<bool> = p.blocks().iter().map(|&b| f.contains_block(b)).collect();
            doc = json!({ "input": to_json(&p), "filtration": to_json(&f), "input_blocks_kept": kept });
            writeln!(text, "{f}").unwrap();
            for (&b, keep) in p.blocks().iter().zip(kept) {
                let state = if keep { "is a block" } else { "is split" };
                writeln!(text, "{b} {state}").unwrap();
            }
        }
        Command::GoodSets { file, min_size, max_size, workers, modular } => {
            let t = load_table(file)?;
            let started = Instant::now();
            let report = with_progress(err, |progress| {
                let opts = SweepOptions {
                    threads: check_threads(workers.threads)?,
                    modular: *modular,
                    progress,
                    ..Default::default()
                };
                Ok(good_sets(&t, *min_size, *max_size, &opts)?)
            })?;
            timing(err, &report, started);
            doc = to_json(&report);
            text.push_str(&sweep_summary(&report));
        }
        Command::Theories { file, oracle, .. } => {
            let t = load_table(file)?;
            let mode = if *oracle { Mode::Oracle } else { Mode::Pruned };
            let started = Instant::now();
            let list = enumerate_theories(&t, mode)?;
            writeln!(err, "wall time {:.3}s", started.elapsed().as_secs_f64()).ok();
            let mut v = to_json(&list);
            v["mode"] = to_json(&mode);
            doc = v;
            text.push_str(&theory_summary(&list));
        }
        Command::Count { file } => {
            let t = load_table(file)?;
            let list = enumerate_theories(&t, Mode::Pruned)?;
            doc = json!({ "table": t.name(), "count": list.count });
            writeln!(text, "{}", list.count).unwrap();
        }
        Command::VerifyTwo { file, sizes, sample, seed, full, workers, checkpoint, modular, exact } => {
            let t = load_table(file)?;
            let scope = match (sizes, sample, full) {
                (Some(s), _, _) => {
                    let (min, max) = parse_pair(s)?;
                    Scope::Sizes { min, max }
                }
                (None, Some(n), _) => Scope::Sample { n: *n, seed: seed.unwrap_or(0) },
                (None, None, true) => Scope::Full,
                _ => return Err(CliError::Input("one of --sizes, --sample or --full is required".into())),
            };
            let use_modular = *modular || (!*exact && !matches!(scope, Scope::Sizes { .. }));
            let started = Instant::now();
            let report = with_progress(err, |progress| {
                let opts = SweepOptions {
                    threads: check_threads(workers.threads)?,
                    modular: use_modular,
                    checkpoint: checkpoint.clone(),
                    progress,
                    ..Default::default()
                };
                Ok(verify_exactly_two(&t, scope, &opts)?)
            })?;
            timing(err, &report.sweep, started);
            doc = to_json(&report);
            if report.pass {
                writeln!(text, "PASS: {} subsets tested, all bad", report.sweep.tested).unwrap();
            } else {
                outcome = Outcome::Fail;
                if !report.min_differs_from_max {
                    writeln!(text, "FAIL: m(G) = M(G)").unwrap();
                } else {
                    let noun = if report.sweep.good == 1 { "subset" } else { "subsets" };
                    writeln!(
                        text,
                        "FAIL: {} good {noun} among {} tested",
                        report.sweep.good, report.sweep.tested
                    )
                    .unwrap();
                }
                for y in &report.sweep.good_sets {
                    writeln!(text, "good {y}").unwrap();
                }
            }
        }
        Command::Extend { file, set } => {
            let t = load_table(file)?;
            let x = parse_set(set, t.k())?;
            let list = extend_block(&t, x)?;
            let mut v = to_json(&list);
            v["block"] = to_json(&x);
            doc = v;
            text.push_str(&theory_summary(&list));
        }
        Command::Classify { file } => {
            let t = load_table(file)?;
            let rationality = table_rationality(&t);
            let conj = conjugation_partition(&t)?;
            let galois = galois_partition(&t)?;
            doc = json!({
                "table": t.name(),
                "rationality": to_json(&rationality),
                "conjugation_partition": to_json(&conj),
                "galois_partition": to_json(&galois),
            });
            writeln!(text, "rationality: {rationality}").unwrap();
            writeln!(text, "conjugation: {conj}").unwrap();
            writeln!(text, "galois: {galois}").unwrap();
        }
    }
    let written = if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap())
    } else {
        out.write_all(text.as_bytes())
    };
    written.map_err(|e| CliError::Input(format!("writing output: {e}")))?;
    Ok(outcome)
}

/// Run a sweep with a progress line on stderr when it is a terminal.
fn with_progress<T>(
    err: &mut dyn Write,
    f: impl FnOnce(Option<&(dyn Fn(&Progress) + Sync)>) -> CliResult<T>,
) -> CliResult<T> {
    if !std::io::stderr().is_terminal() {
        return f(None);
    }
    let show = |p: &Progress| {
        let pct = if p.total == 0 { 100.0 } else { 100.0 * p.done as f64 / p.total as f64 };
        eprint!("\r{pct:6.2}%  tested {}  good {}", p.tested, p.good);
    };
    let result = f(Some(&show));
    writeln!(err).ok();
    result
}

fn timing(err: &mut dyn Write, report: &SweepReport, started: Instant) {
    let workers = if report.workers == 1 { "worker" } else { "workers" };
    writeln!(err, "wall time {:.3}s on {} {workers}", started.elapsed().as_secs_f64(), report.workers).ok();
}

fn sweep_summary(r: &SweepReport) -> String {
    let mut s = format!("tested {}, bad {}, good {}\n", r.tested, r.bad, r.good);
    for y in &r.good_sets {
        writeln!(s, "good {y}").unwrap();
    }
    s
}

fn theory_line(theory: &SuperTheory) -> String {
    format!("chars {}  classes {}", theory.chars, theory.classes)
}

fn theory_summary(list: &TheoryList) -> String {
    let noun = if list.count == 1 { "theory" } else { "theories" };
    let mut s = format!("{} {noun}\n", list.count);
    for theory in &list.theories {
        writeln!(s, "{}", theory_line(theory)).unwrap();
    }
    s
}
