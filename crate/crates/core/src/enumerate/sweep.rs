//! Sweeps over subsets of the nonprincipal characters. Subsets are bitmasks
//! over `m = k-1` bits, bit `b` standing for character `b+1`.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand_core::RngCore;
use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use super::checkpoint::Checkpoint;
use super::screen::Screen;
use crate::chartab::CharacterTable;
use crate::error::{Error, Result};
use crate::modular::{ModularTable, ModularVerdict};
use crate::partition::IndexSet;
use crate::theory::{is_good, max_theory, min_theory};

/// Default number of masks between checkpoint writes.
pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 1 << 20;

const RANGE_CHUNK: u64 = 1 << 16;
const SAMPLE_CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scope {
    /// Every subset with size in `min..=max`.
    Sizes { min: usize, max: usize },
    /// `n` uniformly drawn subsets.
    Sample { n: u64, seed: u64 },
    /// Every proper subset of size at least 2.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepPolicy {
    /// First and last swept character index.
    pub indices: [usize; 2],
    pub scope: Scope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub table: String,
    pub policy: SweepPolicy,
    pub tested: u64,
    pub bad: u64,
    pub good: u64,
    /// Distinct good subsets, ordered by size and then lexicographically.
    pub good_sets: Vec<IndexSet>,
    pub primes: Option<Vec<u64>>,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    pub workers: usize,
}

/// Snapshot passed to a progress callback after each batch.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub done: u64,
    pub total: u64,
    pub tested: u64,
    pub good: u64,
}

pub struct SweepOptions<'a> {
    /// Worker count; `None` uses every core.
    pub threads: Option<usize>,
    /// Use the modular fast path when the table is rational.
    pub modular: bool,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: u64,
    pub progress: Option<&'a (dyn Fn(&Progress) + Sync)>,
}

impl Default for SweepOptions<'_> {
    fn default() -> Self {
        SweepOptions {
            threads: None,
            modular: true,
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            progress: None,
        }
    }
}

/// Smallest `x >= lo` with exactly `s` bits set.
pub fn first_with_popcount(lo: u64, s: u32) -> Option<u64> {
    if lo.count_ones() == s {
        return Some(lo);
    }
    let lo = lo as u128;
    let mut best: Option<u128> = None;
    for i in 0..64u32 {
        if lo >> i & 1 == 1 {
            continue;
        }
        let base = (lo >> (i + 1) << (i + 1)) | 1 << i;
        let c = base.count_ones();
        if c > s || s - c > i {
            continue;
        }
        let cand = base | ((1u128 << (s - c)) - 1);
        if best.is_none_or(|b| cand < b) {
            best = Some(cand);
        }
    }
    best.and_then(|b| u64::try_from(b).ok())
}

/// Next integer with the same popcount (Gosper's hack). `x` must be nonzero.
pub fn next_same_popcount(x: u64) -> Option<u64> {
    let c = x & x.wrapping_neg();
    let r = x.checked_add(c)?;
    Some((((r ^ x) >> 2) / c) | r)
}

#[derive(Default)]
struct Tally {
    tested: u64,
    bad: u64,
    goods: Vec<u64>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.tested += other.tested;
        self.bad += other.bad;
        self.goods.extend(other.goods);
    }
}

enum Checker {
    Exact,
    Modular(ModularTable),
}

struct Sweeper<'a> {
    t: &'a CharacterTable,
    checker: Checker,
    /// Set for full-scope sweeps of integral tables.
    screen: Option<Screen>,
}

impl Sweeper<'_> {
    fn check(&self, mask: u64, tally: &mut Tally) {
        let x = IndexSet::from_bits(mask << 1);
        let good = match &self.checker {
            Checker::Modular(table) => match table.is_good(x) {
                ModularVerdict::Bad(_) => false,
                ModularVerdict::ProbablyGood => self.exact(x),
            },
            Checker::Exact => self.exact(x),
        };
        tally.tested += 1;
        if good {
            tally.goods.push(mask);
        } else {
            tally.bad += 1;
        }
    }

    fn exact(&self, x: IndexSet) -> bool {
        is_good(self.t, x).expect("sweep subsets are valid").is_good()
    }

    /// Masks in `[lo, hi)` with popcount in `sizes`, skipping `skip`.
    fn range(&self, lo: u64, hi: u64, sizes: (u32, u32), skip: u64) -> Tally {
        let width = hi - lo;
        if let Some(screen) = &self.screen {
            if width.is_power_of_two() && lo.is_multiple_of(width) {
                return self.screened(screen, lo, width.trailing_zeros(), sizes, skip);
            }
        }
        let mut tally = Tally::default();
        for s in sizes.0..=sizes.1 {
            let mut x = first_with_popcount(lo, s);
            while let Some(mask) = x.filter(|&v| v < hi) {
                if mask != skip {
                    self.check(mask, &mut tally);
                }
                x = next_same_popcount(mask);
            }
        }
        tally
    }

    /// The aligned block `lo + [0, 2^bits)`: counts come from binomial
    /// sums and only screen survivors are tested individually.
    fn screened(&self, screen: &Screen, lo: u64, bits: u32, sizes: (u32, u32), skip: u64) -> Tally {
        let high = lo.count_ones();
        let in_range = |mask: u64| (sizes.0..=sizes.1).contains(&mask.count_ones()) && mask != skip;
        let mut tested: u64 = (sizes.0..=sizes.1)
            .filter(|&s| s >= high && s - high <= bits)
            .map(|s| binomial(bits as u64, (s - high) as u64))
            .sum();
        if (lo..lo + (1 << bits)).contains(&skip) && (sizes.0..=sizes.1).contains(&skip.count_ones()) {
            tested -= 1;
        }
        let free: Vec<usize> = (1..=bits as usize).collect();
        let mut survivors = Vec::new();
        screen.scan(IndexSet::from_bits(lo << 1), &free, |y| {
            let mask = y.bits() >> 1;
            if in_range(mask) {
                survivors.push(mask);
            }
        });
        survivors.sort_unstable();
        let mut tally = Tally::default();
        for mask in survivors {
            self.check(mask, &mut tally);
        }
        let good = tally.goods.len() as u64;
        Tally { tested, bad: tested - good, goods: tally.goods }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as u64
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn canonical(goods: Vec<u64>) -> Vec<IndexSet> {
    let mut sets: Vec<IndexSet> = goods.into_iter().map(|m| IndexSet::from_bits(m << 1)).collect();
    sets.sort_by_key(|s| (s.len(), s.to_vec()));
    sets.dedup();
    sets
}

/// Run a sweep over the nonprincipal characters of `t`.
pub fn sweep(t: &CharacterTable, scope: Scope, opts: &SweepOptions) -> Result<SweepReport> {
    let start = Instant::now();
    let k = t.k();
    let m = (k - 1) as u32;
    if let Scope::Sizes { min, max } = scope {
        if min < 2 || min > max || max > k - 1 {
            return Err(Error::InvalidRange { min, max, k });
        }
    }
    if opts.checkpoint.is_some() && matches!(scope, Scope::Sample { .. }) {
        return Err(Error::InvalidArgument("checkpointing applies to range sweeps only".into()));
    }
    let checker = match (opts.modular, t.is_integral()) {
        (true, true) => Checker::Modular(ModularTable::new(t)?),
        _ => Checker::Exact,
    };
    let primes = match &checker {
        Checker::Modular(table) => Some(table.primes().to_vec()),
        Checker::Exact => None,
    };
    let screen = match scope {
        Scope::Full => Screen::new(t),
        _ => None,
    };
    let sweeper = Sweeper { t, checker, screen };
    let pool = build_pool(opts.threads)?;
    let tally = pool.install(|| match scope {
        Scope::Sizes { min, max } => range_sweep(&sweeper, m, (min as u32, max as u32), opts),
        Scope::Full => range_sweep(&sweeper, m, (2, m), opts),
        Scope::Sample { n, seed } => Ok(sample_sweep(&sweeper, m, n, seed, opts)),
    })?;
    let good = tally.tested - tally.bad;
    Ok(SweepReport {
        table: t.name().to_string(),
        policy: SweepPolicy { indices: [1.min(k - 1), k - 1], scope },
        tested: tally.tested,
        bad: tally.bad,
        good,
        good_sets: canonical(tally.goods),
        primes,
        wall_time: start.elapsed(),
        workers: pool.current_num_threads(),
    })
}

fn range_sweep(s: &Sweeper, m: u32, sizes: (u32, u32), opts: &SweepOptions) -> Result<Tally> {
    let end: u64 = 1 << m;
    let full = end - 1;
    let mut tally = Tally::default();
    let mut cursor = 0u64;
    if let Some(path) = &opts.checkpoint {
        if let Some(cp) = Checkpoint::read(path)? {
            if cp.digest != s.t.digest() {
                return Err(Error::Checkpoint(format!(
                    "{} was written for a different table",
                    path.display()
                )));
            }
            if cp.last >= full {
                cursor = end;
            } else {
                cursor = cp.last + 1;
            }
            tally = Tally { tested: cp.tested, bad: cp.bad, goods: cp.goods };
        }
    }
    let interval = opts.checkpoint_interval.max(1);
    while cursor < end {
        let batch_end = cursor.saturating_add(interval).min(end);
        let chunks: Vec<(u64, u64)> = (cursor..batch_end)
            .step_by(RANGE_CHUNK as usize)
            .map(|lo| (lo, (lo + RANGE_CHUNK).min(batch_end)))
            .collect();
        let parts: Vec<Tally> = chunks.par_iter().map(|&(lo, hi)| s.range(lo, hi, sizes, full)).collect();
        for part in parts {
            tally.merge(part);
        }
        cursor = batch_end;
        if let Some(path) = &opts.checkpoint {
            Checkpoint {
                digest: s.t.digest(),
                last: cursor - 1,
                tested: tally.tested,
                bad: tally.bad,
                goods: tally.goods.clone(),
            }
            .write(path)?;
        }
        if let Some(progress) = opts.progress {
            progress(&Progress {
                done: cursor,
                total: end,
                tested: tally.tested,
                good: tally.goods.len() as u64,
            });
        }
    }
    Ok(tally)
}

/// Draw `n` masks with at least two bits and not all `m` bits set. The
/// generator is SplitMix64 seeded with `seed`; each draw keeps the low `m`
/// bits of one output and rejected draws are discarded.
pub fn sample_masks(m: u32, n: u64, seed: u64) -> Vec<u64> {
    if m < 3 {
        return Vec::new();
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mask = (1u64 << m) - 1;
    let mut out = Vec::with_capacity(n as usize);
    while (out.len() as u64) < n {
        let x = rng.next_u64() & mask;
        let c = x.count_ones();
        if c >= 2 && c < m {
            out.push(x);
        }
    }
    out
}

fn sample_sweep(s: &Sweeper, m: u32, n: u64, seed: u64, opts: &SweepOptions) -> Tally {
    let masks = sample_masks(m, n, seed);
    let mut tally = Tally::default();
    let batch = (opts.checkpoint_interval.max(1) as usize).max(SAMPLE_CHUNK);
    for (b, block) in masks.chunks(batch).enumerate() {
        let parts: Vec<Tally> = block
            .par_chunks(SAMPLE_CHUNK)
            .map(|chunk| {
                let mut t = Tally::default();
                for &mask in chunk {
                    s.check(mask, &mut t);
                }
                t
            })
            .collect();
        for part in parts {
            tally.merge(part);
        }
        if let Some(progress) = opts.progress {
            progress(&Progress {
                done: (b * batch + block.len()) as u64,
                total: masks.len() as u64,
                tested: tally.tested,
                good: tally.goods.len() as u64,
            });
        }
    }
    tally
}

/// Every subset of the nonprincipal characters with size in
/// `min_size..=max_size`, except the full nonprincipal set.
pub fn good_sets(
    t: &CharacterTable,
    min_size: usize,
    max_size: usize,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    sweep(t, Scope::Sizes { min: min_size, max: max_size }, opts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoReport {
    pub table: String,
    pub min_differs_from_max: bool,
    pub pass: bool,
    pub sweep: SweepReport,
}

/// Check that `m(G) ≠ M(G)` and that every swept subset is bad.
pub fn verify_exactly_two(t: &CharacterTable, scope: Scope, opts: &SweepOptions) -> Result<TwoReport> {
    if t.k() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 characters, table has {}", t.k())));
    }
    let min_differs_from_max = min_theory(t) != max_theory(t);
    let sweep = sweep(t, scope, opts)?;
    Ok(TwoReport {
        table: t.name().to_string(),
        min_differs_from_max,
        pass: min_differs_from_max && sweep.good == 0,
        sweep,
    })
}
