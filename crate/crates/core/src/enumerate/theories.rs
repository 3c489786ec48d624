//! Enumeration of all supercharacter theories of a table.
//!
//! The oracle tries every set partition with `{0}` as a block. The pruned
//! search builds a partition block by block: the next block is the one
//! containing the least unassigned character `c`. Any theory containing the
//! blocks chosen so far refines their filtration, so the new block lies
//! inside the filtration block of `c`; it must also be good. On integral
//! tables the candidate blocks are screened in bulk before the exact test.

use rayon::prelude::*;
use serde::Serialize;

use super::screen::Screen;
use crate::chartab::CharacterTable;
use crate::error::{Error, Result};
use crate::partition::{IndexSet, IrrPartition, IrrSubset};
use crate::theory::{check_subset, filtration, is_good, is_supertheory, SuperTheory};

/// Largest table the oracle accepts (Bell(11) = 678570 partitions).
pub const ORACLE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Oracle,
    Pruned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryList {
    pub table: String,
    pub count: usize,
    pub theories: Vec<SuperTheory>,
}

impl TheoryList {
    fn new(t: &CharacterTable, mut theories: Vec<SuperTheory>) -> Self {
        theories.sort();
        theories.dedup();
        TheoryList { table: t.name().to_string(), count: theories.len(), theories }
    }
}

pub fn enumerate_theories(t: &CharacterTable, mode: Mode) -> Result<TheoryList> {
    let theories = match mode {
        Mode::Oracle => oracle(t)?,
        Mode::Pruned => {
            let mut search = Search::new(t);
            search.extend(vec![IndexSet::singleton(0)], IndexSet::full(t.k()).remove(0))?;
            search.found
        }
    };
    Ok(TheoryList::new(t, theories))
}

pub fn count_theories(t: &CharacterTable) -> Result<usize> {
    enumerate_theories(t, Mode::Pruned).map(|list| list.count)
}

/// All theories having `X` as a character block.
pub fn extend_block(t: &CharacterTable, x: IrrSubset) -> Result<TheoryList> {
    check_subset(t, x)?;
    if x.contains(0) {
        return Err(Error::InvalidArgument("the block may not contain the trivial character".into()));
    }
    if let Some(w) = is_good(t, x)?.witness() {
        return Err(Error::InvalidArgument(format!(
            "{x} is bad (chars {},{} separate at power {}) and lies in no theory",
            w.chi, w.psi, w.power
        )));
    }
    let mut search = Search::new(t);
    let rest = IndexSet::full(t.k()).remove(0).difference(x);
    search.extend(vec![IndexSet::singleton(0), x], rest)?;
    Ok(TheoryList::new(t, search.found))
}

fn oracle(t: &CharacterTable) -> Result<Vec<SuperTheory>> {
    let k = t.k();
    if k > ORACLE_LIMIT {
        return Err(Error::OracleLimit { k, limit: ORACLE_LIMIT });
    }
    let n = k - 1;
    let mut found = Vec::new();
    // restricted growth strings: labels[i] <= 1 + max(labels[..i])
    let mut labels = vec![0usize; n];
    loop {
        let blocks_needed = labels.iter().max().map_or(0, |&m| m + 1);
        let mut blocks = vec![IndexSet::EMPTY; blocks_needed];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l] = blocks[l].insert(i + 1);
        }
        blocks.push(IndexSet::singleton(0));
        let p = IrrPartition::full(k, blocks)?;
        if let Ok(theory) = is_supertheory(t, &p) {
            found.push(theory);
        }
        // advance to the next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(found);
            }
            i -= 1;
            let bound = labels[..i].iter().max().map_or(0, |&m| m + 1);
            if labels[i] < bound {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                break;
            }
        }
    }
}

/// Gray-code scans shorter than this run on one thread.
const PARALLEL_SCAN_BITS: usize = 16;
const PREFIX_BITS: usize = 6;

struct Search<'a> {
    t: &'a CharacterTable,
    screen: Option<Screen>,
    found: Vec<SuperTheory>,
}

impl<'a> Search<'a> {
    fn new(t: &'a CharacterTable) -> Self {
        Search { t, screen: Screen::new(t), found: Vec::new() }
    }

    fn extend(&mut self, blocks: Vec<IndexSet>, unassigned: IndexSet) -> Result<()> {
        let k = self.t.k();
        let Some(c) = unassigned.min() else {
            if let Ok(theory) = is_supertheory(self.t, &IrrPartition::full(k, blocks)?) {
                self.found.push(theory);
            }
            return Ok(());
        };
        let f = filtration(self.t, &IrrPartition::new(k, blocks.clone())?)?;
        if !blocks.iter().all(|&b| f.contains_block(b)) {
            return Ok(());
        }
        let pool = f.block_of(c).unwrap().intersection(unassigned);
        for y in self.candidates(c, pool)? {
            let mut next = blocks.clone();
            next.push(y);
            self.extend(next, unassigned.difference(y))?;
        }
        Ok(())
    }

    /// Good sets `Y` with `{c} ⊆ Y ⊆ pool`.
    fn candidates(&self, c: usize, pool: IndexSet) -> Result<Vec<IndexSet>> {
        let free: Vec<usize> = pool.remove(c).iter().collect();
        let base = IndexSet::singleton(c);
        let mut survivors = match &self.screen {
            Some(screen) if free.len() > PARALLEL_SCAN_BITS => {
                let (low, high) = free.split_at(free.len() - PREFIX_BITS);
                (0u64..1 << PREFIX_BITS)
                    .into_par_iter()
                    .map(|prefix| {
                        let start = high
                            .iter()
                            .enumerate()
                            .filter(|(b, _)| prefix >> b & 1 == 1)
                            .fold(base, |acc, (_, &a)| acc.insert(a));
                        let mut out = Vec::new();
                        screen.scan(start, low, |y| out.push(y));
                        out
                    })
                    .flatten()
                    .collect()
            }
            Some(screen) => {
                let mut out = Vec::new();
                screen.scan(base, &free, |y| out.push(y));
                out
            }
            None => (0u64..1 << free.len())
                .map(|bits| {
                    free.iter()
                        .enumerate()
                        .filter(|(b, _)| bits >> b & 1 == 1)
                        .fold(base, |acc, (_, &a)| acc.insert(a))
                })
                .collect(),
        };
        survivors.sort();
        let verdicts: Vec<bool> =
            survivors.par_iter().map(|&y| is_good(self.t, y).map(|v| v.is_good())).collect::<Result<_>>()?;
        Ok(survivors.into_iter().zip(verdicts).filter_map(|(y, good)| good.then_some(y)).collect())
    }
}
