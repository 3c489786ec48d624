//! Bitmask index sets and (partial) partitions of characters or classes.

use std::fmt;
use std::marker::PhantomData;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A set of indices below 64, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u64);

/// A set of character indices.
pub type IrrSubset = IndexSet;

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        IndexSet(bits)
    }

    /// `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(1 << i)
    }

    /// Build from explicit indices, each of which must be below `k`.
    pub fn from_indices(indices: &[usize], k: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &i in indices {
            if i >= k || i >= 64 {
                return Err(Error::IndexOutOfRange { index: i, k });
            }
            bits |= 1 << i;
        }
        Ok(IndexSet(bits))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    /// Smallest member.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn insert(self, i: usize) -> Self {
        IndexSet(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> Self {
        IndexSet(self.0 & !(1 << i))
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> Indices {
        Indices(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Iterator over the members of an [`IndexSet`], ascending.
pub struct Indices(u64);

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Indices {}

impl IntoIterator for IndexSet {
    type Item = usize;
    type IntoIter = Indices;

    fn into_iter(self) -> Indices {
        self.iter()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet(iter.into_iter().fold(0, |acc, i| acc | 1 << i))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for i in self.iter() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

/// Marker for partitions of `Irr(G)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chars {}

/// Marker for partitions of the conjugacy classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classes {}

/// Pairwise disjoint nonempty blocks over the ground set `{0, …, n-1}`,
/// kept sorted by least member. Partial unless the blocks cover the ground
/// set.
pub struct Partition<K> {
    ground: usize,
    blocks: Vec<IndexSet>,
    _kind: PhantomData<K>,
}

/// A (partial) partition of the irreducible characters.
pub type IrrPartition = Partition<Chars>;
/// A (partial) partition of the conjugacy classes.
pub type ClassPartition = Partition<Classes>;

impl<K> Partition<K> {
    pub fn new(ground: usize, mut blocks: Vec<IndexSet>) -> Result<Self> {
        let universe = IndexSet::full(ground);
        let mut seen = IndexSet::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !b.is_subset(universe) {
                let index = b.difference(universe).min().unwrap();
                return Err(Error::IndexOutOfRange { index, k: ground });
            }
            if !b.is_disjoint(seen) {
                return Err(Error::InvalidPartition(format!("blocks overlap at {}", b.intersection(seen))));
            }
            seen = seen.union(*b);
        }
        blocks.sort_unstable_by_key(|b| IndexSet::min(*b));
        Ok(Partition { ground, blocks, _kind: PhantomData })
    }

    /// Like [`Partition::new`] but additionally requires the blocks to cover
    /// the ground set.
    pub fn full(ground: usize, blocks: Vec<IndexSet>) -> Result<Self> {
        let p = Self::new(ground, blocks)?;
        if !p.is_full() {
            return Err(Error::InvalidPartition(format!(
                "blocks do not cover {}",
                IndexSet::full(ground).difference(p.union())
            )));
        }
        Ok(p)
    }

    pub fn singletons(ground: usize) -> Self {
        Partition { ground, blocks: (0..ground).map(IndexSet::singleton).collect(), _kind: PhantomData }
    }

    /// Group `0..ground` by equal keys. Blocks come out in canonical order.
    pub fn from_keys<T: PartialEq>(keys: &[T]) -> Self {
        let mut reps: Vec<usize> = Vec::new();
        let mut blocks: Vec<IndexSet> = Vec::new();
        for (i, key) in keys.iter().enumerate() {
            match reps.iter().position(|&r| keys[r] == *key) {
                Some(b) => blocks[b] = blocks[b].insert(i),
                None => {
                    reps.push(i);
                    blocks.push(IndexSet::singleton(i));
                }
            }
        }
        Partition { ground: keys.len(), blocks, _kind: PhantomData }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[IndexSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn union(&self) -> IndexSet {
        self.blocks.iter().fold(IndexSet::EMPTY, |acc, b| acc.union(*b))
    }

    pub fn is_full(&self) -> bool {
        self.union() == IndexSet::full(self.ground)
    }

    pub fn contains_block(&self, block: IndexSet) -> bool {
        self.blocks.contains(&block)
    }

    pub fn block_of(&self, i: usize) -> Option<IndexSet> {
        self.blocks.iter().copied().find(|b| b.contains(i))
    }

    /// Add a block, keeping canonical order.
    pub fn with_block(&self, block: IndexSet) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks.push(block);
        Self::new(self.ground, blocks)
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.to_vec()).collect()
    }
}

impl<K> Clone for Partition<K> {
    fn clone(&self) -> Self {
        Partition { ground: self.ground, blocks: self.blocks.clone(), _kind: PhantomData }
    }
}

impl<K> PartialEq for Partition<K> {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.blocks == other.blocks
    }
}

impl<K> Eq for Partition<K> {}

impl<K> std::hash::Hash for Partition<K> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ground.hash(state);
        self.blocks.hash(state);
    }
}

impl<K> PartialOrd for Partition<K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Partition<K> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ground, &self.blocks).cmp(&(other.ground, &other.blocks))
    }
}

impl<K> fmt::Display for Partition<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, b) in self.blocks.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

impl<K> fmt::Debug for Partition<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<K> Serialize for Partition<K> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(&self.blocks)
    }
}

/// `true` iff every block of `coarse` is a union of blocks of `fine`
/// (`fine ⪯ coarse`). Both must be full partitions of the same ground set.
pub fn refines<K>(fine: &Partition<K>, coarse: &Partition<K>) -> Result<bool> {
    if fine.ground != coarse.ground {
        return Err(Error::GroundSetMismatch);
    }
    if !fine.is_full() || !coarse.is_full() {
        return Err(Error::InvalidPartition("refinement needs full partitions".into()));
    }
    Ok(fine.blocks.iter().all(|b| coarse.blocks.iter().any(|c| b.is_subset(*c))))
}
