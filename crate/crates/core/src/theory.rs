//! Wedderburn sums, filtrations, the good/bad test, and the supercharacter
//! theory axioms.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::chartab::{dual_coefficients, dual_numerator, CharacterTable, ClassFunction};
use crate::cyclotomic::{Classification, Cyclotomic};
use crate::error::{Error, Result};
use crate::partition::{ClassPartition, IndexSet, IrrPartition, IrrSubset};

/// Two members of a set whose coefficients differ in `σ_X^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Witness {
    pub chi: usize,
    pub psi: usize,
    pub power: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Good,
    Bad(Witness),
}

impl Verdict {
    pub fn is_good(self) -> bool {
        matches!(self, Verdict::Good)
    }

    pub fn witness(self) -> Option<Witness> {
        match self {
            Verdict::Good => None,
            Verdict::Bad(w) => Some(w),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Good => f.write_str("good"),
            Verdict::Bad(w) => write!(f, "bad (witness: chars {},{} at power k={})", w.chi, w.psi, w.power),
        }
    }
}

pub(crate) fn check_subset(t: &CharacterTable, x: IrrSubset) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("character set must be nonempty".into()));
    }
    if let Some(max) = x.max() {
        if max >= t.k() {
            return Err(Error::IndexOutOfRange { index: max, k: t.k() });
        }
    }
    Ok(())
}

/// `σ_X = Σ_{χ∈X} χ(1)·χ`.
pub fn wedderburn_sum(t: &CharacterTable, x: IrrSubset) -> Result<ClassFunction> {
    check_subset(t, x)?;
    let mut out = vec![Cyclotomic::zero(); t.k()];
    for i in x {
        let d = Cyclotomic::from_integer(t.degree(i));
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = slot.add(&d.mul(t.value(i, j)));
        }
    }
    Ok(ClassFunction::new(out))
}

/// Decide whether `X` is good: for each power `k = 2..=n` (n = number of
/// classes) compare the dual coefficients of the members of `X` in `σ_X^k`.
/// Returns the first separating pair, taking `χ = min(X)`.
pub fn is_good(t: &CharacterTable, x: IrrSubset) -> Result<Verdict> {
    check_subset(t, x)?;
    if x.len() == 1 {
        return Ok(Verdict::Good);
    }
    Ok(match t.integer_values() {
        Some(values) => is_good_integral(t, values, x),
        None => is_good_cyclotomic(t, x)?,
    })
}

fn is_good_integral(t: &CharacterTable, values: &[Vec<i64>], x: IrrSubset) -> Verdict {
    let k = t.k();
    let degrees = t.degrees();
    let sizes = t.class_sizes();
    let sigma: Vec<BigInt> = (0..k)
        .map(|j| x.iter().map(|i| degrees[i] as i128 * values[i][j] as i128).sum::<i128>().into())
        .collect();
    let live: Vec<usize> = (0..k).filter(|&j| !sigma[j].is_zero()).collect();
    let weighted: Vec<BigInt> = live.iter().map(|&j| BigInt::from(sizes[j])).collect();
    let mut power = sigma.clone();
    let m = x.min().unwrap();
    for exp in 2..=k as u32 {
        for &j in &live {
            power[j] = &power[j] * &sigma[j];
        }
        let numerator = |i: usize| -> BigInt {
            live.iter().zip(&weighted).map(|(&j, w)| &power[j] * w * values[i][j]).sum()
        };
        let sm = numerator(m);
        for i in x.iter().skip(1) {
            let si = numerator(i);
            if si * degrees[m] != &sm * degrees[i] {
                return Verdict::Bad(Witness { chi: m, psi: i, power: exp });
            }
        }
    }
    Verdict::Good
}

fn is_good_cyclotomic(t: &CharacterTable, x: IrrSubset) -> Result<Verdict> {
    let sigma = wedderburn_sum(t, x)?;
    let mut power = sigma.clone();
    let m = x.min().unwrap();
    let dm = Cyclotomic::from_integer(t.degree(m));
    for exp in 2..=t.k() as u32 {
        power =
            ClassFunction::new(power.values().iter().zip(sigma.values()).map(|(a, b)| a.mul(b)).collect());
        let sm = dual_numerator(t, &power, m);
        for i in x.iter().skip(1) {
            let si = dual_numerator(t, &power, i);
            let di = Cyclotomic::from_integer(t.degree(i));
            if si.mul(&dm) != sm.mul(&di) {
                return Ok(Verdict::Bad(Witness { chi: m, psi: i, power: exp }));
            }
        }
    }
    Ok(Verdict::Good)
}

/// Row-reduced spanning set of a subspace of class functions.
struct Span {
    rows: Vec<(usize, Vec<Cyclotomic>)>,
}

impl Span {
    fn new() -> Self {
        Span { rows: Vec::new() }
    }

    /// Reduce `v` against the span; keep and return the remainder if nonzero.
    fn insert(&mut self, mut v: Vec<Cyclotomic>) -> Result<Option<Vec<Cyclotomic>>> {
        for (pivot, row) in &self.rows {
            let c = v[*pivot].clone();
            if !c.is_zero() {
                for (slot, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *slot = slot.sub(&c.mul(r));
                    }
                }
            }
        }
        let Some(pivot) = v.iter().position(|c| !c.is_zero()) else {
            return Ok(None);
        };
        let inv = v[pivot].inv()?;
        for slot in v.iter_mut() {
            *slot = slot.mul(&inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot].clone();
            if !c.is_zero() {
                for (slot, r) in row.iter_mut().zip(&v) {
                    *slot = slot.sub(&c.mul(r));
                }
            }
        }
        self.rows.push((pivot, v.clone()));
        Ok(Some(v))
    }
}

/// The filtration `F(P)`: characters grouped by equal dual coefficients
/// across the (non-unital) pointwise subalgebra generated by
/// `{σ_X : X ∈ P}`. Always a full partition.
pub fn filtration(t: &CharacterTable, p: &IrrPartition) -> Result<IrrPartition> {
    if p.ground() != t.k() {
        return Err(Error::GroundSetMismatch);
    }
    let generators: Vec<Vec<Cyclotomic>> =
        p.blocks().iter().map(|&b| wedderburn_sum(t, b).map(|f| f.0)).collect::<Result<_>>()?;
    let mut span = Span::new();
    let mut queue = Vec::new();
    for g in &generators {
        if let Some(v) = span.insert(g.clone())? {
            queue.push(v);
        }
    }
    while let Some(v) = queue.pop() {
        if span.rows.len() == t.k() {
            break;
        }
        for g in &generators {
            let prod: Vec<Cyclotomic> = v.iter().zip(g).map(|(a, b)| a.mul(b)).collect();
            if let Some(w) = span.insert(prod)? {
                queue.push(w);
            }
        }
    }
    let coords: Vec<Vec<Cyclotomic>> = span
        .rows
        .into_iter()
        .map(|(_, v)| dual_coefficients(t, &ClassFunction::new(v)))
        .collect::<Result<_>>()?;
    let keys: Vec<Vec<&Cyclotomic>> = (0..t.k()).map(|i| coords.iter().map(|c| &c[i]).collect()).collect();
    Ok(IrrPartition::from_keys(&keys))
}

/// Class partition determined by a full character partition: classes `j`,
/// `m` share a block iff every `σ_X` agrees on them. The flag reports
/// whether the block counts match.
pub fn class_partition_from(t: &CharacterTable, p: &IrrPartition) -> Result<(ClassPartition, bool)> {
    if p.ground() != t.k() {
        return Err(Error::GroundSetMismatch);
    }
    let sums: Vec<ClassFunction> = p.blocks().iter().map(|&b| wedderburn_sum(t, b)).collect::<Result<_>>()?;
    let keys: Vec<Vec<&Cyclotomic>> =
        (0..t.k()).map(|j| sums.iter().map(|s| &s.values()[j]).collect()).collect();
    let classes = ClassPartition::from_keys(&keys);
    let matches = classes.len() == p.len();
    Ok((classes, matches))
}

/// A supercharacter theory: paired full partitions of characters and
/// classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SuperTheory {
    pub chars: IrrPartition,
    pub classes: ClassPartition,
}

/// Why a character partition is not a supercharacter theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    NotFull,
    TrivialNotSingleton,
    IdentityNotSingleton,
    BlockCountMismatch { chars: usize, classes: usize },
    NotConstant { block: IndexSet, classes: IndexSet },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NotFull => f.write_str("character partition does not cover Irr(G)"),
            Rejection::TrivialNotSingleton => f.write_str("{1_G} not a singleton"),
            Rejection::IdentityNotSingleton => f.write_str("{1} not a class block"),
            Rejection::BlockCountMismatch { chars, classes } => {
                write!(f, "|X| = {chars} but |K| = {classes}")
            }
            Rejection::NotConstant { block, classes } => {
                write!(f, "sigma_{block} not constant on class block {classes}")
            }
        }
    }
}

impl std::error::Error for Rejection {}

impl SuperTheory {
    /// Re-check all four defining conditions directly.
    pub fn verify(&self, t: &CharacterTable) -> std::result::Result<(), Rejection> {
        let k = t.k();
        if self.chars.ground() != k || self.classes.ground() != k {
            return Err(Rejection::NotFull);
        }
        if !self.chars.is_full() || !self.classes.is_full() {
            return Err(Rejection::NotFull);
        }
        if self.chars.len() != self.classes.len() {
            return Err(Rejection::BlockCountMismatch {
                chars: self.chars.len(),
                classes: self.classes.len(),
            });
        }
        if !self.classes.contains_block(IndexSet::singleton(0)) {
            return Err(Rejection::IdentityNotSingleton);
        }
        if !self.chars.contains_block(IndexSet::singleton(0)) {
            return Err(Rejection::TrivialNotSingleton);
        }
        for &block in self.chars.blocks() {
            let sigma = wedderburn_sum(t, block).map_err(|_| Rejection::NotFull)?;
            for &cb in self.classes.blocks() {
                let first = &sigma.values()[cb.min().unwrap()];
                if cb.iter().any(|j| sigma.values()[j] != *first) {
                    return Err(Rejection::NotConstant { block, classes: cb });
                }
            }
        }
        Ok(())
    }
}

/// Accept `p` as the character partition of a supercharacter theory, or
/// name the violated condition.
pub fn is_supertheory(t: &CharacterTable, p: &IrrPartition) -> std::result::Result<SuperTheory, Rejection> {
    if p.ground() != t.k() || !p.is_full() {
        return Err(Rejection::NotFull);
    }
    if !p.contains_block(IndexSet::singleton(0)) {
        return Err(Rejection::TrivialNotSingleton);
    }
    let (classes, matches) = class_partition_from(t, p).map_err(|_| Rejection::NotFull)?;
    if !matches {
        return Err(Rejection::BlockCountMismatch { chars: p.len(), classes: classes.len() });
    }
    if !classes.contains_block(IndexSet::singleton(0)) {
        return Err(Rejection::IdentityNotSingleton);
    }
    Ok(SuperTheory { chars: p.clone(), classes })
}

/// `m(G)`: singleton characters, conjugacy classes.
pub fn min_theory(t: &CharacterTable) -> SuperTheory {
    is_supertheory(t, &IrrPartition::singletons(t.k()))
        .expect("the singleton partition is always a supercharacter theory")
}

/// `M(G)`: `{1_G}` against the rest.
pub fn max_theory(t: &CharacterTable) -> SuperTheory {
    is_supertheory(t, &max_partition(t.k()))
        .expect("{1_G} against the rest is always a supercharacter theory")
}

pub(crate) fn max_partition(k: usize) -> IrrPartition {
    let rest = IndexSet::full(k).remove(0);
    let mut blocks = vec![IndexSet::singleton(0)];
    if !rest.is_empty() {
        blocks.push(rest);
    }
    IrrPartition::full(k, blocks).unwrap()
}

fn find_row(t: &CharacterTable, row: &[Cyclotomic]) -> Option<usize> {
    (0..t.k()).find(|&l| t.row(l) == row)
}

/// Orbits of complex conjugation on `Irr(G)`.
pub fn conjugation_partition(t: &CharacterTable) -> Result<IrrPartition> {
    let mut keys = Vec::with_capacity(t.k());
    for i in 0..t.k() {
        let l = find_row(t, t.conj_row(i)).ok_or_else(|| {
            Error::Invariant(format!("conjugate of character {i} is not a row of the table"))
        })?;
        keys.push(i.min(l));
    }
    Ok(IrrPartition::from_keys(&keys))
}

/// Orbits of `Gal(Q(ζ_e)/Q)` on `Irr(G)`, `e` the exponent.
pub fn galois_partition(t: &CharacterTable) -> Result<IrrPartition> {
    let k = t.k();
    let mut parent: Vec<usize> = (0..k).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let rational = t.rows().iter().flatten().all(Cyclotomic::is_rational);
    if !rational {
        let e = t.exponent() as i64;
        for g in 2..e {
            if num_integer::gcd(g, e) != 1 {
                continue;
            }
            for i in 0..k {
                let twisted: Vec<Cyclotomic> =
                    t.row(i).iter().map(|v| v.galois(g)).collect::<std::result::Result<_, _>>()?;
                let l = find_row(t, &twisted).ok_or_else(|| {
                    Error::Invariant(format!(
                        "Galois image of character {i} under {g} is not a row of the table"
                    ))
                })?;
                let (a, b) = (root(&mut parent, i), root(&mut parent, l));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let keys: Vec<usize> = (0..k).map(|i| root(&mut parent, i)).collect();
    Ok(IrrPartition::from_keys(&keys))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationality {
    Rational,
    Real,
    Neither,
}

impl fmt::Display for Rationality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rationality::Rational => "rational",
            Rationality::Real => "real",
            Rationality::Neither => "neither",
        })
    }
}

pub fn table_rationality(t: &CharacterTable) -> Rationality {
    let mut all_rational = true;
    for v in t.rows().iter().flatten() {
        match v.classify() {
            Classification::Rational(_) => {}
            Classification::Real => all_rational = false,
            Classification::Complex => return Rationality::Neither,
        }
    }
    if all_rational {
        Rationality::Rational
    } else {
        Rationality::Real
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::partition::refines;

    fn set(v: &[usize]) -> IrrSubset {
        v.iter().copied().collect()
    }

    fn part(k: usize, blocks: &[&[usize]]) -> IrrPartition {
        IrrPartition::new(k, blocks.iter().map(|b| set(b)).collect()).unwrap()
    }

    #[test]
    fn wedderburn_examples() {
        let s3 = fixtures::load("s3");
        assert_eq!(wedderburn_sum(&s3, set(&[0, 1, 2])).unwrap(), ClassFunction::from_integers(&[6, 0, 0]));
        assert_eq!(wedderburn_sum(&s3, set(&[0])).unwrap(), ClassFunction::ones(3));
        assert_eq!(wedderburn_sum(&s3, set(&[1, 2])).unwrap(), ClassFunction::from_integers(&[5, -1, -1]));
        assert!(wedderburn_sum(&s3, set(&[3])).is_err());
        assert!(wedderburn_sum(&s3, IndexSet::EMPTY).is_err());
    }

    #[test]
    fn good_examples() {
        let s3 = fixtures::load("s3");
        assert_eq!(is_good(&s3, set(&[1, 2])).unwrap(), Verdict::Good);
        for t in fixtures::all() {
            for i in 0..t.k() {
                assert!(is_good(&t, set(&[i])).unwrap().is_good());
            }
        }
        let z5 = fixtures::load("z5");
        // σ² = χ₂ + 2χ₃ + χ₄, so χ₁ and χ₂ already differ at k = 2
        assert_eq!(is_good(&z5, set(&[1, 2])).unwrap(), Verdict::Bad(Witness { chi: 1, psi: 2, power: 2 }));
        assert!(is_good(&z5, set(&[1, 4])).unwrap().is_good());
    }

    #[test]
    fn integral_and_cyclotomic_paths_agree() {
        let s4 = fixtures::load("s4");
        for bits in 1u64..32 {
            let x = IndexSet::from_bits(bits);
            assert_eq!(is_good(&s4, x).unwrap(), is_good_cyclotomic(&s4, x).unwrap(), "{x}");
        }
    }

    #[test]
    fn filtration_examples() {
        let s3 = fixtures::load("s3");
        assert_eq!(filtration(&s3, &part(3, &[&[1, 2]])).unwrap(), part(3, &[&[0], &[1, 2]]));
        let z5 = fixtures::load("z5");
        let f = filtration(&z5, &part(5, &[&[1, 2]])).unwrap();
        assert_ne!(f.block_of(1), f.block_of(2));
        assert!(filtration(&z5, &part(5, &[&[1, 4]])).unwrap().contains_block(set(&[1, 4])));
        // nothing generates the zero algebra, which separates nothing
        assert_eq!(filtration(&z5, &IrrPartition::new(5, vec![]).unwrap()).unwrap().len(), 1);
    }

    #[test]
    fn class_partition_examples() {
        for t in fixtures::all() {
            let k = t.k();
            let (classes, ok) = class_partition_from(&t, &max_partition(k)).unwrap();
            assert!(ok);
            if k > 1 {
                assert_eq!(classes.to_vecs(), vec![vec![0], (1..k).collect::<Vec<_>>()]);
            }
            let (classes, ok) = class_partition_from(&t, &IrrPartition::singletons(k)).unwrap();
            assert!(ok);
            assert_eq!(classes, ClassPartition::singletons(k));
        }
        let z4 = fixtures::load("z4");
        let (classes, ok) = class_partition_from(&z4, &part(4, &[&[0], &[1], &[2, 3]])).unwrap();
        assert!(!ok);
        assert_eq!(classes.len(), 4);
    }

    #[test]
    fn supertheory_examples() {
        for t in fixtures::all() {
            let m = min_theory(&t);
            let big = max_theory(&t);
            m.verify(&t).unwrap();
            big.verify(&t).unwrap();
            assert_eq!(m.classes, ClassPartition::singletons(t.k()));
        }
        let s3 = fixtures::load("s3");
        assert_eq!(is_supertheory(&s3, &part(3, &[&[0, 1, 2]])), Err(Rejection::TrivialNotSingleton));
        assert_eq!(Rejection::TrivialNotSingleton.to_string(), "{1_G} not a singleton");
        assert_eq!(is_supertheory(&s3, &part(3, &[&[0], &[1]])), Err(Rejection::NotFull));
        let z4 = fixtures::load("z4");
        assert!(matches!(
            is_supertheory(&z4, &part(4, &[&[0], &[1], &[2, 3]])),
            Err(Rejection::BlockCountMismatch { chars: 3, classes: 4 })
        ));
        assert!(is_supertheory(&z4, &part(4, &[&[0], &[2], &[1, 3]])).is_ok());
    }

    #[test]
    fn verify_catches_tampering() {
        let s3 = fixtures::load("s3");
        let mut th = max_theory(&s3);
        th.classes = ClassPartition::full(3, vec![set(&[0, 1]), set(&[2])]).unwrap();
        assert_eq!(th.verify(&s3), Err(Rejection::IdentityNotSingleton));
        let mut th = min_theory(&s3);
        th.classes = ClassPartition::full(3, vec![set(&[0]), set(&[1]), set(&[2])]).unwrap();
        th.chars = part(3, &[&[0], &[1, 2]]);
        assert!(matches!(th.verify(&s3), Err(Rejection::BlockCountMismatch { .. })));
    }

    #[test]
    fn canonical_theories_small_cases() {
        let z2 = fixtures::load("z2");
        assert_eq!(min_theory(&z2), max_theory(&z2));
        let triv = fixtures::load("trivial");
        assert_eq!(min_theory(&triv), max_theory(&triv));
        let s3 = fixtures::load("s3");
        assert_eq!(min_theory(&s3).chars.len(), 3);
        assert_eq!(max_theory(&s3).chars.len(), 2);
    }

    #[test]
    fn orbit_partitions() {
        let z3 = fixtures::load("z3");
        assert_eq!(conjugation_partition(&z3).unwrap(), part(3, &[&[0], &[1, 2]]));
        assert_eq!(galois_partition(&z3).unwrap(), part(3, &[&[0], &[1, 2]]));
        let z5 = fixtures::load("z5");
        assert_eq!(conjugation_partition(&z5).unwrap(), part(5, &[&[0], &[1, 4], &[2, 3]]));
        assert_eq!(galois_partition(&z5).unwrap(), part(5, &[&[0], &[1, 2, 3, 4]]));
        for name in ["s3", "sp6_2", "s7"] {
            let t = fixtures::load(name);
            assert_eq!(conjugation_partition(&t).unwrap(), IrrPartition::singletons(t.k()));
        }
        let sp = fixtures::load("sp6_2");
        assert_eq!(galois_partition(&sp).unwrap(), IrrPartition::singletons(30));
        // both orbit partitions give supercharacter theories
        for t in fixtures::all() {
            let c = conjugation_partition(&t).unwrap();
            let g = galois_partition(&t).unwrap();
            assert!(is_supertheory(&t, &c).is_ok(), "{}", t.name());
            assert!(is_supertheory(&t, &g).is_ok(), "{}", t.name());
            assert!(refines(&c, &g).unwrap());
        }
    }

    #[test]
    fn rationality() {
        assert_eq!(table_rationality(&fixtures::load("sp6_2")), Rationality::Rational);
        assert_eq!(table_rationality(&fixtures::load("z3")), Rationality::Neither);
        assert_eq!(table_rationality(&fixtures::load("d4")), Rationality::Rational);
        assert_eq!(table_rationality(&fixtures::load("a5")), Rationality::Real);
    }
}
