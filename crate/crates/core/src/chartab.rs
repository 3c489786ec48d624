//! Character tables and class functions.
//!
//! Conventions: class 0 is the identity class, character 0 is the trivial
//! character, and all indices are 0-based in file order.
//!
//! Tables are read from the CTBL-1 JSON format:
//!
//! ```json
//! { "format": "CTBL-1", "name": "S3", "order": 6, "exponent": 6,
//!   "class_sizes": [1, 3, 2],
//!   "characters": [["1","1","1"], ["1","-1","1"], ["2","0","-1"]] }
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclotomic::{self, Cyclotomic};
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "CTBL-1";

/// Character subsets are `u64` bitmasks, so tables are capped at 64 classes.
pub const MAX_CLASSES: usize = 64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CtblFile {
    pub format: String,
    pub name: String,
    pub order: u64,
    pub exponent: u64,
    pub class_sizes: Vec<u64>,
    pub characters: Vec<Vec<String>>,
}

/// A validated character table. Immutable once built.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    name: String,
    order: u64,
    exponent: u64,
    class_sizes: Vec<u64>,
    values: Vec<Vec<Cyclotomic>>,
    conj: Vec<Vec<Cyclotomic>>,
    degrees: Vec<u64>,
    integers: Option<Vec<Vec<i64>>>,
}

/// Parse and validate a CTBL-1 document.
pub fn parse_ctbl(text: &str) -> Result<CharacterTable> {
    let file: CtblFile = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
    CharacterTable::from_file(file)
}

impl CharacterTable {
    pub fn from_file(file: CtblFile) -> Result<Self> {
        if file.format != FORMAT_TAG {
            return Err(Error::Syntax(format!(
                "unsupported format {:?}, expected {:?}",
                file.format, FORMAT_TAG
            )));
        }
        let k = file.class_sizes.len();
        check_square(k, &file.characters)?;
        let mut values = Vec::with_capacity(k);
        for (i, row) in file.characters.iter().enumerate() {
            let mut parsed = Vec::with_capacity(k);
            for (j, s) in row.iter().enumerate() {
                let v = cyclotomic::parse(s).map_err(|source| Error::Value { row: i, col: j, source })?;
                parsed.push(v);
            }
            values.push(parsed);
        }
        Self::new(file.name, file.order, file.exponent, file.class_sizes, values)
    }

    /// Build a table and run every validation check.
    pub fn new(
        name: impl Into<String>,
        order: u64,
        exponent: u64,
        class_sizes: Vec<u64>,
        values: Vec<Vec<Cyclotomic>>,
    ) -> Result<Self> {
        let k = class_sizes.len();
        check_square(k, &values)?;
        if k > MAX_CLASSES {
            return Err(Error::Invariant(format!(
                "table has {k} classes, at most {MAX_CLASSES} are supported"
            )));
        }
        if order == 0 || exponent == 0 {
            return Err(Error::Invariant("order and exponent must be positive".into()));
        }
        if class_sizes.contains(&0) {
            return Err(Error::Invariant("class sizes must be positive".into()));
        }
        if class_sizes[0] != 1 {
            return Err(Error::Invariant("class 0 must be the identity class (size 1)".into()));
        }
        let total: u128 = class_sizes.iter().map(|&s| s as u128).sum();
        if total != order as u128 {
            return Err(Error::Invariant(format!("class sizes sum to {total}, group order is {order}")));
        }
        if !order.is_multiple_of(exponent) {
            return Err(Error::Invariant(format!("exponent {exponent} does not divide the order {order}")));
        }
        if values[0].iter().any(|v| *v != Cyclotomic::one()) {
            return Err(Error::Invariant("row 0 must be the trivial character".into()));
        }
        let mut degrees = Vec::with_capacity(k);
        for (i, row) in values.iter().enumerate() {
            let d = row[0].to_integer().and_then(|d| d.to_u64()).filter(|&d| d > 0).ok_or_else(|| {
                Error::Invariant(format!("degree of character {i} is not a positive integer"))
            })?;
            degrees.push(d);
        }
        for (i, row) in values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !exponent.is_multiple_of(v.conductor() as u64) {
                    return Err(Error::Invariant(format!(
                        "value [{i}][{j}] has conductor {} not dividing exponent {exponent}",
                        v.conductor()
                    )));
                }
            }
        }
        let conj: Vec<Vec<Cyclotomic>> =
            values.iter().map(|row| row.iter().map(Cyclotomic::conj).collect()).collect();
        let integers = values
            .iter()
            .map(|row| {
                row.iter().map(|v| v.to_integer().and_then(|n| n.to_i64())).collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        let table = CharacterTable {
            name: name.into(),
            order,
            exponent,
            class_sizes,
            values,
            conj,
            degrees,
            integers,
        };
        table.check_orthogonality()?;
        Ok(table)
    }

    fn check_orthogonality(&self) -> Result<()> {
        let k = self.k();
        let order = Cyclotomic::from_integer(self.order);
        for i in 0..k {
            for l in i..k {
                let mut sum = Cyclotomic::zero();
                for j in 0..k {
                    let term = self.values[i][j].mul(&self.conj[l][j]);
                    sum = sum.add(&term.scale(&int(self.class_sizes[j])));
                }
                let expected = if i == l { order.clone() } else { Cyclotomic::zero() };
                if sum != expected {
                    return Err(Error::Invariant(format!(
                        "row orthogonality violated for characters {i} and {l}"
                    )));
                }
            }
        }
        for j in 0..k {
            for m in j..k {
                let mut sum = Cyclotomic::zero();
                for i in 0..k {
                    sum = sum.add(&self.values[i][j].mul(&self.conj[i][m]));
                }
                let expected = if j == m {
                    Cyclotomic::from_rational(BigRational::new(self.order.into(), self.class_sizes[j].into()))
                } else {
                    Cyclotomic::zero()
                };
                if sum != expected {
                    return Err(Error::Invariant(format!(
                        "column orthogonality violated for classes {j} and {m}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Number of conjugacy classes, which equals the number of characters.
    pub fn k(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn class_sizes(&self) -> &[u64] {
        &self.class_sizes
    }

    pub fn value(&self, character: usize, class: usize) -> &Cyclotomic {
        &self.values[character][class]
    }

    pub fn row(&self, character: usize) -> &[Cyclotomic] {
        &self.values[character]
    }

    pub fn rows(&self) -> &[Vec<Cyclotomic>] {
        &self.values
    }

    pub fn conj_row(&self, character: usize) -> &[Cyclotomic] {
        &self.conj[character]
    }

    /// `χ_i(1)`.
    pub fn degree(&self, character: usize) -> u64 {
        self.degrees[character]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// The table as machine integers, when every value is a rational integer
    /// that fits in an `i64`.
    pub fn integer_values(&self) -> Option<&[Vec<i64>]> {
        self.integers.as_deref()
    }

    pub fn is_integral(&self) -> bool {
        self.integers.is_some()
    }

    pub fn character(&self, i: usize) -> ClassFunction {
        ClassFunction(self.values[i].clone())
    }

    /// The regular character `ρ_G`: `|G|` at the identity, zero elsewhere.
    pub fn regular_character(&self) -> ClassFunction {
        let mut v = vec![Cyclotomic::zero(); self.k()];
        v[0] = Cyclotomic::from_integer(self.order);
        ClassFunction(v)
    }

    pub fn to_file(&self) -> CtblFile {
        CtblFile {
            format: FORMAT_TAG.to_string(),
            name: self.name.clone(),
            order: self.order,
            exponent: self.exponent,
            class_sizes: self.class_sizes.clone(),
            characters: self.values.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect(),
        }
    }

    /// SHA-256 over the canonical serialization, hex encoded. Identifies the
    /// table in checkpoint files.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.to_file()).expect("table serializes");
        let hash = Sha256::digest(text.as_bytes());
        let mut out = String::with_capacity(64);
        for b in hash {
            write!(out, "{b:02x}").unwrap();
        }
        out
    }

    fn check_len(&self, f: &ClassFunction) -> Result<()> {
        if f.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), got: f.len() });
        }
        Ok(())
    }
}

fn check_square<T>(k: usize, rows: &[Vec<T>]) -> Result<()> {
    if k == 0 || rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(Error::Invariant(format!(
            "matrix not square of size k (k = {k} class sizes, {} rows of lengths {:?})",
            rows.len(),
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(())
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A complex-valued class function, one value per conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassFunction(pub Vec<Cyclotomic>);

impl ClassFunction {
    pub fn new(values: Vec<Cyclotomic>) -> Self {
        ClassFunction(values)
    }

    pub fn constant(k: usize, value: Cyclotomic) -> Self {
        ClassFunction(vec![value; k])
    }

    pub fn zeros(k: usize) -> Self {
        Self::constant(k, Cyclotomic::zero())
    }

    pub fn ones(k: usize) -> Self {
        Self::constant(k, Cyclotomic::one())
    }

    /// Indicator function of class `j`.
    pub fn indicator(k: usize, j: usize) -> Self {
        let mut v = vec![Cyclotomic::zero(); k];
        v[j] = Cyclotomic::one();
        ClassFunction(v)
    }

    pub fn from_integers(values: &[i64]) -> Self {
        ClassFunction(values.iter().map(|&v| Cyclotomic::from(v)).collect())
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Cyclotomic::is_zero)
    }
}

/// `(1/|G|) Σ_j |K_j| f(g_j) conj(g(g_j))`.
pub fn inner_product(t: &CharacterTable, f: &ClassFunction, g: &ClassFunction) -> Result<Cyclotomic> {
    t.check_len(f)?;
    t.check_len(g)?;
    let conj: Vec<Cyclotomic> = g.0.iter().map(Cyclotomic::conj).collect();
    Ok(weighted_sum(t, &f.0, &conj).scale(&BigRational::new(One::one(), t.order.into())))
}

/// `Σ_j |K_j| a_j b_j`.
fn weighted_sum(t: &CharacterTable, a: &[Cyclotomic], b: &[Cyclotomic]) -> Cyclotomic {
    let mut sum = Cyclotomic::zero();
    for j in 0..a.len() {
        if a[j].is_zero() || b[j].is_zero() {
            continue;
        }
        sum = sum.add(&a[j].mul(&b[j]).scale(&int(t.class_sizes[j])));
    }
    sum
}

/// Unnormalized dual coefficient `Σ_j |K_j| f(g_j) conj(χ_i(g_j))`, which
/// equals `|G| · χ_i(1) · c_i`.
pub fn dual_numerator(t: &CharacterTable, f: &ClassFunction, i: usize) -> Cyclotomic {
    weighted_sum(t, &f.0, &t.conj[i])
}

/// Coordinates `c_i` of `f` in the basis `{χ_i(1)·χ_i}`:
/// `c_i = ⟨f, χ_i⟩ / χ_i(1)`.
pub fn dual_coefficients(t: &CharacterTable, f: &ClassFunction) -> Result<Vec<Cyclotomic>> {
    t.check_len(f)?;
    Ok((0..t.k())
        .map(|i| {
            let scale = BigRational::new(One::one(), BigInt::from(t.order) * BigInt::from(t.degrees[i]));
            dual_numerator(t, f, i).scale(&scale)
        })
        .collect())
}

/// Inverse of [`dual_coefficients`]: `Σ_i c_i χ_i(1) χ_i`.
pub fn reconstruct(t: &CharacterTable, coeffs: &[Cyclotomic]) -> Result<ClassFunction> {
    if coeffs.len() != t.k() {
        return Err(Error::LengthMismatch { expected: t.k(), got: coeffs.len() });
    }
    let mut out = vec![Cyclotomic::zero(); t.k()];
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let w = c.scale(&int(t.degrees[i]));
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = slot.add(&w.mul(&t.values[i][j]));
        }
    }
    Ok(ClassFunction(out))
}

/// Entrywise product of two class functions.
pub fn pointwise(t: &CharacterTable, f: &ClassFunction, g: &ClassFunction) -> Result<ClassFunction> {
    t.check_len(f)?;
    t.check_len(g)?;
    Ok(ClassFunction(f.0.iter().zip(&g.0).map(|(a, b)| a.mul(b)).collect()))
}
