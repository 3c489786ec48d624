//! The good/bad test carried out modulo a few large primes. A mismatch
//! modulo any prime proves the set bad; agreement everywhere only says
//! "probably good" and has to be confirmed exactly.

use serde::Serialize;

use crate::chartab::CharacterTable;
use crate::error::{Error, Result};
use crate::partition::IrrSubset;
use crate::theory::{check_subset, Witness};

/// Primes are searched downward from here.
const PRIME_CEILING: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ModularVerdict {
    Bad(Witness),
    ProbablyGood,
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (if s >= p as u128 { s - p as u128 } else { s }) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

fn usable(t: &CharacterTable, p: u64) -> bool {
    !t.order().is_multiple_of(p) && t.degrees().iter().all(|&d| d % p != 0)
}

/// The two largest primes below 2^62 dividing neither |G| nor any degree.
pub fn default_primes(t: &CharacterTable) -> Vec<u64> {
    let mut primes = Vec::with_capacity(2);
    let mut n = PRIME_CEILING - 1;
    while primes.len() < 2 {
        if is_prime(n) && usable(t, n) {
            primes.push(n);
        }
        n -= 2;
    }
    primes
}

/// Table data reduced modulo each prime, ready for repeated subset tests.
#[derive(Debug, Clone)]
pub struct ModularTable {
    primes: Vec<u64>,
    k: usize,
    /// Per prime: `|K_j|` mod p.
    sizes: Vec<Vec<u64>>,
    /// Per prime: `χ_i(g_j)` mod p, row-major.
    values: Vec<Vec<u64>>,
    /// Per prime: `χ_i(1)·χ_i(g_j)` mod p, row-major.
    weighted: Vec<Vec<u64>>,
    /// Per prime: `χ_i(1)` mod p.
    degrees: Vec<Vec<u64>>,
}

impl ModularTable {
    pub fn new(t: &CharacterTable) -> Result<Self> {
        Self::with_primes(t, &default_primes(t))
    }

    pub fn with_primes(t: &CharacterTable, primes: &[u64]) -> Result<Self> {
        let ints = t.integer_values().ok_or(Error::NotRational)?;
        if primes.is_empty() {
            return Err(Error::InvalidArgument("at least one prime is required".into()));
        }
        for &p in primes {
            if p >= PRIME_CEILING || !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not a prime below 2^62")));
            }
            if !usable(t, p) {
                return Err(Error::InvalidArgument(format!(
                    "{p} divides the group order or a character degree"
                )));
            }
        }
        let k = t.k();
        let mut out = ModularTable {
            primes: primes.to_vec(),
            k,
            sizes: Vec::new(),
            values: Vec::new(),
            weighted: Vec::new(),
            degrees: Vec::new(),
        };
        for &p in primes {
            out.sizes.push(t.class_sizes().iter().map(|&s| s % p).collect());
            out.degrees.push(t.degrees().iter().map(|&d| d % p).collect());
            let vals: Vec<u64> = ints.iter().flatten().map(|&v| reduce(v, p)).collect();
            let w = ints
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    let d = t.degree(i) as i128;
                    row.iter().map(move |&v| ((d * v as i128).rem_euclid(p as i128)) as u64)
                })
                .collect();
            out.values.push(vals);
            out.weighted.push(w);
        }
        Ok(out)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Same powers and comparison order as the exact test, so a bad verdict
    /// carries the exact witness unless a prime hides an earlier mismatch.
    pub fn is_good(&self, x: IrrSubset) -> ModularVerdict {
        if x.len() < 2 {
            return ModularVerdict::ProbablyGood;
        }
        let k = self.k;
        let m = x.min().unwrap();
        let np = self.primes.len();
        // σ(g_j) and running power per prime, with |K_j| folded in.
        let mut sigma = vec![vec![0u64; k]; np];
        let mut acc = vec![vec![0u64; k]; np];
        for (pi, &p) in self.primes.iter().enumerate() {
            for i in x {
                let row = &self.weighted[pi][i * k..(i + 1) * k];
                for j in 0..k {
                    sigma[pi][j] = add_mod(sigma[pi][j], row[j], p);
                }
            }
            for j in 0..k {
                acc[pi][j] = mul_mod(self.sizes[pi][j], sigma[pi][j], p);
            }
        }
        let mut sm = vec![0u64; np];
        for power in 2..=k as u32 {
            for (pi, &p) in self.primes.iter().enumerate() {
                for j in 0..k {
                    acc[pi][j] = mul_mod(acc[pi][j], sigma[pi][j], p);
                }
                sm[pi] = self.numerator(pi, &acc[pi], m);
            }
            for i in x.iter().skip(1) {
                for (pi, &p) in self.primes.iter().enumerate() {
                    let si = self.numerator(pi, &acc[pi], i);
                    let lhs = mul_mod(self.degrees[pi][m], si, p);
                    let rhs = mul_mod(self.degrees[pi][i], sm[pi], p);
                    if lhs != rhs {
                        return ModularVerdict::Bad(Witness { chi: m, psi: i, power });
                    }
                }
            }
        }
        ModularVerdict::ProbablyGood
    }

    fn numerator(&self, pi: usize, acc: &[u64], i: usize) -> u64 {
        let p = self.primes[pi];
        let row = &self.values[pi][i * self.k..(i + 1) * self.k];
        row.iter().zip(acc).fold(0, |s, (&v, &a)| add_mod(s, mul_mod(v, a, p), p))
    }
}

/// One-shot modular test of `X` against the given primes.
pub fn is_good_modular(t: &CharacterTable, x: IrrSubset, primes: &[u64]) -> Result<ModularVerdict> {
    check_subset(t, x)?;
    Ok(ModularTable::with_primes(t, primes)?.is_good(x))
}
