//! Exact elements of cyclotomic fields.
//!
//! An element of `Q(ζ_n)` is stored in the power basis `1, ζ_n, …, ζ_n^{φ(n)-1}`
//! after reduction modulo the cyclotomic polynomial `Φ_n`, at the smallest
//! conductor `n` whose field contains it. Two elements are equal exactly when
//! their `(conductor, coeffs)` pairs are identical.
//!
//! Character values are written with GAP's `E(n)` notation, e.g.
//! `-E(5)-E(5)^4` or `2*E(3)^2`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CycError, ParseError};

/// Largest conductor any single element may live at.
pub const MAX_CONDUCTOR: u64 = 1 << 20;

/// An exact element of a cyclotomic field in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    conductor: u32,
    /// `(exponent, coefficient)` pairs, exponents strictly increasing and
    /// below `φ(conductor)`, coefficients nonzero.
    coeffs: Vec<(u32, BigRational)>,
}

/// Result of [`Cyclotomic::classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Rational(BigRational),
    Real,
    Complex,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic { conductor: 1, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Cyclotomic { conductor: 1, coeffs: vec![(0, q)] }
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// `E(n)^e`, the `e`-th power of the primitive root `exp(2πi/n)`.
    pub fn root_of_unity(n: u32, e: i64) -> Result<Self, CycError> {
        if n == 0 {
            return Err(CycError::ZeroConductor);
        }
        let e = e.rem_euclid(n as i64) as usize;
        let mut dense = vec![BigRational::zero(); n as usize];
        dense[e] = BigRational::one();
        Ok(Self::from_dense(n as u64, dense))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Power-basis coefficients at the current conductor.
    pub fn coeffs(&self) -> &[(u32, BigRational)] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    /// The rational value, if this element is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.conductor != 1 {
            return None;
        }
        Some(self.coeffs.first().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero))
    }

    /// The value as an integer, if this element is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { conductor: self.conductor, coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(q) = other.to_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.to_rational() {
            return other.scale(&q);
        }
        let l = lcm(self.conductor as u64, other.conductor as u64);
        let (sa, sb) = (l / self.conductor as u64, l / other.conductor as u64);
        let mut dense = vec![BigRational::zero(); l as usize];
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ((*ea as u64 * sa + *eb as u64 * sb) % l) as usize;
                dense[e] += ca * cb;
            }
        }
        Self::from_dense(l, dense)
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * q)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Image under the Galois automorphism `ζ_n ↦ ζ_n^k`.
    pub fn galois(&self, k: i64) -> Result<Self, CycError> {
        let n = self.conductor as i64;
        if n == 1 {
            return Ok(self.clone());
        }
        if k.gcd(&n) != 1 {
            return Err(CycError::NotCoprime { k, conductor: self.conductor });
        }
        let k = k.rem_euclid(n) as u64;
        let mut dense = vec![BigRational::zero(); n as usize];
        for (e, c) in &self.coeffs {
            dense[((*e as u64 * k) % n as u64) as usize] += c;
        }
        Ok(Self::from_dense(n as u64, dense))
    }

    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is coprime to every conductor")
    }

    pub fn classify(&self) -> Classification {
        if let Some(q) = self.to_rational() {
            Classification::Rational(q)
        } else if self.conj() == *self {
            Classification::Real
        } else {
            Classification::Complex
        }
    }

    /// Multiplicative inverse via the field norm: `a⁻¹ = (∏_{k≠1} σ_k(a)) / N(a)`.
    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        let n = self.conductor as i64;
        let mut others = Self::one();
        for k in 2..n {
            if k.gcd(&n) == 1 {
                others = others.mul(&self.galois(k)?);
            }
        }
        let norm = self.mul(&others).to_rational().expect("norm of a cyclotomic is rational");
        Ok(others.scale(&norm.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self.mul(&other.inv()?))
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        if self.conductor == other.conductor && self.conductor == 1 {
            let a = self.to_rational().unwrap();
            let b = other.to_rational().unwrap();
            return Self::from_rational(if subtract { a - b } else { a + b });
        }
        let l = lcm(self.conductor as u64, other.conductor as u64);
        let mut dense = vec![BigRational::zero(); l as usize];
        let (sa, sb) = (l / self.conductor as u64, l / other.conductor as u64);
        for (e, c) in &self.coeffs {
            dense[(*e as u64 * sa) as usize] += c;
        }
        for (e, c) in &other.coeffs {
            let slot = &mut dense[(*e as u64 * sb) as usize];
            if subtract {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Self::from_dense(l, dense)
    }

    /// Canonical element from coefficients of `ζ_n^0 … ζ_n^{n-1}`.
    fn from_dense(n: u64, mut dense: Vec<BigRational>) -> Self {
        debug_assert_eq!(dense.len() as u64, n);
        reduce_mod_cyclotomic(n, &mut dense);
        let mut value = Cyclotomic { conductor: n as u32, coeffs: sparse(&dense) };
        value.minimize();
        value
    }

    /// Drop to the smallest conductor whose field contains the element.
    fn minimize(&mut self) {
        if self.coeffs.is_empty() {
            self.conductor = 1;
            return;
        }
        'outer: while self.conductor > 1 {
            for p in prime_factors(self.conductor as u64) {
                if let Some(smaller) = self.descend(p) {
                    *self = smaller;
                    continue 'outer;
                }
            }
            break;
        }
    }

    /// Try to rewrite the element at conductor `n/p`. Projects with the
    /// relative trace and checks that the projection embeds back unchanged.
    fn descend(&self, p: u64) -> Option<Self> {
        let n = self.conductor as u64;
        let d = n / p;
        let mut dense = vec![BigRational::zero(); d as usize];
        if d.is_multiple_of(p) {
            for (e, c) in &self.coeffs {
                if (*e as u64).is_multiple_of(p) {
                    dense[((*e as u64 / p) % d) as usize] += c;
                }
            }
        } else {
            let u = if d == 1 { 0 } else { mod_inverse(p % d, d) };
            let off = BigRational::new(BigInt::from(-1), BigInt::from(p - 1));
            for (e, c) in &self.coeffs {
                let slot = ((*e as u64 * u) % d) as usize;
                if (*e as u64).is_multiple_of(p) {
                    dense[slot] += c;
                } else {
                    dense[slot] += c * &off;
                }
            }
        }
        reduce_mod_cyclotomic(d, &mut dense);
        let candidate = Cyclotomic { conductor: d as u32, coeffs: sparse(&dense) };

        let mut back = vec![BigRational::zero(); n as usize];
        for (f, c) in &candidate.coeffs {
            back[((*f as u64 * p) % n) as usize] += c;
        }
        reduce_mod_cyclotomic(n, &mut back);
        if sparse(&back) == self.coeffs {
            Some(candidate)
        } else {
            None
        }
    }
}

fn sparse(dense: &[BigRational]) -> Vec<(u32, BigRational)> {
    dense.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e as u32, c.clone())).collect()
}

/// In-place remainder of `Σ dense[e] x^e` modulo `Φ_n(x)`.
fn reduce_mod_cyclotomic(n: u64, dense: &mut [BigRational]) {
    if n == 1 {
        return;
    }
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    for top in (deg..dense.len()).rev() {
        if dense[top].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut dense[top], BigRational::zero());
        let base = top - deg;
        for (j, pj) in phi[..deg].iter().enumerate() {
            if *pj != 0 {
                dense[base + j] -= &c * BigInt::from(*pj);
            }
        }
    }
}

/// Integer coefficients of `Φ_n`, lowest degree first. Cached per `n`.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let divisor = cyclotomic_polynomial(d);
            poly = exact_div_monic(&poly, &divisor);
        }
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let ext = (a as i64).extended_gcd(&(m as i64));
    debug_assert_eq!(ext.gcd, 1);
    ext.x.rem_euclid(m as i64) as u64
}

impl Default for Cyclotomic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let n = self.conductor;
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            if negative {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            let mag = c.abs();
            if *e == 0 || n == 1 {
                write!(f, "{}", mag)?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            if *e == 1 {
                write!(f, "E({})", n)?;
            } else {
                write!(f, "E({})^{}", n, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic({})", self)
    }
}

impl FromStr for Cyclotomic {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Parse a character value written in `E(n)` notation.
///
/// Grammar (whitespace ignored):
///
/// ```text
/// value := ["-"] term (("+"|"-") term)*
/// term  := int ["/" int] ["*" root] | root
/// root  := "E(" int ")" ["^" int]
/// ```
///
/// The `int "/" int` coefficient form is an extension so that every
/// canonical element (including ones with rational coefficients) prints to
/// a string this function accepts.
pub fn parse(text: &str) -> Result<Cyclotomic, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let terms = p.value()?;
    let mut l = 1u64;
    for t in &terms {
        l = lcm(l, t.conductor);
        if l > MAX_CONDUCTOR {
            return Err(ParseError::new(0, "conductor too large"));
        }
    }
    let mut dense = vec![BigRational::zero(); l as usize];
    for t in terms {
        let e = (t.exponent % t.conductor) * (l / t.conductor);
        dense[e as usize] += t.coeff;
    }
    Ok(Cyclotomic::from_dense(l, dense))
}

struct Term {
    coeff: BigRational,
    conductor: u64,
    exponent: u64,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", b as char)))
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, msg)
    }

    fn value(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negative = true;
        }
        loop {
            let mut t = self.term()?;
            if negative {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            match self.peek() {
                None => return Ok(terms),
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(_) => return Err(self.error("expected '+', '-' or end of input")),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'E') => self.root(BigRational::one()),
            Some(b) if b.is_ascii_digit() => {
                let num = self.int()?;
                let mut coeff = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.int()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    coeff /= BigRational::from_integer(den);
                }
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.root(coeff)
                } else {
                    Ok(Term { coeff, conductor: 1, exponent: 0 })
                }
            }
            _ => Err(self.error("expected integer or E(n)")),
        }
    }

    fn root(&mut self, coeff: BigRational) -> Result<Term, ParseError> {
        self.expect(b'E')?;
        self.expect(b'(')?;
        let at = self.pos;
        let n = self.small_int()?;
        if n < 1 {
            return Err(ParseError::new(at, "E(n) requires n >= 1"));
        }
        if n > MAX_CONDUCTOR {
            return Err(ParseError::new(at, "conductor too large"));
        }
        self.expect(b')')?;
        let mut exponent = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            exponent = self.small_int()?;
        }
        Ok(Term { coeff, conductor: n, exponent: exponent % n })
    }

    fn digits(&mut self) -> Result<&str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        let s = self.digits()?;
        Ok(s.parse().unwrap())
    }

    fn small_int(&mut self) -> Result<u64, ParseError> {
        let at = self.pos;
        let big = self.int()?;
        big.to_u64().ok_or_else(|| ParseError::new(at, "integer too large"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Cyclotomic {
        s.parse().unwrap()
    }

    fn int(n: i64) -> Cyclotomic {
        Cyclotomic::from(n)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(c("2"), int(2));
        assert_eq!(c("2").conductor(), 1);
        assert_eq!(c("E(4)^2"), int(-1));
        assert_eq!(c("E(3)+E(3)^2"), int(-1));
        assert_eq!(c("E(1)"), int(1));
        assert_eq!(c(" - E(5) - E(5)^4 ").conductor(), 5);
    }

    #[test]
    fn parse_errors_report_position() {
        let err = parse("E(0)").unwrap_err();
        assert_eq!(err.position, 2);
        let err = parse("1+*E(3)").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(parse("").is_err());
        assert!(parse("E(3").is_err());
        assert!(parse("2E(3)").is_err());
        assert!(parse("--1").is_err());
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(c("E(4)").mul(&c("E(4)")), int(-1));
        assert_eq!(c("E(5)").add(&Cyclotomic::zero()), c("E(5)"));
        let s = c("E(8)-E(8)^3");
        assert_eq!(s.mul(&s), int(2));
    }

    #[test]
    fn conductor_is_minimal() {
        // ζ₆ = -ζ₃²
        assert_eq!(c("E(6)"), c("-E(3)^2"));
        assert_eq!(c("E(6)").conductor(), 3);
        // √5 = 1 + 2(ζ₅ + ζ₅⁴)
        let r5 = c("1+2*E(5)+2*E(5)^4");
        assert_eq!(r5.mul(&r5), int(5));
        // i·i at conductor 12 collapses to a rational
        assert_eq!(c("E(12)^3").mul(&c("E(12)^3")), int(-1));
        assert_eq!(c("E(12)^4"), c("E(3)"));
        assert_eq!(c("E(12)^3").conductor(), 4);
        // √2 lives at conductor 8, √-2 too, their product is rational
        let a = c("E(8)+E(8)^7");
        let b = c("E(8)+E(8)^3");
        assert_eq!(a.mul(&b).conductor(), 4);
        assert_eq!(c("E(9)^3"), c("E(3)"));
        assert_eq!(c("E(15)^5").add(&c("E(15)^10")), int(-1));
    }

    #[test]
    fn galois_examples() {
        assert_eq!(c("E(5)").galois(2).unwrap(), c("E(5)^2"));
        assert_eq!(c("E(5)").galois(-1).unwrap(), c("E(5)^4"));
        assert_eq!(int(7).galois(3).unwrap(), int(7));
        assert!(c("E(6)").galois(3).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(int(-1).classify(), Classification::Rational(BigRational::from_integer((-1).into())));
        assert_eq!(c("E(8)-E(8)^3").classify(), Classification::Real);
        assert_eq!(c("E(3)").classify(), Classification::Complex);
    }

    #[test]
    fn inverse() {
        let a = c("2+E(5)-3*E(5)^3");
        assert_eq!(a.mul(&a.inv().unwrap()), int(1));
        assert!(Cyclotomic::zero().inv().is_err());
        let q = c("3").inv().unwrap();
        assert_eq!(q.to_string(), "1/3");
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "-7", "E(3)", "-E(5)-E(5)^4", "2*E(7)^3-E(7)", "1/2*E(4)+3/5"] {
            let v = c(s);
            assert_eq!(c(&v.to_string()), v, "{s}");
        }
        assert_eq!(c("E(4)").to_string(), "E(4)");
        assert_eq!(c("E(3)^2").to_string(), "-1-E(3)");
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // first polynomial with a coefficient outside {-1,0,1}
        assert!(cyclotomic_polynomial(105).contains(&-2));
    }
}
