use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use sct_core::chartab::{dual_coefficients, reconstruct};
use sct_core::enumerate::{first_with_popcount, next_same_popcount};
use sct_core::modular::{default_primes, is_prime, ModularTable, ModularVerdict};
use sct_core::{fixtures, is_good, ClassFunction, Cyclotomic, IndexSet};

/// Every generated element has conductor dividing this.
const N: u64 = 60;

/// A prime `p ≡ 1 (mod N)` and an element of order exactly `N` in `F_p`.
/// Sending `E(N)` to it is a ring map `Q(E(N)) → F_p` (away from
/// denominators divisible by `p`), so identities can be checked in `F_p`.
fn field() -> (u64, u64) {
    let p = (1u64 << 40..).find(|&p| p % N == 1 && is_prime(p)).unwrap();
    let primes = [2u64, 3, 5];
    let w = (2..p)
        .map(|g| pow(g, (p - 1) / N, p))
        .find(|&w| primes.iter().all(|&q| pow(w, N / q, p) != 1))
        .unwrap();
    (p, w)
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce(q: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = ((q.numer() % &pb + &pb) % &pb).to_u64().unwrap();
    let den = ((q.denom() % &pb + &pb) % &pb).to_u64().unwrap();
    mul(num, pow(den, p - 2, p), p)
}

fn image(x: &Cyclotomic, p: u64, w: u64) -> u64 {
    let step = N / x.conductor() as u64;
    x.coeffs().iter().fold(0, |acc, (e, c)| (acc + mul(reduce(c, p), pow(w, step * *e as u64, p), p)) % p)
}

fn cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    let divisors = [1u32, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60];
    prop::collection::vec((prop::sample::select(divisors.to_vec()), 0i64..60, -5i64..=5, 1i64..=3), 0..5)
        .prop_map(|terms| {
            terms.into_iter().fold(Cyclotomic::zero(), |acc, (n, e, a, b)| {
                let c = BigRational::new(a.into(), b.into());
                acc.add(&Cyclotomic::root_of_unity(n, e).unwrap().scale(&c))
            })
        })
}

fn units() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![1i64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 49, 53, 59])
}

proptest! {
    #[test]
    fn arithmetic_is_a_homomorphism(a in cyclotomic(), b in cyclotomic()) {
        let (p, w) = field();
        let (ha, hb) = (image(&a, p, w), image(&b, p, w));
        prop_assert_eq!(image(&a.add(&b), p, w), (ha + hb) % p);
        prop_assert_eq!(image(&a.sub(&b), p, w), (ha + p - hb) % p);
        prop_assert_eq!(image(&a.mul(&b), p, w), mul(ha, hb, p));
        prop_assert_eq!(image(&a.pow(3), p, w), pow(ha, 3, p));
    }

    #[test]
    fn field_axioms(a in cyclotomic(), b in cyclotomic(), c in cyclotomic()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert_eq!(a.mul(&inv), Cyclotomic::one());
            prop_assert_eq!(b.div(&a).unwrap().mul(&a), b);
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn galois_composes(a in cyclotomic(), b in cyclotomic(), k in units(), l in units()) {
        let (p, w) = field();
        let ka = a.galois(k).unwrap();
        prop_assert_eq!(ka.galois(l).unwrap(), a.galois(k * l % N as i64).unwrap());
        prop_assert_eq!(a.mul(&b).galois(k).unwrap(), ka.mul(&b.galois(k).unwrap()));
        prop_assert_eq!(image(&ka, p, w), image(&a, p, pow(w, k as u64, p)));
        prop_assert_eq!(a.conj().conj(), a.clone());
    }

    #[test]
    fn display_round_trips(a in cyclotomic()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Cyclotomic>().unwrap(), a);
    }

    #[test]
    fn gosper_matches_brute_force(lo in 0u64..4096, s in 0u32..=12) {
        let brute = (lo..1 << 13).find(|x| x.count_ones() == s);
        let first = first_with_popcount(lo, s);
        if let Some(b) = brute {
            prop_assert_eq!(first, Some(b));
            if s > 0 {
                let next = (b + 1..1 << 14).find(|x| x.count_ones() == s);
                prop_assert_eq!(next_same_popcount(b), next);
            }
        }
    }
}

#[test]
fn dual_coefficients_round_trip() {
    let mut rng = SplitMix64::seed_from_u64(7);
    for name in ["s4", "a5", "z6", "q8"] {
        let t = fixtures::load(name);
        for _ in 0..100 {
            let values: Vec<i64> = (0..t.k()).map(|_| (rng.next_u64() % 41) as i64 - 20).collect();
            let f = ClassFunction::from_integers(&values);
            let c = dual_coefficients(&t, &f).unwrap();
            assert_eq!(reconstruct(&t, &c).unwrap(), f, "{name}");
        }
        for i in 0..t.k() {
            let c = dual_coefficients(&t, &t.character(i)).unwrap();
            for (j, cj) in c.iter().enumerate() {
                let expected = if i == j {
                    BigRational::new(BigInt::one(), BigInt::from(t.degree(i)))
                } else {
                    BigRational::zero()
                };
                assert_eq!(cj.to_rational().unwrap(), expected);
            }
        }
    }
}

#[test]
fn singletons_and_the_nonprincipal_set_are_good() {
    for t in fixtures::all() {
        for i in 0..t.k() {
            assert!(is_good(&t, IndexSet::singleton(i)).unwrap().is_good());
        }
        let nonprincipal = IndexSet::full(t.k()).remove(0);
        if !nonprincipal.is_empty() {
            assert!(is_good(&t, nonprincipal).unwrap().is_good(), "{}", t.name());
        }
    }
}

#[test]
fn modular_agrees_with_exact_on_random_sp6_2_subsets() {
    let t = fixtures::load("sp6_2");
    let table = ModularTable::with_primes(&t, &default_primes(&t)).unwrap();
    let mut rng = SplitMix64::seed_from_u64(2024);
    for _ in 0..10_000 {
        let x = IndexSet::from_bits(rng.next_u64() & ((1 << 30) - 1));
        if x.is_empty() {
            continue;
        }
        let exact = is_good(&t, x).unwrap();
        match table.is_good(x) {
            ModularVerdict::Bad(w) => assert_eq!(exact.witness(), Some(w), "{x}"),
            ModularVerdict::ProbablyGood => assert!(exact.is_good(), "{x}"),
        }
    }
}
