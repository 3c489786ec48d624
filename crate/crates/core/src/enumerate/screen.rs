//! Fast rejection of bad sets on integral tables. Subsets are visited in
//! Gray-code order so `σ_Y` changes by one character per step, and the
//! power-2 comparison is done in wrapping 16-bit arithmetic: a mismatch
//! modulo 2^16 is a genuine mismatch, so only survivors need the full test.
//! Short fixed-width rows let the compiler vectorize the inner loops.

use crate::chartab::CharacterTable;
use crate::partition::IndexSet;

const STRIDE: usize = 64;

pub(crate) struct Screen {
    k: usize,
    /// `χ_a(1)·χ_a(g_j)` with row stride `STRIDE`.
    weighted: Vec<u16>,
    /// For `m < i`: `|K_j|·(χ_m(1)·χ_i(g_j) − χ_i(1)·χ_m(g_j))`, so that `χ_m`
    /// and `χ_i` balance in `σ²` iff `Σ_j σ(g_j)²·pair[m][i][j] = 0`.
    pair: Vec<u16>,
}

impl Screen {
    pub(crate) fn new(t: &CharacterTable) -> Option<Self> {
        let ints = t.integer_values()?;
        let k = t.k();
        let wrap = |v: i128| v as u16;
        let mut weighted = vec![0u16; k * STRIDE];
        for a in 0..k {
            for j in 0..k {
                weighted[a * STRIDE + j] = wrap(t.degree(a) as i128 * ints[a][j] as i128);
            }
        }
        let mut pair = vec![0u16; k * k * STRIDE];
        for m in 0..k {
            for i in m + 1..k {
                for j in 0..k {
                    let v =
                        t.degree(m) as i128 * ints[i][j] as i128 - t.degree(i) as i128 * ints[m][j] as i128;
                    pair[(m * k + i) * STRIDE + j] = wrap(t.class_sizes()[j] as i128 * v);
                }
            }
        }
        Some(Screen { k, weighted, pair })
    }

    /// Call `f` on every `base ∪ S`, `S ⊆ free`, that passes the screen.
    pub(crate) fn scan(&self, base: IndexSet, free: &[usize], f: impl FnMut(IndexSet)) {
        match self.k {
            0..=16 => self.scan_n::<16>(base, free, f),
            17..=32 => self.scan_n::<32>(base, free, f),
            _ => self.scan_n::<64>(base, free, f),
        }
    }

    #[inline(always)]
    fn row<const N: usize>(table: &[u16], index: usize) -> &[u16; N] {
        table[index * STRIDE..index * STRIDE + N].try_into().unwrap()
    }

    #[inline(always)]
    fn pair_sum<const N: usize>(&self, sigma: &[u16; N], m: usize, i: usize) -> u16 {
        let row = Self::row::<N>(&self.pair, m * self.k + i);
        let mut acc = 0u16;
        for j in 0..N {
            acc = acc.wrapping_add(sigma[j].wrapping_mul(sigma[j]).wrapping_mul(row[j]));
        }
        acc
    }

    #[inline(always)]
    fn balanced<const N: usize>(&self, y: IndexSet, sigma: &[u16; N]) -> bool {
        let bits = y.bits();
        let rest = bits & bits.wrapping_sub(1);
        if rest == 0 {
            return true;
        }
        let m = bits.trailing_zeros() as usize;
        // most sets already fail on the first pair
        if self.pair_sum(sigma, m, rest.trailing_zeros() as usize) != 0 {
            return false;
        }
        IndexSet::from_bits(rest).iter().skip(1).all(|i| self.pair_sum(sigma, m, i) == 0)
    }

    #[inline(always)]
    fn scan_n<const N: usize>(&self, base: IndexSet, free: &[usize], mut f: impl FnMut(IndexSet)) {
        let mut sigma = [0u16; N];
        for a in base {
            let row = Self::row::<N>(&self.weighted, a);
            for j in 0..N {
                sigma[j] = sigma[j].wrapping_add(row[j]);
            }
        }
        let mut y = base;
        if self.balanced(y, &sigma) {
            f(y);
        }
        for step in 1u64..1 << free.len() {
            let a = free[step.trailing_zeros() as usize];
            let row = Self::row::<N>(&self.weighted, a);
            if y.contains(a) {
                y = y.remove(a);
                for j in 0..N {
                    sigma[j] = sigma[j].wrapping_sub(row[j]);
                }
            } else {
                y = y.insert(a);
                for j in 0..N {
                    sigma[j] = sigma[j].wrapping_add(row[j]);
                }
            }
            if self.balanced(y, &sigma) {
                f(y);
            }
        }
    }
}
