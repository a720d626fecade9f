//! Linear complexity (Berlekamp-Massey), the correlation measure of order `k`
//! and the expansion complexity.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::seqcore::{Profile, Word};

/// Default length limit for [`correlation_k`] with `k >= 3`.
pub const CORRELATION_BOUND: usize = 2048;
pub const MAX_CORRELATION_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("word of length {len} is too short for order {k}")]
    TooShort { len: usize, k: usize },
    #[error("length {len} exceeds the correlation bound {bound}")]
    BoundExceeded { len: usize, bound: usize },
    #[error("correlation order {0} unsupported (2..=4)")]
    UnsupportedOrder(usize),
}

/// Polynomial over F_2, packed 64 coefficients per block, lowest degree first.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct GF2Poly {
    blocks: Vec<u64>,
}

impl GF2Poly {
    pub fn zero() -> Self {
        GF2Poly::default()
    }

    pub fn one() -> Self {
        GF2Poly { blocks: vec![1] }
    }

    /// Generating function `sum s_i x^i` of the word.
    pub fn from_word(w: &Word) -> Self {
        let mut p = GF2Poly {
            blocks: w.blocks().to_vec(),
        };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.blocks.last() == Some(&0) {
            self.blocks.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.blocks.last()?;
        Some((self.blocks.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.blocks
            .get(i / 64)
            .map_or(0, |b| ((b >> (i % 64)) & 1) as u8)
    }

    pub fn set_coeff(&mut self, i: usize) {
        if self.blocks.len() <= i / 64 {
            self.blocks.resize(i / 64 + 1, 0);
        }
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    /// `self += other * x^shift`.
    pub fn add_shifted(&mut self, other: &GF2Poly, shift: usize) {
        if other.is_zero() {
            return;
        }
        let (word_shift, bit_shift) = (shift / 64, shift % 64);
        let needed = other.blocks.len() + word_shift + 1;
        if self.blocks.len() < needed {
            self.blocks.resize(needed, 0);
        }
        for (i, &b) in other.blocks.iter().enumerate() {
            self.blocks[i + word_shift] ^= b << bit_shift;
            if bit_shift != 0 {
                self.blocks[i + word_shift + 1] ^= b >> (64 - bit_shift);
            }
        }
        self.normalize();
    }

    /// Reduces modulo `x^n`.
    pub fn truncate(&mut self, n: usize) {
        self.blocks.truncate(n.div_ceil(64));
        if !n.is_multiple_of(64) && self.blocks.len() == n.div_ceil(64) {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
        self.normalize();
    }

    /// `self * other mod x^n`.
    pub fn mul_trunc(&self, other: &GF2Poly, n: usize) -> GF2Poly {
        let mut out = GF2Poly::zero();
        for (bi, &block) in self.blocks.iter().enumerate() {
            let mut b = block;
            while b != 0 {
                let i = bi * 64 + b.trailing_zeros() as usize;
                b &= b - 1;
                if i >= n {
                    break;
                }
                out.add_shifted(other, i);
            }
        }
        out.truncate(n);
        out
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let i = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(bi * 64 + i)
            })
        })
    }

    fn lowest_one(&self) -> Option<usize> {
        self.blocks
            .iter()
            .position(|&b| b != 0)
            .map(|bi| bi * 64 + self.blocks[bi].trailing_zeros() as usize)
    }
}

impl std::fmt::Debug for GF2Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .ones()
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// `L(S, N)` for every `N = 1..=len` by Berlekamp-Massey.
pub fn linear_profile(w: &Word) -> Profile<usize> {
    let mut conn = GF2Poly::one();
    let mut prev = GF2Poly::one();
    let mut l = 0usize;
    let mut gap = 1usize;
    let mut values = Vec::with_capacity(w.len());
    for n in 0..w.len() {
        let mut d = w.get(n);
        for i in conn.ones().skip_while(|&i| i == 0) {
            if i > l {
                break;
            }
            d ^= w.get(n - i);
        }
        if d == 0 {
            gap += 1;
        } else if 2 * l <= n {
            let old = conn.clone();
            conn.add_shifted(&prev, gap);
            l = n + 1 - l;
            prev = old;
            gap = 1;
        } else {
            conn.add_shifted(&prev, gap);
            gap += 1;
        }
        values.push(l);
    }
    Profile::new(values)
}

pub fn linear_complexity(w: &Word) -> usize {
    linear_profile(w).last().copied().unwrap_or(0)
}

/// A window length `u` and offsets `d_1 < ... < d_k` with the signed sum
/// `sum_{i < u} (-1)^(s_{i+d_1} + ... + s_{i+d_k})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationWitness {
    pub u: usize,
    pub offsets: Vec<usize>,
    pub value: i64,
}

impl CorrelationWitness {
    /// Recomputes the sum from `w`.
    pub fn sum_in(&self, w: &Word) -> i64 {
        (0..self.u)
            .map(|i| {
                let parity = self.offsets.iter().fold(0u8, |acc, &d| acc ^ w.get(i + d));
                if parity == 0 {
                    1
                } else {
                    -1
                }
            })
            .sum()
    }
}

/// Preference order of witnesses: larger |value| first, then lexicographically
/// least `(u, offsets)`.
fn better(a: &CorrelationWitness, b: &CorrelationWitness) -> bool {
    match a.value.abs().cmp(&b.value.abs()) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (a.u, &a.offsets) < (b.u, &b.offsets),
    }
}

/// Best window for one offset shape `0 = e_1 < ... < e_k`.
fn best_for_shape(w: &Word, shape: &[usize]) -> Option<CorrelationWitness> {
    let n = w.len();
    let span = *shape.last()?;
    let len = n - span;
    if len == 0 {
        return None;
    }
    let mut prefix = Vec::with_capacity(len + 1);
    let mut acc = 0i64;
    prefix.push(0);
    for j in 0..len {
        let parity = shape.iter().fold(0u8, |p, &e| p ^ w.get(j + e));
        acc += if parity == 0 { 1 } else { -1 };
        prefix.push(acc);
    }
    let hi = *prefix.iter().max()?;
    let lo = *prefix.iter().min()?;
    // Nearest pair of (max, min) positions; the latest partner before each
    // right end is the only candidate that can be nearest.
    let (mut last_hi, mut last_lo) = (None::<usize>, None::<usize>);
    let mut best: Option<(usize, usize)> = None;
    for (t, &p) in prefix.iter().enumerate() {
        for (is_end, partner) in [(p == hi, last_lo), (p == lo, last_hi)] {
            if let (true, Some(a)) = (is_end, partner) {
                let cand = (t - a, a);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        if p == hi {
            last_hi = Some(t);
        }
        if p == lo {
            last_lo = Some(t);
        }
    }
    let (u, a) = best?;
    Some(CorrelationWitness {
        u,
        offsets: shape.iter().map(|e| e + a).collect(),
        value: prefix[a + u] - prefix[a],
    })
}

fn correlation_impl(w: &Word, k: usize) -> Result<CorrelationWitness, MeasureError> {
    if !(2..=MAX_CORRELATION_ORDER).contains(&k) {
        return Err(MeasureError::UnsupportedOrder(k));
    }
    let n = w.len();
    if n < k {
        return Err(MeasureError::TooShort { len: n, k });
    }
    let mut best: Option<CorrelationWitness> = None;
    let mut shape = vec![0usize; k];
    // Enumerate 0 = e_1 < e_2 < ... < e_k <= n - 1 in lexicographic order.
    fn rec(
        w: &Word,
        shape: &mut Vec<usize>,
        idx: usize,
        best: &mut Option<CorrelationWitness>,
    ) {
        let n = w.len();
        let k = shape.len();
        if idx == k {
            if let Some(c) = best_for_shape(w, shape) {
                if best.as_ref().is_none_or(|b| better(&c, b)) {
                    *best = Some(c);
                }
            }
            return;
        }
        let start = shape[idx - 1] + 1;
        for e in start..=(n - 1 - (k - 1 - idx)) {
            shape[idx] = e;
            rec(w, shape, idx + 1, best);
        }
    }
    rec(w, &mut shape, 1, &mut best);
    Ok(best.expect("n >= k leaves at least one window"))
}

/// `C_2(S, N)` for the whole word, with the lexicographically least optimal
/// `(U, D)`. `O(N^2)`.
pub fn correlation2(w: &Word) -> Result<(u64, CorrelationWitness), MeasureError> {
    let c = correlation_impl(w, 2)?;
    Ok((c.value.unsigned_abs(), c))
}

/// `C_k(S, N)` for `2 <= k <= 4` and `N <=` [`CORRELATION_BOUND`].
pub fn correlation_k(w: &Word, k: usize) -> Result<(u64, CorrelationWitness), MeasureError> {
    correlation_k_with_bound(w, k, CORRELATION_BOUND)
}

pub fn correlation_k_with_bound(
    w: &Word,
    k: usize,
    bound: usize,
) -> Result<(u64, CorrelationWitness), MeasureError> {
    if w.len() > bound {
        return Err(MeasureError::BoundExceeded {
            len: w.len(),
            bound,
        });
    }
    let c = correlation_impl(w, k)?;
    Ok((c.value.unsigned_abs(), c))
}

/// Result of an expansion-complexity search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Expansion {
    /// The least total degree, with the monomials `x^i y^j` of one
    /// annihilating polynomial (empty for an all-zero prefix).
    Degree {
        degree: usize,
        witness: Vec<(usize, usize)>,
    },
    /// No annihilating polynomial of total degree `<= d_max`.
    AboveBound,
}

impl Expansion {
    pub fn degree(&self) -> Option<usize> {
        match self {
            Expansion::Degree { degree, .. } => Some(*degree),
            Expansion::AboveBound => None,
        }
    }
}

/// `E(S, N)`: the least total degree of a nonzero `h(x, y)` over F_2 with
/// `h(x, G(x)) = 0 mod x^N`, searched up to `d_max`.
///
/// Monomials are added in order of total degree to an incremental F_2
/// elimination; the first one that reduces to zero closes a dependency, and
/// its degree is the answer.
pub fn expansion_complexity(w: &Word, n: usize, d_max: usize) -> Expansion {
    assert!(n <= w.len());
    let g = GF2Poly::from_word(&w.prefix(n));
    if g.is_zero() {
        return Expansion::Degree {
            degree: 0,
            witness: Vec::new(),
        };
    }
    // powers[j] = G^j mod x^n
    let mut powers = vec![{
        let mut one = GF2Poly::one();
        one.truncate(n);
        one
    }];
    let mut monomials: Vec<(usize, usize)> = Vec::new();
    // Reduced rows: (vector, pivot = lowest set bit, combination of monomials)
    let mut rows: Vec<(GF2Poly, usize, GF2Poly)> = Vec::new();
    for d in 0..=d_max {
        if d >= 1 {
            let next = powers[d - 1].mul_trunc(&g, n);
            powers.push(next);
        }
        for (j, power) in powers.iter().enumerate() {
            let i = d - j;
            let mut vec = GF2Poly::zero();
            vec.add_shifted(power, i);
            vec.truncate(n);
            let mut combo = GF2Poly::zero();
            combo.set_coeff(monomials.len());
            monomials.push((i, j));
            loop {
                let Some(pivot) = vec.lowest_one() else {
                    let witness = combo.ones().map(|m| monomials[m]).collect();
                    return Expansion::Degree { degree: d, witness };
                };
                match rows.iter().find(|(_, p, _)| *p == pivot) {
                    Some((r, _, c)) => {
                        vec.add_shifted(r, 0);
                        combo.add_shifted(c, 0);
                    }
                    None => {
                        rows.push((vec, pivot, combo));
                        break;
                    }
                }
            }
        }
    }
    Expansion::AboveBound
}
