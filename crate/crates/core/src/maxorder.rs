//! Maximum-order (nonlinear) complexity.
//!
//! `M(S, N)` is the least `m` such that every length-`m` window of the prefix
//! that has a successor determines that successor uniquely. Conflicts are
//! downward closed (dropping the first symbol of a conflicting window gives a
//! shorter conflict), so `M = 1 + L` where `L` is the length of the longest
//! string `x` such that both `x0` and `x1` occur in the prefix, and `M = 0`
//! when no such `x` exists (a constant prefix).
//!
//! Both `x0` and `x1` occurring means `x` is right-branching. In a suffix
//! automaton every string of a state shares the same right extensions, so `L`
//! is the largest `len` of a state with transitions on both symbols. Built
//! online, the states gaining a transition on each append are exactly those on
//! the suffix-link walk, which gives the whole profile in amortized linear time.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numtheory;
use crate::seqcore::{least_period, PeriodicSequence, Profile, Word};

/// Default length limit for [`moc_oracle`].
pub const MOC_ORACLE_BOUND: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxOrderError {
    #[error("word length {len} exceeds oracle bound {bound}")]
    OracleBoundExceeded { len: usize, bound: usize },
    #[error("A and q are not coprime")]
    NotCoprime,
    #[error("modulus {0} must be odd and at least 3")]
    InvalidModulus(BigUint),
    #[error("A must lie in (0, q)")]
    InvalidResidue,
    #[error("{0} is not an odd prime power with 2 as primitive root")]
    NotEllModulus(BigUint),
}

/// Two equal windows of length `window` starting at `first < second` whose
/// successors differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub first: usize,
    pub second: usize,
    pub window: usize,
}

impl Conflict {
    /// Checks the conflict against `w`.
    pub fn holds_in(&self, w: &Word) -> bool {
        let Conflict {
            first,
            second,
            window,
        } = *self;
        first < second
            && second + window < w.len()
            && (0..window).all(|k| w.get(first + k) == w.get(second + k))
            && w.get(first + window) != w.get(second + window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MocResult {
    pub m: usize,
    /// Present iff `m >= 1`; its window length is `m - 1`.
    pub witness: Option<Conflict>,
}

const NIL: usize = usize::MAX;

struct SuffixAutomaton {
    len: Vec<usize>,
    link: Vec<usize>,
    next: Vec<[usize; 2]>,
    first_end: Vec<usize>,
    last: usize,
    pos: usize,
}

impl SuffixAutomaton {
    fn with_capacity(n: usize) -> Self {
        let cap = 2 * n + 1;
        let mut sam = SuffixAutomaton {
            len: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            next: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            last: 0,
            pos: 0,
        };
        sam.add_state(0, NIL, [NIL, NIL], NIL);
        sam
    }

    fn add_state(&mut self, len: usize, link: usize, next: [usize; 2], first_end: usize) -> usize {
        self.len.push(len);
        self.link.push(link);
        self.next.push(next);
        self.first_end.push(first_end);
        self.len.len() - 1
    }

    /// Appends `c`; returns the longest state that became right-branching.
    fn extend(&mut self, c: usize) -> Option<usize> {
        let cur = self.add_state(self.len[self.last] + 1, NIL, [NIL, NIL], self.pos);
        self.pos += 1;
        let mut branched = None;
        let mut p = self.last;
        while p != NIL && self.next[p][c] == NIL {
            if branched.is_none() && self.next[p][1 - c] != NIL {
                branched = Some(p);
            }
            self.next[p][c] = cur;
            p = self.link[p];
        }
        if p == NIL {
            self.link[cur] = 0;
        } else {
            let q = self.next[p][c];
            if self.len[p] + 1 == self.len[q] {
                self.link[cur] = q;
            } else {
                let clone = self.add_state(self.len[p] + 1, self.link[q], self.next[q], self.first_end[q]);
                while p != NIL && self.next[p][c] == q {
                    self.next[p][c] = clone;
                    p = self.link[p];
                }
                self.link[q] = clone;
                self.link[cur] = clone;
            }
        }
        self.last = cur;
        branched
    }

    fn conflict_at(&self, state: usize) -> Conflict {
        let window = self.len[state];
        let start = |c: usize| self.first_end[self.next[state][c]] - window;
        let (a, b) = (start(0), start(1));
        Conflict {
            first: a.min(b),
            second: a.max(b),
            window,
        }
    }
}

/// `M(S, N)` of the whole word, with a conflict witness when `m >= 1`.
pub fn moc(w: &Word) -> MocResult {
    let mut sam = SuffixAutomaton::with_capacity(w.len());
    let mut best: Option<usize> = None;
    for b in w.iter() {
        if let Some(p) = sam.extend(b as usize) {
            if best.is_none_or(|q| sam.len[p] > sam.len[q]) {
                best = Some(p);
            }
        }
    }
    match best {
        None => MocResult { m: 0, witness: None },
        Some(p) => {
            let witness = sam.conflict_at(p);
            MocResult {
                m: witness.window + 1,
                witness: Some(witness),
            }
        }
    }
}

/// `M(S, N)` for every prefix length `N = 1..=len`.
pub fn moc_profile(w: &Word) -> Profile<usize> {
    let mut sam = SuffixAutomaton::with_capacity(w.len());
    let mut current = 0usize;
    let mut values = Vec::with_capacity(w.len());
    for b in w.iter() {
        if let Some(p) = sam.extend(b as usize) {
            current = current.max(sam.len[p] + 1);
        }
        values.push(current);
    }
    Profile::new(values)
}

/// Naive reference: tries `m = 0, 1, 2, ...` and checks the window-to-successor
/// map directly.
pub fn moc_oracle(w: &Word) -> Result<MocResult, MaxOrderError> {
    moc_oracle_with_bound(w, MOC_ORACLE_BOUND)
}

pub fn moc_oracle_with_bound(w: &Word, bound: usize) -> Result<MocResult, MaxOrderError> {
    let n = w.len();
    if n > bound {
        return Err(MaxOrderError::OracleBoundExceeded { len: n, bound });
    }
    let bits = w.to_bits();
    let mut witness = None;
    for m in 0..=n {
        let mut successors: HashMap<&[u8], (u8, usize)> = HashMap::new();
        let mut conflict = None;
        for i in 0..n.saturating_sub(m) {
            let key = &bits[i..i + m];
            let succ = bits[i + m];
            match successors.get(key) {
                Some(&(s, first)) if s != succ => {
                    conflict = Some(Conflict {
                        first,
                        second: i,
                        window: m,
                    });
                    break;
                }
                Some(_) => {}
                None => {
                    successors.insert(key, (succ, i));
                }
            }
        }
        match conflict {
            Some(c) => witness = Some(c),
            None => return Ok(MocResult { m, witness }),
        }
    }
    unreachable!("m = n always has an empty window set")
}

/// `M(S)` of a periodic sequence: `M(S, 2T - 1)` for the least period `T`.
pub fn moc_periodic(s: &PeriodicSequence) -> usize {
    let s = least_period(s);
    let t = s.len();
    if t == 1 {
        return 0;
    }
    moc(&s.unroll(2 * t - 1)).m
}

/// The coset `D_A = {A * 2^n mod q : 0 <= n < ord_q(2)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetSet {
    elements: Vec<BigUint>,
}

impl CosetSet {
    /// Elements in generation order `A, 2A, 4A, ...` (mod q).
    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Least `N` with all elements pairwise distinct modulo `2^N`.
    pub fn distinct_modulus_bits(&self) -> usize {
        if self.elements.len() <= 1 {
            return 0;
        }
        let mut bits = numtheory::ceil_log2(&BigUint::from(self.elements.len())) as usize;
        loop {
            let mask = (BigUint::one() << bits) - 1u32;
            let mut seen = HashSet::with_capacity(self.elements.len());
            if self.elements.iter().all(|u| seen.insert(u & &mask)) {
                return bits;
            }
            bits += 1;
        }
    }
}

fn check_residue(a: &BigUint, q: &BigUint) -> Result<(), MaxOrderError> {
    if q < &BigUint::from(3u32) || q.is_even() {
        return Err(MaxOrderError::InvalidModulus(q.clone()));
    }
    if a.is_zero() || a >= q {
        return Err(MaxOrderError::InvalidResidue);
    }
    if !a.gcd(q).is_one() {
        return Err(MaxOrderError::NotCoprime);
    }
    Ok(())
}

pub fn coset(a: &BigUint, q: &BigUint) -> Result<CosetSet, MaxOrderError> {
    check_residue(a, q)?;
    let mut elements = vec![a.clone()];
    let mut u = (a << 1u32) % q;
    while &u != a {
        let next = (&u << 1u32) % q;
        elements.push(u);
        u = next;
    }
    Ok(CosetSet { elements })
}

/// `M(S)` of the FCSR sequence with value `-A/q`, computed from the coset
/// `D_A`: the least `N` making its elements distinct modulo `2^N`.
///
/// A period of 1 cannot occur for `q >= 3`; the constant-sequence value 0 is
/// returned in that case.
pub fn moc_from_coset(a: &BigUint, q: &BigUint) -> Result<usize, MaxOrderError> {
    let d = coset(a, q)?;
    if d.len() < 2 {
        return Ok(0);
    }
    Ok(d.distinct_modulus_bits())
}

/// Closed form of `M(S)` for an ℓ-sequence with connection integer `q`:
/// `floor(log2 q)` for `q` in {3, 5, 9}, `ceil(log2 q)` otherwise.
pub fn moc_ell_formula(q: &BigUint) -> Result<usize, MaxOrderError> {
    let not_ell = || MaxOrderError::NotEllModulus(q.clone());
    let is_ell = matches!(numtheory::is_odd_prime_power(q), Ok(Some(_)))
        && numtheory::is_two_primitive(q).unwrap_or(false);
    if !is_ell {
        return Err(not_ell());
    }
    let small = [3u32, 5, 9].iter().any(|&v| *q == BigUint::from(v));
    Ok(if small {
        numtheory::floor_log2(q) as usize
    } else {
        numtheory::ceil_log2(q) as usize
    })
}
