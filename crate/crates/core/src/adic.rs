//! 2-adic complexity.
//!
//! Periodic case: the connection integer `q = (2^T - 1) / gcd(2^T - 1, S(2))`.
//!
//! Aperiodic case: `mu(N) = min max(|f|, |q|)` over odd `q` with
//! `q * S(2) = f (mod 2^N)`. The admissible `(f, q)` are the points of the
//! rank-2 lattice spanned by `(S(2), 1)` and `(2^N, 0)` whose `q` coordinate
//! is odd. We Gauss-reduce that basis, seed an upper bound from small
//! combinations, and then enumerate: Cramer's rule bounds the coefficient of
//! the long basis vector by a small constant, and for each such coefficient
//! the best coefficient of the short vector minimizes a convex piecewise
//! linear function of one integer variable, which is solved in closed form.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numtheory;
use crate::seqcore::{reverse_period, PeriodicSequence, Profile, RationalRep, Word};

/// Largest `N` accepted by [`adic_oracle`].
pub const ADIC_ORACLE_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdicError {
    #[error("N = {n} exceeds the oracle bound {bound}")]
    OracleBoundExceeded { n: usize, bound: usize },
}

/// A witness `(f, q)` with `q` odd and `q * S(2) = f (mod 2^N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxPair {
    #[serde(serialize_with = "crate::ser_display")]
    pub f: BigInt,
    #[serde(serialize_with = "crate::ser_display")]
    pub q: BigInt,
    pub n: usize,
    #[serde(serialize_with = "crate::ser_display")]
    pub mu: BigUint,
}

impl ApproxPair {
    /// Checks parity, the congruence against the first `n` bits of `w`, and `mu`.
    pub fn is_valid_for(&self, w: &Word) -> bool {
        if self.n > w.len() || self.q.is_even() {
            return false;
        }
        let modulus = BigInt::one() << self.n;
        let s = BigInt::from(w.prefix(self.n).prefix_value());
        let congruent = (&self.q * s - &self.f).mod_floor(&modulus).is_zero();
        let mu = self.f.magnitude().max(self.q.magnitude());
        congruent && *mu == self.mu && !self.mu.is_zero()
    }

    pub fn value(&self) -> AdicValue {
        AdicValue::new(self.mu.clone())
    }
}

/// A 2-adic complexity value `log2(mu)` carried as the exact integer `mu`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AdicValue {
    #[serde(serialize_with = "crate::ser_display")]
    pub mu: BigUint,
}

impl AdicValue {
    pub fn new(mu: BigUint) -> Self {
        assert!(!mu.is_zero());
        AdicValue { mu }
    }

    pub fn log2(&self) -> f64 {
        numtheory::log2(&self.mu)
    }

    pub fn ceil_log2(&self) -> u64 {
        numtheory::ceil_log2(&self.mu)
    }
}

/// The reduced rational `-A/q` of a periodic sequence.
pub fn connection(s: &PeriodicSequence) -> RationalRep {
    let t = s.len();
    let full = (BigUint::one() << t) - 1u32;
    let value = s.period().prefix_value();
    let g = full.gcd(&value);
    RationalRep {
        a: value / &g,
        q: full / g,
    }
}

/// `Phi_2(S) = log2 q` of a periodic sequence.
pub fn phi2(s: &PeriodicSequence) -> AdicValue {
    AdicValue::new(connection(s).q)
}

/// The smaller of `Phi_2(S)` and `Phi_2(S^rev)`.
pub fn phi2_symmetric(s: &PeriodicSequence) -> AdicValue {
    phi2(s).min(phi2(&reverse_period(s)))
}

type Vector = (BigInt, BigInt);

fn dot(u: &Vector, v: &Vector) -> BigInt {
    &u.0 * &v.0 + &u.1 * &v.1
}

fn sup_norm(v: &Vector) -> BigInt {
    v.0.abs().max(v.1.abs())
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // b > 0
    let doubled: BigInt = a * 2 + b;
    doubled.div_floor(&(b * 2))
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Lagrange-Gauss reduction in the Euclidean norm; returns `(u, v)` with
/// `|u| <= |v|` and `|<u, v>| <= |u|^2 / 2`.
fn gauss_reduce(mut u: Vector, mut v: Vector) -> (Vector, Vector) {
    loop {
        if dot(&u, &u) > dot(&v, &v) {
            std::mem::swap(&mut u, &mut v);
        }
        let m = round_div(&dot(&u, &v), &dot(&u, &u));
        if m.is_zero() {
            return (u, v);
        }
        v = (&v.0 - &m * &u.0, &v.1 - &m * &u.1);
    }
}

/// `max(|a1 + t c1|, |a2 + t c2|)`.
fn eval_pair(a1: &BigInt, c1: &BigInt, a2: &BigInt, c2: &BigInt, t: &BigInt) -> BigInt {
    (a1 + t * c1).abs().max((a2 + t * c2).abs())
}

/// Integer minimizer of the convex function `max(|a1 + t c1|, |a2 + t c2|)`.
/// The real minimum sits at a breakpoint, so the floor or ceiling of some
/// breakpoint is an integer minimizer.
fn minimize_pair(a1: &BigInt, c1: &BigInt, a2: &BigInt, c2: &BigInt) -> (BigInt, BigInt) {
    let mut fractions: Vec<(BigInt, BigInt)> = Vec::with_capacity(4);
    let mut push = |num: BigInt, den: BigInt| {
        if !den.is_zero() {
            if den.is_negative() {
                fractions.push((-num, -den));
            } else {
                fractions.push((num, den));
            }
        }
    };
    push(-a1, c1.clone());
    push(-a2, c2.clone());
    push(a2 - a1, c1 - c2);
    push(-(a1 + a2), c1 + c2);
    let mut best: Option<(BigInt, BigInt)> = None;
    for (num, den) in &fractions {
        for t in [floor_div(num, den), ceil_div(num, den)] {
            let val = eval_pair(a1, c1, a2, c2, &t);
            if best.as_ref().is_none_or(|(bv, _)| val < *bv) {
                best = Some((val, t));
            }
        }
    }
    let (val, t) = best.unwrap_or_else(|| {
        let z = BigInt::zero();
        (eval_pair(a1, c1, a2, c2, &z), z)
    });
    (t, val)
}

/// Integer interval of `t` with `|a + t c| <= bound`, or `None` if empty.
/// With `c = 0` the constraint is `|a| <= bound` and the interval is unbounded,
/// reported as `(None, None)` inside `Some`.
type Interval = (Option<BigInt>, Option<BigInt>);

fn feasible_interval(a: &BigInt, c: &BigInt, bound: &BigInt) -> Option<Interval> {
    if c.is_zero() {
        return (a.abs() <= *bound).then_some((None, None));
    }
    let (lo_num, hi_num) = (-bound - a, bound - a);
    let (lo, hi) = if c.is_positive() {
        (ceil_div(&lo_num, c), floor_div(&hi_num, c))
    } else {
        (ceil_div(&hi_num, c), floor_div(&lo_num, c))
    };
    (lo <= hi).then_some((Some(lo), Some(hi)))
}

fn intersect(a: Interval, b: Interval) -> Option<Interval> {
    let lo = match (a.0, b.0) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    };
    let hi = match (a.1, b.1) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    match (&lo, &hi) {
        (Some(l), Some(h)) if l > h => None,
        _ => Some((lo, hi)),
    }
}

/// For a fixed coefficient `beta` of `v`, the points `alpha*u + beta*v` with
/// odd `q` are `a + t*c` (componentwise) for integer `t`. Returns `None` when
/// no such point has odd `q`.
fn odd_line(u: &Vector, v: &Vector, beta: &BigInt) -> Option<(Vector, Vector)> {
    let base = (beta * &v.0, beta * &v.1);
    if u.1.is_even() {
        if base.1.is_even() {
            return None;
        }
        Some((base, u.clone()))
    } else {
        let start = if base.1.is_odd() {
            base
        } else {
            (&base.0 + &u.0, &base.1 + &u.1)
        };
        Some((start, (&u.0 * 2, &u.1 * 2)))
    }
}

/// Absolutely least residue of `x` modulo `2^n`, ties toward `+2^(n-1)`.
fn abs_least_residue(x: &BigInt, n: usize) -> BigInt {
    let modulus = BigInt::one() << n;
    let half = BigInt::one() << (n - 1);
    let r = x.mod_floor(&modulus);
    if r > half {
        r - modulus
    } else {
        r
    }
}

fn trivial_pair(n: usize) -> ApproxPair {
    ApproxPair {
        f: BigInt::zero(),
        q: BigInt::one(),
        n,
        mu: BigUint::one(),
    }
}

/// Exact `mu(N)` for the first `n` bits of `w`, with the canonical witness:
/// the smallest positive odd `q` attaining the minimum and `f` the absolutely
/// least residue of `q * S(2)` (ties toward positive `f`).
///
/// # Panics
/// If `n > w.len()`.
pub fn adic_min(w: &Word, n: usize) -> ApproxPair {
    assert!(n <= w.len(), "N = {n} exceeds word length {}", w.len());
    if n == 0 {
        return trivial_pair(0);
    }
    let s = BigInt::from(w.prefix(n).prefix_value());
    let modulus = BigInt::one() << n;
    let (u, v) = gauss_reduce((s.clone(), BigInt::one()), (modulus.clone(), BigInt::zero()));

    // Some of u, v, u + v has odd q because (S(2), 1) is in the lattice.
    let sum = (&u.0 + &v.0, &u.1 + &v.1);
    let mut bound = [&u, &v, &sum]
        .into_iter()
        .filter(|x| x.1.is_odd())
        .map(sup_norm)
        .min()
        .expect("lattice has an odd-q point");

    // |det(u, x)| <= |x|_sup (|u_f| + |u_q|) and |det(u, v)| = 2^N.
    let beta_max = floor_div(&(&bound * (u.0.abs() + u.1.abs())), &modulus);
    let beta_max = beta_max.to_i64().expect("coefficient bound is small");

    for beta in -beta_max..=beta_max {
        let beta = BigInt::from(beta);
        if let Some((a, c)) = odd_line(&u, &v, &beta) {
            let (_, val) = minimize_pair(&a.0, &c.0, &a.1, &c.1);
            if val < bound {
                bound = val;
            }
        }
    }

    // Smallest |q| among optimal points.
    let mut best_q: Option<BigInt> = None;
    for beta in -beta_max..=beta_max {
        let beta = BigInt::from(beta);
        let Some((a, c)) = odd_line(&u, &v, &beta) else {
            continue;
        };
        let Some(i_f) = feasible_interval(&a.0, &c.0, &bound) else {
            continue;
        };
        let Some(i_q) = feasible_interval(&a.1, &c.1, &bound) else {
            continue;
        };
        let Some((lo, hi)) = intersect(i_f, i_q) else {
            continue;
        };
        let clamp = |t: BigInt| -> BigInt {
            let t = match &lo {
                Some(l) if t < *l => l.clone(),
                _ => t,
            };
            match &hi {
                Some(h) if t > *h => h.clone(),
                _ => t,
            }
        };
        let mut candidates = Vec::new();
        if c.1.is_zero() {
            candidates.push(clamp(BigInt::zero()));
        } else {
            let mut num = -a.1.clone();
            let mut den = c.1.clone();
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            candidates.push(clamp(floor_div(&num, &den)));
            candidates.push(clamp(ceil_div(&num, &den)));
        }
        for t in candidates {
            let q = (&a.1 + &t * &c.1).abs();
            let f = &a.0 + &t * &c.0;
            if f.abs() <= bound && q <= bound && best_q.as_ref().is_none_or(|b| q < *b) {
                best_q = Some(q);
            }
        }
    }

    let q = best_q.expect("the optimum is attained");
    let f = abs_least_residue(&(&q * &s), n);
    let mu = bound.to_biguint().expect("nonnegative");
    let pair = ApproxPair { f, q, n, mu };
    assert!(
        pair.f.magnitude() <= &pair.mu && pair.q.magnitude() <= &pair.mu,
        "witness exceeds the minimum"
    );
    pair
}

/// Exhaustive reference for [`adic_min`]: every odd `q < 2^N` with its
/// absolutely least `f`. Negative `q` is redundant by `(f, q) -> (-f, -q)`.
pub fn adic_oracle(w: &Word, n: usize) -> Result<ApproxPair, AdicError> {
    adic_oracle_with_bound(w, n, ADIC_ORACLE_BOUND)
}

pub fn adic_oracle_with_bound(w: &Word, n: usize, bound: usize) -> Result<ApproxPair, AdicError> {
    if n > bound {
        return Err(AdicError::OracleBoundExceeded { n, bound });
    }
    assert!(n <= w.len());
    if n == 0 {
        return Ok(trivial_pair(0));
    }
    assert!(n < 64);
    let modulus = 1i64 << n;
    let half = modulus / 2;
    let s = w.prefix(n).prefix_value().to_i64().expect("n < 64");
    let mut best: Option<(i64, i64, i64)> = None;
    for q in (1..modulus).step_by(2) {
        let mut f = ((q as i128 * s as i128) % modulus as i128) as i64;
        if f > half {
            f -= modulus;
        }
        let mu = f.abs().max(q);
        if best.is_none_or(|(m, _, _)| mu < m) {
            best = Some((mu, f, q));
        }
    }
    let (mu, f, q) = best.expect("q = 1 is admissible");
    Ok(ApproxPair {
        f: f.into(),
        q: q.into(),
        n,
        mu: BigUint::from(mu as u64),
    })
}

/// `mu(N)` for every `N = 1..=len`.
pub fn adic_profile(w: &Word) -> Profile<BigUint> {
    Profile::new((1..=w.len()).map(|n| adic_min(w, n).mu).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::thue_morse_word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn periodic(s: &str) -> PeriodicSequence {
        PeriodicSequence::new(w(s)).unwrap()
    }

    #[test]
    fn connection_examples() {
        let r = connection(&periodic("01001"));
        assert_eq!((r.a, r.q), (18u32.into(), 31u32.into()));
        assert_eq!(connection(&periodic("00100100")).q, BigUint::from(85u32));
        let r = connection(&periodic("1"));
        assert_eq!((r.a, r.q.clone()), (1u32.into(), 1u32.into()));
        assert_eq!(phi2(&periodic("1")).ceil_log2(), 0);
        let r = connection(&periodic("0"));
        assert_eq!((r.a, r.q), (0u32.into(), 1u32.into()));
    }

    #[test]
    fn symmetric_examples() {
        let pal = periodic("10001");
        assert_eq!(phi2_symmetric(&pal), phi2(&pal));
        assert_eq!(phi2_symmetric(&periodic("1")).mu, BigUint::one());
        // (1,0,0,1,0) has value 9, gcd(31, 9) = 1
        let rev = connection(&periodic("10010"));
        assert_eq!(rev.q, BigUint::from(31u32));
        assert_eq!(phi2_symmetric(&periodic("01001")).mu, BigUint::from(31u32));
    }

    #[test]
    fn counterexample_pair_is_admissible() {
        let word = w("0100101001");
        let pair = ApproxPair {
            f: 22.into(),
            q: 19.into(),
            n: 10,
            mu: 22u32.into(),
        };
        assert!(pair.is_valid_for(&word));
        let exact = adic_min(&word, 10);
        assert!(exact.mu <= BigUint::from(22u32));
        assert_eq!(exact, adic_oracle(&word, 10).unwrap());
    }

    #[test]
    fn stabilizes_after_two_periods() {
        let word = periodic("01001").unroll(11);
        assert_eq!(adic_min(&word, 11).mu, BigUint::from(31u32));
    }

    #[test]
    fn trivial_cases() {
        let zeros = Word::zeros(40);
        for n in 1..=40 {
            let p = adic_min(&zeros, n);
            assert_eq!((p.f.clone(), p.q.clone(), p.mu.clone()), (0.into(), 1.into(), 1u32.into()));
        }
        let p = adic_min(&w("1"), 1);
        assert_eq!((p.f, p.q, p.mu), (1.into(), 1.into(), 1u32.into()));
        let p = adic_oracle(&w("11"), 2).unwrap();
        assert_eq!((p.f, p.q, p.mu), ((-1).into(), 1.into(), 1u32.into()));
        assert_eq!(adic_min(&w("11"), 2).mu, BigUint::one());
        assert_eq!(adic_min(&Word::new(), 0).mu, BigUint::one());
    }

    #[test]
    fn half_modulus_tie_prefers_positive_f() {
        // S(2) = 2^(N-1): every odd q gives f = 2^(N-1).
        let word = w("00001");
        let p = adic_min(&word, 5);
        assert_eq!((p.f.clone(), p.q.clone()), (16.into(), 1.into()));
        assert_eq!(p, adic_oracle(&word, 5).unwrap());
    }

    #[test]
    fn oracle_bound() {
        let word = Word::zeros(30);
        assert!(matches!(
            adic_oracle(&word, 21),
            Err(AdicError::OracleBoundExceeded { .. })
        ));
        assert!(adic_oracle_with_bound(&word, 21, 22).is_ok());
    }

    #[test]
    fn exhaustive_small_lengths_match_oracle() {
        for n in 1..=10usize {
            for v in 0..(1u64 << n) {
                let word = Word::from_u64(v, n);
                let fast = adic_min(&word, n);
                assert_eq!(fast, adic_oracle(&word, n).unwrap(), "word {word}");
                assert!(fast.is_valid_for(&word));
            }
        }
    }

    #[test]
    fn thue_morse_profile_shape() {
        let tm = thue_morse_word(64);
        let prof = adic_profile(&tm);
        assert!(prof.is_nondecreasing());
        for n in 1..=64 {
            assert!(*prof.at(n) <= BigUint::one() << (n - 1));
        }
    }

    #[test]
    fn long_words_are_fast_and_valid() {
        let tm = thue_morse_word(3000);
        let p = adic_min(&tm, 3000);
        assert!(p.is_valid_for(&tm));
        assert!(p.value().log2() > 1000.0);
    }
}
