//! Sequence families: pattern sequences (Thue-Morse, Rudin-Shapiro), their
//! subsequences along polynomial values, the Zeckendorf digit-sum parity,
//! Legendre sequences, FCSR/ℓ-sequences and LFSR outputs.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::numtheory::{self, NumError};
use crate::seqcore::{PeriodicSequence, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("polynomial value at n={0} is negative")]
    NegativeValue(u64),
    #[error("polynomial value at n={0} overflows 128 bits")]
    Overflow(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("A and q are not coprime")]
    NotCoprime,
    #[error("modulus {0} must be odd and at least 3")]
    EvenModulus(BigUint),
    #[error("LFSR seed is all zero")]
    ZeroSeed,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<NumError> for GenError {
    fn from(e: NumError) -> Self {
        GenError::InvalidParameter(e.to_string())
    }
}

/// Integer polynomial, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySpec {
    coefficients: Vec<i64>,
}

impl PolySpec {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coefficients: Vec<i64>) -> Result<Self, GenError> {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return Err(GenError::InvalidParameter("zero polynomial".into()));
        }
        Ok(PolySpec { coefficients })
    }

    /// The identity polynomial `n`.
    pub fn identity() -> Self {
        PolySpec {
            coefficients: vec![0, 1],
        }
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coefficients = vec![0; degree + 1];
        coefficients[degree] = 1;
        PolySpec { coefficients }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, n: u64) -> Option<i128> {
        self.coefficients.iter().rev().try_fold(0i128, |acc, &c| {
            acc.checked_mul(n as i128)?.checked_add(c as i128)
        })
    }

    /// `f(n)` as a nonnegative index.
    pub fn eval_index(&self, n: u64) -> Result<u128, GenError> {
        let v = self.eval(n).ok_or(GenError::Overflow(n))?;
        if v < 0 {
            return Err(GenError::NegativeValue(n));
        }
        Ok(v as u128)
    }

    pub fn eval_mod(&self, n: u64, p: u64) -> u64 {
        let p = p as i128;
        let n = n as i128 % p;
        self.coefficients
            .iter()
            .rev()
            .fold(0i128, |acc, &c| (acc * n + c as i128).rem_euclid(p)) as u64
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        self.coefficients.iter().all(|&c| c.rem_euclid(p as i64) == 0)
    }
}

impl fmt::Display for PolySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            f.write_str(sign)?;
            match (e, mag) {
                (0, _) => write!(f, "{mag}")?,
                (_, 1) => {}
                _ => write!(f, "{mag}*")?,
            }
            match e {
                0 => {}
                1 => f.write_str("n")?,
                _ => write!(f, "n^{e}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Parity of the overlapping occurrences of `1^k` in the binary expansion of `n`.
///
/// `k = 1` is Thue-Morse, `k = 2` is Rudin-Shapiro.
pub fn pattern_bit(k: u32, n: u128) -> u8 {
    assert!(k >= 1, "pattern length must be positive");
    if k > 128 {
        return 0;
    }
    let windows = (1..k).fold(n, |acc, i| acc & (n >> i));
    (windows.count_ones() & 1) as u8
}

pub fn pattern_word(k: u32, len: usize) -> Word {
    (0..len as u128).map(|n| pattern_bit(k, n) == 1).collect()
}

pub fn thue_morse_word(len: usize) -> Word {
    pattern_word(1, len)
}

pub fn rudin_shapiro_word(len: usize) -> Word {
    pattern_word(2, len)
}

/// Word whose n-th bit is `base(f(n))`.
pub fn along_polynomial<F>(base: F, f: &PolySpec, len: usize) -> Result<Word, GenError>
where
    F: Fn(u128) -> u8,
{
    let mut w = Word::with_capacity(len);
    for n in 0..len as u64 {
        w.push(base(f.eval_index(n)?) == 1);
    }
    Ok(w)
}

fn fibonacci_values() -> &'static [u128] {
    static FIBS: OnceLock<Vec<u128>> = OnceLock::new();
    FIBS.get_or_init(|| {
        // F_2, F_3, ... up to the largest below 2^128.
        let mut fibs = vec![1u128, 2];
        while let Some(next) = fibs[fibs.len() - 1].checked_add(fibs[fibs.len() - 2]) {
            fibs.push(next);
        }
        fibs
    })
}

/// Zeckendorf digits `eps_i(n)` (coefficient of `F_{i+2}`), lowest first,
/// from the greedy algorithm.
pub fn zeckendorf_digits(mut n: u128) -> Vec<u8> {
    let mut digits = Vec::new();
    for (i, &f) in fibonacci_values().iter().enumerate().rev() {
        if f <= n {
            if digits.is_empty() {
                digits = vec![0; i + 1];
            }
            digits[i] = 1;
            n -= f;
        }
    }
    digits
}

/// Parity of the Zeckendorf digit sum of `n`.
pub fn zeckendorf_bit(n: u128) -> u8 {
    let mut rest = n;
    let mut parity = 0u8;
    for &f in fibonacci_values().iter().rev() {
        if f <= rest {
            rest -= f;
            parity ^= 1;
        }
    }
    parity
}

pub fn zeckendorf_word(len: usize) -> Word {
    (0..len as u128).map(|n| zeckendorf_bit(n) == 1).collect()
}

/// Legendre sequence along `f`: bit n is 1 iff `(f(n)/p) = 1`.
pub fn legendre_word(p: u64, f: &PolySpec, len: usize) -> Result<Word, GenError> {
    if p < 3 || !numtheory::is_prime_u64(p) {
        return Err(GenError::NotOddPrime(p));
    }
    if f.is_zero_mod(p) {
        return Err(GenError::InvalidParameter(format!(
            "polynomial {f} vanishes modulo {p}"
        )));
    }
    Ok((0..len as u64)
        .map(|n| numtheory::legendre_u64(f.eval_mod(n, p), p) == 1)
        .collect())
}

/// One period (length `p`) of the Legendre sequence along `f`.
pub fn legendre_period(p: u64, f: &PolySpec) -> Result<PeriodicSequence, GenError> {
    let w = legendre_word(p, f, p as usize)?;
    Ok(PeriodicSequence::new(w).expect("p >= 3"))
}

fn check_fcsr(a: &BigUint, q: &BigUint) -> Result<(), GenError> {
    if q < &BigUint::from(3u32) || q.is_even() {
        return Err(GenError::EvenModulus(q.clone()));
    }
    if a.is_zero() || a >= q {
        return Err(GenError::InvalidParameter(format!(
            "A={a} must lie in (0, q) with q={q}"
        )));
    }
    if !a.gcd(q).is_one() {
        return Err(GenError::NotCoprime);
    }
    Ok(())
}

/// `s_n = (A * 2^{-n} mod q) mod 2`.
pub fn fcsr_bit(a: &BigUint, q: &BigUint, n: u64) -> Result<u8, GenError> {
    check_fcsr(a, q)?;
    let r = numtheory::mod_pow(&BigInt::from(2), &-BigInt::from(n), q)? * a % q;
    Ok(if r.is_odd() { 1 } else { 0 })
}

/// One full period of the FCSR sequence `s_n = (A * 2^{-n} mod q) mod 2`.
///
/// `A` is taken in `(0, q)`; the sequence then has 2-adic value `-A/q`, and
/// the returned period has length `ord_q(2)`.
pub fn fcsr_word(a: &BigUint, q: &BigUint) -> Result<PeriodicSequence, GenError> {
    check_fcsr(a, q)?;
    let mut w = Word::new();
    if let (Some(a), Some(q)) = (a.to_u64(), q.to_u64()) {
        if q < u64::MAX / 2 {
            let mut r = a;
            loop {
                w.push(r & 1 == 1);
                // multiply by 2^{-1} mod q
                r = if r & 1 == 0 { r / 2 } else { (r + q) / 2 };
                if r == a {
                    break;
                }
            }
            return Ok(PeriodicSequence::least(w).expect("nonempty"));
        }
    }
    let mut r = a.clone();
    loop {
        w.push(r.is_odd());
        if r.is_odd() {
            r += q;
        }
        r >>= 1u32;
        if &r == a {
            break;
        }
    }
    Ok(PeriodicSequence::least(w).expect("nonempty"))
}

/// Output of the linear recurrence `s_{n+r} = sum_{t in taps} s_{n+t}` over F_2.
pub fn lfsr_word(degree: usize, taps: &[usize], seed: &Word, len: usize) -> Result<Word, GenError> {
    check_lfsr(degree, taps, seed)?;
    let mut w = Word::with_capacity(len.max(degree));
    for b in seed.iter() {
        w.push(b == 1);
    }
    while w.len() < len {
        let n = w.len() - degree;
        let next = taps.iter().fold(0u8, |acc, &t| acc ^ w.get(n + t));
        w.push(next == 1);
    }
    Ok(w.prefix(len.min(w.len())))
}

fn check_lfsr(degree: usize, taps: &[usize], seed: &Word) -> Result<(), GenError> {
    if degree == 0 {
        return Err(GenError::InvalidParameter("LFSR degree must be positive".into()));
    }
    if seed.len() != degree {
        return Err(GenError::InvalidParameter(format!(
            "seed has {} bits, expected {degree}",
            seed.len()
        )));
    }
    if let Some(t) = taps.iter().find(|&&t| t >= degree) {
        return Err(GenError::InvalidParameter(format!(
            "tap {t} out of range for degree {degree}"
        )));
    }
    if seed.is_zero() {
        return Err(GenError::ZeroSeed);
    }
    Ok(())
}

pub const LFSR_PERIOD_MAX_DEGREE: usize = 32;

/// The least period of the LFSR output, found by stepping the state until the
/// seed state recurs. Requires the recurrence to be purely periodic from the
/// seed (tap 0 present) and `degree <= 32`.
pub fn lfsr_period(degree: usize, taps: &[usize], seed: &Word) -> Result<PeriodicSequence, GenError> {
    check_lfsr(degree, taps, seed)?;
    if degree > LFSR_PERIOD_MAX_DEGREE {
        return Err(GenError::InvalidParameter(format!(
            "period search limited to degree {LFSR_PERIOD_MAX_DEGREE}"
        )));
    }
    if !taps.contains(&0) {
        return Err(GenError::InvalidParameter(
            "recurrence without tap 0 is not purely periodic".into(),
        ));
    }
    let mask: u64 = taps.iter().fold(0, |m, &t| m | (1 << t));
    let start: u64 = (0..degree).fold(0, |s, i| s | ((seed.get(i) as u64) << i));
    let mut state = start;
    let mut w = Word::new();
    loop {
        w.push(state & 1 == 1);
        let fb = ((state & mask).count_ones() & 1) as u64;
        state = (state >> 1) | (fb << (degree - 1));
        if state == start {
            break;
        }
    }
    Ok(PeriodicSequence::least(w).expect("nonempty"))
}
