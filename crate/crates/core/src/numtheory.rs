//! Integer arithmetic used across the crate: extended gcd, modular powers with
//! negative exponents, multiplicative order, Euler's phi, primitivity of 2 and
//! the Legendre symbol.
//!
//! Factorization and primality are deterministic trial division. Inputs to
//! anything that factors must be below 2^64 (so trial divisors stay below
//! 2^32); larger inputs are rejected with [`NumError::TooLarge`].

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("base is not invertible modulo the modulus")]
    NonInvertible,
    #[error("arguments are not coprime")]
    NotCoprime,
    #[error("{0} exceeds the trial-division bound (2^64)")]
    TooLarge(BigUint),
    #[error("{0} is not an odd prime")]
    NotOddPrime(BigUint),
    #[error("invalid modulus {0}")]
    InvalidModulus(BigUint),
}

/// Prime factorization `p1^e1 * p2^e2 * ...` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    prime_powers: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn prime_powers(&self) -> &[(u64, u32)] {
        &self.prime_powers
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_powers.iter().map(|&(p, _)| p)
    }

    /// Product of the prime powers, i.e. the factored number.
    pub fn value(&self) -> BigUint {
        self.prime_powers
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }

    pub fn phi(&self) -> BigUint {
        self.prime_powers.iter().fold(BigUint::one(), |acc, &(p, e)| {
            acc * BigUint::from(p).pow(e - 1) * BigUint::from(p - 1)
        })
    }
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(|a|, |b|)`.
pub fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_x, mut x) = (BigInt::one(), BigInt::zero());
    let (mut old_y, mut y) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let quot = &old_r / &r;
        let next_r = &old_r - &quot * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_x = &old_x - &quot * &x;
        old_x = std::mem::replace(&mut x, next_x);
        let next_y = &old_y - &quot * &y;
        old_y = std::mem::replace(&mut y, next_y);
    }
    if old_r.is_negative() {
        (-old_r, -old_x, -old_y)
    } else {
        (old_r, old_x, old_y)
    }
}

/// Inverse of `a` modulo `modulus` in `[0, modulus)`.
pub fn mod_inverse(a: &BigInt, modulus: &BigUint) -> Result<BigUint, NumError> {
    if *modulus <= BigUint::one() {
        return Err(NumError::InvalidModulus(modulus.clone()));
    }
    let m = BigInt::from(modulus.clone());
    let (g, x, _) = egcd(&a.mod_floor(&m), &m);
    if !g.is_one() {
        return Err(NumError::NonInvertible);
    }
    Ok(x.mod_floor(&m).to_biguint().expect("mod_floor is nonnegative"))
}

/// `base^exp mod modulus` in `[0, modulus)`. Negative exponents use the
/// inverse of `base`, which must exist.
pub fn mod_pow(base: &BigInt, exp: &BigInt, modulus: &BigUint) -> Result<BigUint, NumError> {
    if *modulus <= BigUint::one() {
        return Err(NumError::InvalidModulus(modulus.clone()));
    }
    let m = BigInt::from(modulus.clone());
    let b = if exp.sign() == Sign::Minus {
        mod_inverse(base, modulus)?
    } else {
        base.mod_floor(&m).to_biguint().expect("nonnegative")
    };
    Ok(b.modpow(exp.magnitude(), modulus))
}

pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn to_u64(n: &BigUint) -> Result<u64, NumError> {
    n.to_u64().ok_or_else(|| NumError::TooLarge(n.clone()))
}

pub(crate) fn factorize_u64(mut n: u64) -> Factorization {
    let mut prime_powers = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            prime_powers.push((p, e));
        }
    };
    push(2, &mut n);
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        push(d, &mut n);
        d += 2;
    }
    if n > 1 {
        prime_powers.push((n, 1));
    }
    Factorization { prime_powers }
}

/// Factorization of `n >= 1` by trial division (`n < 2^64`).
pub fn factorize(n: &BigUint) -> Result<Factorization, NumError> {
    if n.is_zero() {
        return Err(NumError::InvalidModulus(n.clone()));
    }
    Ok(factorize_u64(to_u64(n)?))
}

pub(crate) fn phi_u64(n: u64) -> u64 {
    factorize_u64(n)
        .prime_powers
        .iter()
        .fold(1, |acc, &(p, e)| acc * p.pow(e - 1) * (p - 1))
}

pub fn euler_phi(n: &BigUint) -> Result<BigUint, NumError> {
    Ok(factorize(n)?.phi())
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_prime(n: &BigUint) -> Result<bool, NumError> {
    Ok(is_prime_u64(to_u64(n)?))
}

/// Order of `a` modulo `m` for `u64` arguments; `None` if not coprime.
pub(crate) fn order_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if a.gcd(&m) != 1 {
        return None;
    }
    let mut order = phi_u64(m);
    for p in factorize_u64(order).primes() {
        while order.is_multiple_of(p) && pow_mod_u64(a, order / p, m) == 1 {
            order /= p;
        }
    }
    Some(order)
}

/// Least `t >= 1` with `a^t = 1 (mod m)`, found by stripping prime factors
/// from `phi(m)`.
pub fn multiplicative_order(a: &BigUint, modulus: &BigUint) -> Result<BigUint, NumError> {
    if *modulus <= BigUint::one() {
        return Err(NumError::InvalidModulus(modulus.clone()));
    }
    let m = to_u64(modulus)?;
    let a = (a % modulus).to_u64().expect("reduced below a u64 modulus");
    order_u64(a, m).map(BigUint::from).ok_or(NumError::NotCoprime)
}

fn check_odd_modulus(q: &BigUint) -> Result<u64, NumError> {
    let v = to_u64(q)?;
    if v < 3 || v % 2 == 0 {
        return Err(NumError::InvalidModulus(q.clone()));
    }
    Ok(v)
}

pub(crate) fn is_two_primitive_u64(q: u64) -> bool {
    order_u64(2, q) == Some(phi_u64(q))
}

/// Whether 2 is a primitive root modulo the odd number `q >= 3`.
pub fn is_two_primitive(q: &BigUint) -> Result<bool, NumError> {
    Ok(is_two_primitive_u64(check_odd_modulus(q)?))
}

pub(crate) fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre_symbol(a: &BigInt, p: &BigUint) -> Result<i8, NumError> {
    let pv = to_u64(p)?;
    if pv == 2 || !is_prime_u64(pv) {
        return Err(NumError::NotOddPrime(p.clone()));
    }
    let r = a
        .mod_floor(&BigInt::from(pv))
        .to_u64()
        .expect("residue below p");
    Ok(legendre_u64(r, pv))
}

pub(crate) fn odd_prime_power_u64(q: u64) -> Option<(u64, u32)> {
    if q < 3 || q.is_multiple_of(2) {
        return None;
    }
    match factorize_u64(q).prime_powers.as_slice() {
        [(p, r)] => Some((*p, *r)),
        _ => None,
    }
}

/// Returns `(p, r)` with `q = p^r` for an odd prime `p`, if such exist.
pub fn is_odd_prime_power(q: &BigUint) -> Result<Option<(u64, u32)>, NumError> {
    Ok(odd_prime_power_u64(to_u64(q)?))
}

/// `ceil(log2(n))` for `n >= 1`, exact.
pub fn ceil_log2(n: &BigUint) -> u64 {
    assert!(!n.is_zero(), "log2 of zero");
    let bits = n.bits();
    if n.trailing_zeros() == Some(bits - 1) {
        bits - 1
    } else {
        bits
    }
}

/// `floor(log2(n))` for `n >= 1`.
pub fn floor_log2(n: &BigUint) -> u64 {
    assert!(!n.is_zero(), "log2 of zero");
    n.bits() - 1
}

/// Binary logarithm as a float. Presentation only.
pub fn log2(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("64 bits") as f64).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bu(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn egcd_examples() {
        assert_eq!(egcd(&bi(31), &bi(18)).0, bi(1));
        assert_eq!(egcd(&bi(12), &bi(8)).0, bi(4));
        assert_eq!(egcd(&bi(0), &bi(7)).0, bi(7));
        let (g, x, y) = egcd(&bi(-12), &bi(8));
        assert_eq!(g, bi(4));
        assert_eq!(bi(-12) * x + bi(8) * y, g);
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&bi(2), &bi(5), &bu(31)).unwrap(), bu(1));
        assert_eq!(mod_pow(&bi(2), &bi(-1), &bu(31)).unwrap(), bu(16));
        assert_eq!(mod_pow(&bi(2), &bi(342), &bu(361)).unwrap(), bu(1));
        assert_eq!(mod_pow(&bi(6), &bi(-1), &bu(9)), Err(NumError::NonInvertible));
        assert_eq!(mod_pow(&bi(6), &bi(2), &bu(9)).unwrap(), bu(0));
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(&bu(2), &bu(31)).unwrap(), bu(5));
        assert_eq!(multiplicative_order(&bu(2), &bu(51)).unwrap(), bu(8));
        assert_eq!(multiplicative_order(&bu(2), &bu(3)).unwrap(), bu(2));
        assert_eq!(
            multiplicative_order(&bu(3), &bu(51)),
            Err(NumError::NotCoprime)
        );
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(&bu(9)).unwrap(), bu(6));
        assert_eq!(euler_phi(&bu(625)).unwrap(), bu(500));
        assert_eq!(euler_phi(&bu(1)).unwrap(), bu(1));
        let big = BigUint::one() << 64u32;
        assert!(matches!(euler_phi(&big), Err(NumError::TooLarge(_))));
    }

    #[test]
    fn factorization_reconstructs() {
        for n in [1u64, 2, 12, 97, 360, 6859, 65535, 4_294_967_297] {
            let f = factorize(&bu(n)).unwrap();
            assert_eq!(f.value(), bu(n));
            assert!(f.prime_powers().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_two_primitive(&bu(19)).unwrap());
        assert!(!is_two_primitive(&bu(51)).unwrap());
        // 2^8 = 256 = 1 (mod 17), so ord_17(2) = 8 < 16.
        let ord17 = (1..=16u64).find(|&t| pow_mod_u64(2, t, 17) == 1).unwrap();
        assert_eq!(ord17, 8);
        assert!(!is_two_primitive(&bu(17)).unwrap());
        assert!(is_two_primitive(&bu(4)).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(&bi(1), &bu(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(&bi(2), &bu(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(&bi(2), &bu(5)).unwrap(), -1);
        assert_eq!(legendre_symbol(&bi(10), &bu(5)).unwrap(), 0);
        assert_eq!(legendre_symbol(&bi(-1), &bu(5)).unwrap(), 1);
        assert!(matches!(
            legendre_symbol(&bi(1), &bu(9)),
            Err(NumError::NotOddPrime(_))
        ));
        assert!(legendre_symbol(&bi(1), &bu(2)).is_err());
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(is_odd_prime_power(&bu(27)).unwrap(), Some((3, 3)));
        assert_eq!(is_odd_prime_power(&bu(63)).unwrap(), None);
        assert_eq!(is_odd_prime_power(&bu(5)).unwrap(), Some((5, 1)));
    }

    #[test]
    fn log2_helpers() {
        assert_eq!(log2(&bu(1)), 0.0);
        assert!((log2(&bu(22)) - 22f64.log2()).abs() < 1e-12);
        let big = (BigUint::one() << 200u32) + 1u32;
        assert!((log2(&big) - 200.0).abs() < 1e-9);
        assert_eq!(ceil_log2(&bu(1)), 0);
        assert_eq!(ceil_log2(&bu(2)), 1);
        assert_eq!(ceil_log2(&bu(3)), 2);
        assert_eq!(ceil_log2(&bu(31)), 5);
        assert_eq!(ceil_log2(&bu(32)), 5);
        assert_eq!(floor_log2(&bu(31)), 4);
        let big = (BigUint::one() << 200u32) - 1u32;
        assert!((log2(&big) - 200.0).abs() < 1e-9);
    }
}
