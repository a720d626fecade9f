//! Binary sequence data model.
//!
//! Bit order is fixed for the whole crate: index 0 is the first emitted symbol
//! and carries weight `2^0` in [`Word::prefix_value`].

use std::fmt;
use std::io::{self, Read, Write};
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error("malformed bit file: illegal byte {byte:#04x} at offset {offset}")]
    MalformedBitFile { offset: usize, byte: u8 },
    #[error("a period must contain at least one bit")]
    EmptyPeriod,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A finite binary word, packed 64 bits per block.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    blocks: Vec<u64>,
    len: usize,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Word {
            blocks: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Word {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Builds a word from 0/1 values; any nonzero value counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    /// The low `len` bits of `value`, least significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        (0..len).map(|i| (value >> i) & 1 == 1).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let (block, offset) = (self.len / 64, self.len % 64);
        if offset == 0 {
            self.blocks.push(0);
        }
        if bit {
            self.blocks[block] |= 1 << offset;
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        ((self.blocks[i / 64] >> (i % 64)) & 1) as u8
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.get(i) == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.blocks[i / 64] |= mask;
        } else {
            self.blocks[i / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: usize) -> Word {
        assert!(n <= self.len, "prefix length {n} exceeds word length {}", self.len);
        let mut blocks = self.blocks[..n.div_ceil(64)].to_vec();
        if !n.is_multiple_of(64) {
            if let Some(last) = blocks.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
        Word { blocks, len: n }
    }

    /// Bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        assert!(start <= end && end <= self.len);
        (start..end).map(|i| self.bit(i)).collect()
    }

    pub fn reversed(&self) -> Word {
        (0..self.len).rev().map(|i| self.bit(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// True when all bits are equal (vacuously for length <= 1).
    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.len
    }

    pub fn is_zero(&self) -> bool {
        self.count_ones() == 0
    }

    /// `sum s_n 2^n` over the whole word.
    pub fn prefix_value(&self) -> BigUint {
        let digits: Vec<u32> = self
            .blocks
            .iter()
            .flat_map(|&b| [b as u32, (b >> 32) as u32])
            .collect();
        BigUint::new(digits)
    }

    pub(crate) fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

impl FromIterator<bool> for Word {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut w = Word::with_capacity(iter.size_hint().0);
        for b in iter {
            w.push(b);
        }
        w
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = SeqError;

    /// Parses the bit-file text format.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bits(s.as_bytes())
    }
}

fn parse_bits(bytes: &[u8]) -> Result<Word, SeqError> {
    let mut w = Word::with_capacity(bytes.len());
    for (offset, &byte) in bytes.iter().enumerate() {
        match byte {
            b'0' => w.push(false),
            b'1' => w.push(true),
            b' ' | b'\t' | b'\n' | b'\r' => {}
            _ => return Err(SeqError::MalformedBitFile { offset, byte }),
        }
    }
    Ok(w)
}

/// Reads a bit file: ASCII '0'/'1', whitespace ignored, anything else rejected.
pub fn read_bits<R: Read>(mut source: R) -> Result<Word, SeqError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    parse_bits(&bytes)
}

pub const BITS_PER_LINE: usize = 64;

/// Writes `w` as a bit file, 64 bits per line.
pub fn write_bits<W: Write>(w: &Word, mut sink: W) -> io::Result<()> {
    let mut line = String::with_capacity(BITS_PER_LINE + 1);
    for (i, b) in w.iter().enumerate() {
        line.push(if b == 1 { '1' } else { '0' });
        if (i + 1) % BITS_PER_LINE == 0 || i + 1 == w.len() {
            line.push('\n');
            sink.write_all(line.as_bytes())?;
            line.clear();
        }
    }
    Ok(())
}

/// One period of a periodic binary sequence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PeriodicSequence {
    period: Word,
    least: bool,
}

impl PeriodicSequence {
    /// Wraps `period` without normalization.
    pub fn new(period: Word) -> Result<Self, SeqError> {
        if period.is_empty() {
            return Err(SeqError::EmptyPeriod);
        }
        Ok(PeriodicSequence {
            period,
            least: false,
        })
    }

    /// Shrinks `period` to its least period.
    pub fn least(period: Word) -> Result<Self, SeqError> {
        Ok(least_period(&Self::new(period)?))
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn len(&self) -> usize {
        self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_least(&self) -> bool {
        self.least
    }

    pub fn bit(&self, n: usize) -> u8 {
        self.period.get(n % self.period.len())
    }

    /// The first `n` terms of the infinite sequence.
    pub fn unroll(&self, n: usize) -> Word {
        (0..n).map(|i| self.bit(i) == 1).collect()
    }

    /// Left cyclic shift by `k`.
    pub fn shifted(&self, k: usize) -> PeriodicSequence {
        let t = self.len();
        PeriodicSequence {
            period: (0..t).map(|i| self.bit(i + k) == 1).collect(),
            least: self.least,
        }
    }
}

impl fmt::Debug for PeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Periodic({})", self.period)
    }
}

fn has_period(w: &Word, d: usize) -> bool {
    (d..w.len()).all(|i| w.get(i) == w.get(i - d))
}

/// Normalizes to the minimal divisor period.
pub fn least_period(s: &PeriodicSequence) -> PeriodicSequence {
    if s.least {
        return s.clone();
    }
    let t = s.len();
    let d = (1..=t)
        .find(|&d| t.is_multiple_of(d) && has_period(&s.period, d))
        .unwrap_or(t);
    PeriodicSequence {
        period: s.period.prefix(d),
        least: true,
    }
}

/// Reverses each period.
pub fn reverse_period(s: &PeriodicSequence) -> PeriodicSequence {
    PeriodicSequence {
        period: s.period.reversed(),
        least: s.least,
    }
}

/// The reduced rational `-A/q` whose 2-adic expansion is a periodic sequence.
/// `q` is the (minimal) connection integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalRep {
    #[serde(serialize_with = "crate::ser_display")]
    pub a: BigUint,
    #[serde(serialize_with = "crate::ser_display")]
    pub q: BigUint,
}

/// Per-prefix measure values; `values[N - 1]` holds the value for prefix length `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile<T> {
    values: Vec<T>,
}

impl<T> Profile<T> {
    pub fn new(values: Vec<T>) -> Self {
        Profile { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value for prefix length `n` (1-based).
    pub fn at(&self, n: usize) -> &T {
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn last(&self) -> Option<&T> {
        self.values.last()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

impl<T: PartialOrd> Profile<T> {
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}
