//! Text descriptions of sequences: `NAME(:key=value(,key=value)*)?(@poly=EXPR)?`.
//!
//! ```
//! use seqlab::seqspec::parse_seqspec;
//! let spec = parse_seqspec("ell:q=31,A=3").unwrap();
//! assert_eq!(spec.period().unwrap().unwrap().period().to_string(), "11000");
//! assert_eq!(parse_seqspec("pattern:k=2").unwrap(), parse_seqspec("rudin-shapiro").unwrap());
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::generators::{
    fcsr_word, legendre_period, legendre_word, lfsr_period, lfsr_word, pattern_bit,
    pattern_word, zeckendorf_bit, zeckendorf_word, GenError, PolySpec,
};
use crate::seqcore::{least_period, read_bits, PeriodicSequence, SeqError, Word};

pub const MAX_POLY_DEGREE: usize = 64;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("{family}: missing parameter '{key}'")]
    MissingParameter { family: &'static str, key: &'static str },
    #[error("invalid parameter '{key}': {reason}")]
    InvalidParameter { key: String, reason: String },
    #[error("{0}")]
    Generation(#[from] GenError),
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: SeqError },
    #[error("{} holds {available} bits, {requested} requested", path.display())]
    FileTooShort {
        path: PathBuf,
        available: usize,
        requested: usize,
    },
}

fn parse_err(pos: usize, message: impl Into<String>) -> SpecError {
    SpecError::Parse {
        pos,
        message: message.into(),
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> SpecError {
    SpecError::InvalidParameter {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Zero,
    Ones,
    /// `k = 1` is Thue-Morse, `k = 2` Rudin-Shapiro.
    Pattern { k: u32 },
    Zeckendorf,
    Legendre { p: u64, f: PolySpec },
    /// FCSR sequence `(A 2^-n mod q) mod 2`.
    Ell { q: BigUint, a: BigUint },
    Lfsr {
        degree: usize,
        taps: Vec<usize>,
        seed: Word,
    },
    File { path: PathBuf },
}

impl Family {
    pub fn is_periodic(&self) -> bool {
        matches!(
            self,
            Family::Zero
                | Family::Ones
                | Family::Legendre { .. }
                | Family::Ell { .. }
                | Family::Lfsr { .. }
                | Family::File { .. }
        )
    }
}

/// A validated sequence description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqSpec {
    pub family: Family,
    pub subsequence: Option<PolySpec>,
}

impl SeqSpec {
    pub fn new(family: Family) -> Self {
        SeqSpec {
            family,
            subsequence: None,
        }
    }

    pub fn along(mut self, f: PolySpec) -> Self {
        self.subsequence = Some(f);
        self
    }

    /// The first `n` terms.
    pub fn word(&self, n: usize) -> Result<Word, SpecError> {
        if let Some(f) = &self.subsequence {
            return self.word_along(f, n);
        }
        Ok(match &self.family {
            Family::Zero => Word::zeros(n),
            Family::Ones => (0..n).map(|_| true).collect(),
            Family::Pattern { k } => pattern_word(*k, n),
            Family::Zeckendorf => zeckendorf_word(n),
            Family::Legendre { p, f } => legendre_word(*p, f, n)?,
            Family::Ell { .. } => self.base_period()?.unroll(n),
            Family::Lfsr { degree, taps, seed } => lfsr_word(*degree, taps, seed, n)?.prefix(n),
            Family::File { path } => {
                let w = load_file(path)?;
                if w.len() < n {
                    return Err(SpecError::FileTooShort {
                        path: path.clone(),
                        available: w.len(),
                        requested: n,
                    });
                }
                w.prefix(n)
            }
        })
    }

    fn word_along(&self, f: &PolySpec, n: usize) -> Result<Word, SpecError> {
        let mut w = Word::with_capacity(n);
        match &self.family {
            Family::Pattern { k } => {
                for i in 0..n as u64 {
                    w.push(pattern_bit(*k, f.eval_index(i)?) == 1);
                }
            }
            Family::Zeckendorf => {
                for i in 0..n as u64 {
                    w.push(zeckendorf_bit(f.eval_index(i)?) == 1);
                }
            }
            _ => {
                let base = self.base_period()?;
                let t = base.len() as u128;
                for i in 0..n as u64 {
                    w.push(base.bit((f.eval_index(i)? % t) as usize) == 1);
                }
            }
        }
        Ok(w)
    }

    /// One period of the base family, ignoring any subsequence polynomial.
    fn base_period(&self) -> Result<PeriodicSequence, SpecError> {
        let one = |bit: bool| PeriodicSequence::least((0..1).map(|_| bit).collect());
        Ok(match &self.family {
            Family::Zero => one(false).expect("nonempty"),
            Family::Ones => one(true).expect("nonempty"),
            Family::Legendre { p, f } => legendre_period(*p, f)?,
            Family::Ell { q, a } => fcsr_word(a, q)?,
            Family::Lfsr { degree, taps, seed } => lfsr_period(*degree, taps, seed)?,
            Family::File { path } => {
                let w = load_file(path)?;
                PeriodicSequence::new(w).map_err(|source| SpecError::File {
                    path: path.clone(),
                    source,
                })?
            }
            Family::Pattern { .. } | Family::Zeckendorf => {
                unreachable!("aperiodic families have no period")
            }
        })
    }

    /// The least period for periodic families (a file is read as one period),
    /// `None` for the automatic sequences.
    pub fn period(&self) -> Result<Option<PeriodicSequence>, SpecError> {
        if !self.family.is_periodic() {
            return Ok(None);
        }
        let base = self.base_period()?;
        let Some(f) = &self.subsequence else {
            return Ok(Some(least_period(&base)));
        };
        let t = base.len();
        let w = self.word_along(f, t)?;
        let s = PeriodicSequence::new(w).expect("t >= 1");
        Ok(Some(least_period(&s)))
    }
}

fn load_file(path: &PathBuf) -> Result<Word, SpecError> {
    let file = std::fs::File::open(path).map_err(|e| SpecError::File {
        path: path.clone(),
        source: SeqError::Io(e),
    })?;
    read_bits(std::io::BufReader::new(file)).map_err(|source| SpecError::File {
        path: path.clone(),
        source,
    })
}

impl fmt::Display for SeqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Zero => write!(f, "zero")?,
            Family::Ones => write!(f, "ones")?,
            Family::Pattern { k: 1 } => write!(f, "thue-morse")?,
            Family::Pattern { k: 2 } => write!(f, "rudin-shapiro")?,
            Family::Pattern { k } => write!(f, "pattern:k={k}")?,
            Family::Zeckendorf => write!(f, "zeckendorf")?,
            Family::Legendre { p, f: poly } => write!(f, "legendre:p={p},f={poly}")?,
            Family::Ell { q, a } => write!(f, "ell:q={q},A={a}")?,
            Family::Lfsr { degree, taps, seed } => {
                let taps: Vec<String> = taps.iter().map(|t| t.to_string()).collect();
                write!(f, "lfsr:r={degree},taps={},seed={seed}", taps.join("+"))?
            }
            Family::File { path } => write!(f, "file:path={}", path.display())?,
        }
        if let Some(poly) = &self.subsequence {
            write!(f, "@poly={poly}")?;
        }
        Ok(())
    }
}

impl FromStr for SeqSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_seqspec(s)
    }
}

/// Parameters with the byte offset of each value.
struct Params {
    family: &'static str,
    map: BTreeMap<String, (usize, String)>,
}

impl Params {
    fn take(&mut self, key: &'static str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &'static str) -> Result<(usize, String), SpecError> {
        self.take(key).ok_or(SpecError::MissingParameter {
            family: self.family,
            key,
        })
    }

    fn finish(self) -> Result<(), SpecError> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, _)) => Err(invalid(
                &key,
                format!("not a parameter of '{}'", self.family),
            )),
        }
    }
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T, SpecError> {
    value
        .parse()
        .map_err(|_| invalid(key, format!("'{value}' is not a non-negative integer")))
}

pub fn parse_seqspec(text: &str) -> Result<SeqSpec, SpecError> {
    let (head, poly) = match text.find('@') {
        Some(at) => {
            let rest = &text[at + 1..];
            let Some(expr) = rest.strip_prefix("poly=") else {
                return Err(parse_err(at + 1, "expected 'poly=' after '@'"));
            };
            (&text[..at], Some((at + 6, expr)))
        }
        None => (text, None),
    };
    let (name, params_text) = match head.find(':') {
        Some(colon) => (&head[..colon], Some((colon + 1, &head[colon + 1..]))),
        None => (head, None),
    };
    let family_name: &'static str = match name {
        "zero" => "zero",
        "ones" => "ones",
        "thue-morse" => "thue-morse",
        "pattern" => "pattern",
        "rudin-shapiro" => "rudin-shapiro",
        "zeckendorf" => "zeckendorf",
        "legendre" => "legendre",
        "ell" => "ell",
        "lfsr" => "lfsr",
        "file" => "file",
        "" => return Err(parse_err(0, "missing sequence name")),
        other => return Err(parse_err(0, format!("unknown sequence family '{other}'"))),
    };
    let mut params = Params {
        family: family_name,
        map: BTreeMap::new(),
    };
    if let Some((start, body)) = params_text {
        let mut offset = start;
        for item in body.split(',') {
            let Some(eq) = item.find('=') else {
                return Err(parse_err(offset, format!("expected key=value, found '{item}'")));
            };
            let (key, value) = (&item[..eq], &item[eq + 1..]);
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(parse_err(offset, format!("invalid key '{key}'")));
            }
            if value.is_empty() {
                return Err(parse_err(offset + eq + 1, format!("empty value for '{key}'")));
            }
            if params
                .map
                .insert(key.to_string(), (offset + eq + 1, value.to_string()))
                .is_some()
            {
                return Err(parse_err(offset, format!("duplicate key '{key}'")));
            }
            offset += item.len() + 1;
        }
    }

    let family = match family_name {
        "zero" => Family::Zero,
        "ones" => Family::Ones,
        "thue-morse" => Family::Pattern { k: 1 },
        "rudin-shapiro" => Family::Pattern { k: 2 },
        "zeckendorf" => Family::Zeckendorf,
        "pattern" => {
            let (_, v) = params.require("k")?;
            let k: u32 = parse_number("k", &v)?;
            if !(1..=64).contains(&k) {
                return Err(invalid("k", "pattern length must be in 1..=64"));
            }
            Family::Pattern { k }
        }
        "legendre" => {
            let (_, v) = params.require("p")?;
            let p: u64 = parse_number("p", &v)?;
            if p < 3 || !crate::numtheory::is_prime_u64(p) {
                return Err(invalid("p", format!("{p} is not an odd prime")));
            }
            let f = match params.take("f") {
                Some((pos, expr)) => parse_poly_at(&expr, pos)?,
                None => PolySpec::identity(),
            };
            if f.is_zero_mod(p) {
                return Err(invalid("f", format!("{f} vanishes modulo {p}")));
            }
            Family::Legendre { p, f }
        }
        "ell" => {
            let (_, qv) = params.require("q")?;
            let (_, av) = params.require("A")?;
            let q: BigUint = parse_number("q", &qv)?;
            let a: BigUint = parse_number("A", &av)?;
            if q.is_even() || q < BigUint::from(3u32) {
                return Err(invalid("q", format!("{q} must be odd and at least 3")));
            }
            if a.is_zero() || a >= q {
                return Err(invalid("A", format!("{a} must lie strictly between 0 and q")));
            }
            if !a.gcd(&q).is_one() {
                return Err(invalid("A", format!("{a} is not coprime to {q}")));
            }
            Family::Ell { q, a }
        }
        "lfsr" => {
            let (_, rv) = params.require("r")?;
            let degree: usize = parse_number("r", &rv)?;
            if degree == 0 {
                return Err(invalid("r", "degree must be positive"));
            }
            let (_, tv) = params.require("taps")?;
            let mut taps = Vec::new();
            for t in tv.split('+') {
                let t: usize = parse_number("taps", t)?;
                if t >= degree {
                    return Err(invalid("taps", format!("tap {t} must be below r={degree}")));
                }
                taps.push(t);
            }
            taps.sort_unstable();
            taps.dedup();
            let seed = match params.take("seed") {
                Some((_, sv)) => {
                    if sv.len() != degree || !sv.bytes().all(|b| b == b'0' || b == b'1') {
                        return Err(invalid("seed", format!("expected {degree} bits, found '{sv}'")));
                    }
                    sv.bytes().map(|b| b == b'1').collect()
                }
                None => (0..degree).map(|i| i == 0).collect(),
            };
            if Word::is_zero(&seed) {
                return Err(invalid("seed", "seed is all zero"));
            }
            Family::Lfsr { degree, taps, seed }
        }
        "file" => {
            let (_, path) = params.require("path")?;
            Family::File { path: path.into() }
        }
        _ => unreachable!(),
    };
    params.finish()?;
    let subsequence = poly.map(|(pos, expr)| parse_poly_at(expr, pos)).transpose()?;
    Ok(SeqSpec {
        family,
        subsequence,
    })
}

/// Parses an integer polynomial in `n` such as `n^3+2*n` or `3n^2-n+1`.
pub fn parse_poly(text: &str) -> Result<PolySpec, SpecError> {
    parse_poly_at(text, 0)
}

fn parse_poly_at(text: &str, base: usize) -> Result<PolySpec, SpecError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut coeffs = vec![0i64; 1];
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos] == b' ' {
            *pos += 1;
        }
    };
    let number = |pos: &mut usize| -> Result<Option<i64>, SpecError> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Ok(None);
        }
        text[start..*pos]
            .parse()
            .map(Some)
            .map_err(|_| parse_err(base + start, "integer too large"))
    };
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        let mut sign = 1i64;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            sign = if bytes[pos] == b'-' { -1 } else { 1 };
            pos += 1;
            skip_ws(&mut pos);
        } else if !first {
            return Err(parse_err(base + pos, "expected '+' or '-'"));
        }
        first = false;
        let term_start = pos;
        let coefficient = number(&mut pos)?;
        skip_ws(&mut pos);
        let mut degree = 0usize;
        let has_star = pos < bytes.len() && bytes[pos] == b'*';
        if has_star {
            pos += 1;
            skip_ws(&mut pos);
        }
        if pos < bytes.len() && bytes[pos] == b'n' {
            pos += 1;
            degree = 1;
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                skip_ws(&mut pos);
                let exp_pos = pos;
                let e = number(&mut pos)?
                    .ok_or_else(|| parse_err(base + exp_pos, "expected exponent"))?;
                degree = e as usize;
            }
        } else if has_star || coefficient.is_none() {
            return Err(parse_err(base + pos, "expected 'n' or an integer"));
        }
        if degree > MAX_POLY_DEGREE {
            return Err(parse_err(
                base + term_start,
                format!("degree above {MAX_POLY_DEGREE}"),
            ));
        }
        if coeffs.len() <= degree {
            coeffs.resize(degree + 1, 0);
        }
        let c = coefficient
            .unwrap_or(1)
            .checked_mul(sign)
            .and_then(|c| coeffs[degree].checked_add(c))
            .ok_or_else(|| parse_err(base + term_start, "coefficient overflow"))?;
        coeffs[degree] = c;
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
    }
    PolySpec::new(coeffs).map_err(|_| parse_err(base, "polynomial is identically zero"))
}

impl FromStr for PolySpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{rudin_shapiro_word, thue_morse_word};

    #[test]
    fn documented_examples() {
        let s = parse_seqspec("ell:q=31,A=3").unwrap();
        assert_eq!(
            s.family,
            Family::Ell {
                q: 31u32.into(),
                a: 3u32.into()
            }
        );
        assert_eq!(
            parse_seqspec("pattern:k=2").unwrap(),
            parse_seqspec("rudin-shapiro").unwrap()
        );
        assert!(matches!(
            parse_seqspec("ell:q=10,A=3"),
            Err(SpecError::InvalidParameter { key, .. }) if key == "q"
        ));
        let l = parse_seqspec("legendre:p=101,f=n").unwrap();
        assert_eq!(
            l.family,
            Family::Legendre {
                p: 101,
                f: PolySpec::identity()
            }
        );
        let tm = parse_seqspec("thue-morse@poly=n^2").unwrap();
        assert_eq!(tm.subsequence, Some(PolySpec::monomial(2)));
        assert_eq!(tm.word(5).unwrap().to_string(), "01101");
        assert_eq!(parse_seqspec("ell:q=19,A=1").unwrap().to_string(), "ell:q=19,A=1");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_seqspec("bogus:k=1") {
            Err(SpecError::Parse { pos: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_seqspec("pattern:k") {
            Err(SpecError::Parse { pos: 8, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_seqspec("thue-morse@poly=n^2+*") {
            Err(SpecError::Parse { pos, .. }) => assert_eq!(pos, 21),
            other => panic!("{other:?}"),
        }
        match parse_seqspec("thue-morse@deg=2") {
            Err(SpecError::Parse { pos: 11, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_seqspec("ell:q=31"),
            Err(SpecError::MissingParameter { key: "A", .. })
        ));
        assert!(matches!(
            parse_seqspec("ell:q=31,A=3,x=1"),
            Err(SpecError::InvalidParameter { key, .. }) if key == "x"
        ));
        assert!(matches!(
            parse_seqspec("ell:q=33,A=3"),
            Err(SpecError::InvalidParameter { key, .. }) if key == "A"
        ));
        assert!(matches!(
            parse_seqspec("legendre:p=9"),
            Err(SpecError::InvalidParameter { key, .. }) if key == "p"
        ));
        assert!(matches!(
            parse_seqspec("lfsr:r=4,taps=0+1,seed=0000"),
            Err(SpecError::InvalidParameter { key, .. }) if key == "seed"
        ));
    }

    #[test]
    fn polynomials() {
        assert_eq!(parse_poly("n^3+2*n").unwrap().coefficients(), &[0, 2, 0, 1]);
        assert_eq!(parse_poly("3n^2 - n + 1").unwrap().coefficients(), &[1, -1, 3]);
        assert_eq!(parse_poly("-n+7").unwrap().coefficients(), &[7, -1]);
        assert_eq!(parse_poly("n-1").unwrap().to_string(), "n-1");
        assert!(parse_poly("n-n").is_err());
        assert!(parse_poly("n^").is_err());
        assert!(parse_poly("").is_err());
        for text in ["n^2", "n^3+2*n", "5*n^4-3*n+2", "n-1"] {
            let p = parse_poly(text).unwrap();
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn words_match_generators() {
        assert_eq!(parse_seqspec("thue-morse").unwrap().word(300).unwrap(), thue_morse_word(300));
        assert_eq!(
            parse_seqspec("pattern:k=2").unwrap().word(300).unwrap(),
            rudin_shapiro_word(300)
        );
        assert_eq!(parse_seqspec("ones").unwrap().word(4).unwrap().to_string(), "1111");
        assert_eq!(parse_seqspec("legendre:p=5").unwrap().word(5).unwrap().to_string(), "01001");
        let ell = parse_seqspec("ell:q=31,A=5").unwrap();
        assert_eq!(ell.word(7).unwrap().to_string(), "1010010");
        let lfsr = parse_seqspec("lfsr:r=4,taps=0+1,seed=1000").unwrap();
        assert_eq!(lfsr.period().unwrap().unwrap().len(), 15);
        assert_eq!(lfsr.word(2).unwrap().len(), 2);
        assert_eq!(
            parse_seqspec("lfsr:r=4,taps=0+1").unwrap(),
            lfsr
        );
        assert!(parse_seqspec("zeckendorf").unwrap().period().unwrap().is_none());
    }

    #[test]
    fn periodic_subsequence() {
        // (11000) along n^2: indices 0,1,4,9=4,16=1 mod 5
        let s = parse_seqspec("ell:q=31,A=3@poly=n^2").unwrap();
        assert_eq!(s.word(10).unwrap().to_string(), "1100111001");
        let p = s.period().unwrap().unwrap();
        assert_eq!(p.period().to_string(), "11001");
        for n in 0..40 {
            assert_eq!(p.bit(n), s.word(40).unwrap().get(n));
        }
        assert!(matches!(
            parse_seqspec("thue-morse@poly=n-1").unwrap().word(3),
            Err(SpecError::Generation(GenError::NegativeValue(0)))
        ));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "zero",
            "ones",
            "thue-morse",
            "rudin-shapiro",
            "pattern:k=3",
            "zeckendorf@poly=n^2",
            "legendre:p=101,f=n^3+2*n",
            "ell:q=217,A=5",
            "lfsr:r=4,taps=0+1,seed=1000",
            "file:path=bits.txt",
        ] {
            let s = parse_seqspec(text).unwrap();
            assert_eq!(s.to_string(), text);
            assert_eq!(parse_seqspec(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn file_family() {
        let dir = std::env::temp_dir().join(format!("seqspec-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.txt");
        std::fs::write(&path, "0100\n1\n").unwrap();
        let s = parse_seqspec(&format!("file:path={}", path.display())).unwrap();
        assert_eq!(s.word(5).unwrap().to_string(), "01001");
        assert!(matches!(s.word(6), Err(SpecError::FileTooShort { available: 5, .. })));
        assert_eq!(s.period().unwrap().unwrap().period().to_string(), "01001");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
