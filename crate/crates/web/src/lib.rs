//! Browser bindings for seqlab. Each exported function takes plain strings
//! and numbers and returns a JSON document.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use seqlab::adic::{adic_profile, connection, phi2, phi2_symmetric};
use seqlab::maxorder::{coset, moc_periodic, moc_profile};
use seqlab::measures::linear_profile;
use seqlab::numtheory;
use seqlab::seqspec::parse_seqspec;
use seqlab::BigUint;

/// Longest prefix the profile view will analyse.
pub const MAX_PROFILE_LEN: usize = 2000;
/// Largest modulus accepted by the residue sweep.
pub const MAX_SWEEP_MODULUS: u64 = 4099;

#[derive(Debug, Serialize)]
pub struct Profiles {
    pub seq: String,
    pub n: usize,
    pub bits: String,
    pub moc: Vec<usize>,
    pub log2_mu: Vec<f64>,
    pub linear: Vec<usize>,
}

pub fn profiles_of(seq: &str, n: usize) -> Result<Profiles, String> {
    if n == 0 || n > MAX_PROFILE_LEN {
        return Err(format!("length must be in 1..={MAX_PROFILE_LEN}"));
    }
    let spec = parse_seqspec(seq).map_err(|e| e.to_string())?;
    let w = spec.word(n).map_err(|e| e.to_string())?;
    Ok(Profiles {
        seq: spec.to_string(),
        n,
        bits: w.to_string(),
        moc: moc_profile(&w).into_values(),
        log2_mu: adic_profile(&w).values().iter().map(numtheory::log2).collect(),
        linear: linear_profile(&w).into_values(),
    })
}

#[derive(Debug, Serialize)]
pub struct PeriodicSummary {
    pub seq: String,
    pub period: String,
    pub t: usize,
    pub a: String,
    pub q: String,
    pub phi2: f64,
    pub phi2_symmetric: f64,
    pub m: usize,
    pub l: usize,
}

pub fn periodic_of(seq: &str) -> Result<PeriodicSummary, String> {
    let spec = parse_seqspec(seq).map_err(|e| e.to_string())?;
    let s = spec
        .period()
        .map_err(|e| e.to_string())?
        .ok_or_else(|| format!("{spec} is not periodic"))?;
    let rep = connection(&s);
    let t = s.len();
    let l = *linear_profile(&s.unroll(2 * t)).last().expect("t >= 1");
    Ok(PeriodicSummary {
        seq: spec.to_string(),
        period: s.period().to_string(),
        t,
        a: rep.a.to_string(),
        q: rep.q.to_string(),
        phi2: phi2(&s).log2(),
        phi2_symmetric: phi2_symmetric(&s).log2(),
        m: moc_periodic(&s),
        l,
    })
}

#[derive(Debug, Serialize)]
pub struct CosetRow {
    pub a: u64,
    pub t: usize,
    pub m: usize,
}

#[derive(Debug, Serialize)]
pub struct Sweep {
    pub q: u64,
    pub ceil_log2: u64,
    pub rows: Vec<CosetRow>,
}

/// `M` for every residue `A` coprime to `q`, one row per residue.
pub fn sweep_of(q: u64) -> Result<Sweep, String> {
    if q < 3 || q.is_multiple_of(2) || q > MAX_SWEEP_MODULUS {
        return Err(format!("q must be odd and in 3..={MAX_SWEEP_MODULUS}"));
    }
    let big_q = BigUint::from(q);
    let mut rows = Vec::new();
    for a in 1..q {
        let Ok(d) = coset(&BigUint::from(a), &big_q) else {
            continue;
        };
        let m = if d.len() < 2 { 0 } else { d.distinct_modulus_bits() };
        rows.push(CosetRow { a, t: d.len(), m });
    }
    Ok(Sweep {
        q,
        ceil_log2: numtheory::ceil_log2(&big_q),
        rows,
    })
}

fn to_js<T: Serialize>(result: Result<T, String>) -> Result<String, JsValue> {
    result
        .map(|v| serde_json::to_string(&v).expect("serializable"))
        .map_err(|e| JsValue::from_str(&e))
}

/// Maximum-order, 2-adic and linear complexity profiles of a prefix.
#[wasm_bindgen]
pub fn profiles(seq: &str, n: usize) -> Result<String, JsValue> {
    to_js(profiles_of(seq, n))
}

/// Period, rational representation and complexities of a periodic sequence.
#[wasm_bindgen]
pub fn periodic_report(seq: &str) -> Result<String, JsValue> {
    to_js(periodic_of(seq))
}

#[wasm_bindgen]
pub fn residue_sweep(q: u32) -> Result<String, JsValue> {
    to_js(sweep_of(q as u64))
}
