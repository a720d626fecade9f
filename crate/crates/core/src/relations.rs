//! Verifiers for the relations between the complexity measures, table
//! reproduction and the 2-adic conjecture scan.
//!
//! Every verifier returns a [`VerificationReport`]. A failing report always
//! carries the offending instance in its evidence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::adic::{adic_min, adic_profile, connection};
use crate::generators::{fcsr_word, lfsr_period};
use crate::maxorder::{moc_ell_formula, moc_from_coset, moc_periodic, moc_profile};
use crate::measures::{correlation2, linear_profile};
use crate::numtheory::{self, ceil_log2, floor_log2};
use crate::seqcore::{PeriodicSequence, Word};
use crate::seqspec::SeqSpec;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub instance: String,
    pub status: Status,
    /// Present for skipped reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub evidence: BTreeMap<String, String>,
}

impl VerificationReport {
    fn new(claim_id: &str, instance: impl Into<String>) -> Self {
        VerificationReport {
            claim_id: claim_id.to_string(),
            instance: instance.into(),
            status: Status::Pass,
            reason: None,
            evidence: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.evidence.insert(key.to_string(), value.to_string());
        self
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.evidence.insert(key.to_string(), value.to_string());
    }

    fn skipped(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.reason = Some(reason.into());
        self
    }

    fn fail_if(mut self, failed: bool) -> Self {
        if failed {
            self.status = Status::Fail;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// `status` column text: `pass`, `fail` or `skipped(reason)`.
    pub fn status_text(&self) -> String {
        match (&self.status, &self.reason) {
            (Status::Skipped, Some(r)) => format!("skipped({r})"),
            (s, _) => s.to_string(),
        }
    }

    /// Evidence as `key=value` pairs joined by `;` in key order.
    pub fn evidence_text(&self) -> String {
        self.evidence
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Column layout line for report CSV output.
pub const REPORT_CSV_HEADER: &str = "# seqlab report v1: claim_id,instance,status,evidence";

pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["claim_id", "instance", "status", "evidence"])
        .expect("in-memory write");
    for r in reports {
        wtr.write_record([
            r.claim_id.as_str(),
            r.instance.as_str(),
            &r.status_text(),
            &r.evidence_text(),
        ])
        .expect("in-memory write");
    }
    let body = String::from_utf8(wtr.into_inner().expect("flush")).expect("utf-8");
    format!("{REPORT_CSV_HEADER}\n{body}")
}

pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// All words of length `t` whose least period is exactly `t`.
pub fn primitive_periods(t: usize) -> impl Iterator<Item = PeriodicSequence> {
    assert!((1..64).contains(&t));
    (0..(1u64 << t)).filter_map(move |v| {
        let s = PeriodicSequence::least(Word::from_u64(v, t)).expect("t >= 1");
        (s.len() == t).then_some(s)
    })
}

fn period_label(s: &PeriodicSequence) -> String {
    format!("period={}", s.period())
}

/// `M(S,N) <= ceil(log2 mu(N)) + 1` for every prefix length `N`.
pub fn verify_thm1(w: &Word) -> VerificationReport {
    let moc = moc_profile(w);
    let mu = adic_profile(w);
    let mut report = VerificationReport::new("thm1", format!("len={}", w.len()));
    let mut min_slack: Option<i64> = None;
    for n in 1..=w.len() {
        let m = *moc.at(n) as i64;
        let c = ceil_log2(mu.at(n)) as i64;
        let slack = c + 1 - m;
        if min_slack.is_none_or(|s| slack < s) {
            min_slack = Some(slack);
        }
        if slack < 0 {
            report.set("counterexample_n", n);
            report.set("M", m);
            report.set("mu", mu.at(n));
            report.set("word", w.prefix(n));
            return report.fail_if(true);
        }
    }
    report.with("min_slack", min_slack.unwrap_or(0))
}

/// `M(S) <= ceil(log2 q)` for the connection integer `q`.
pub fn verify_thm2(s: &PeriodicSequence) -> VerificationReport {
    let m = moc_periodic(s) as u64;
    let q = connection(s).q;
    let c = ceil_log2(&q);
    VerificationReport::new("thm2", period_label(s))
        .with("M", m)
        .with("q", &q)
        .with("ceil_log2_q", c)
        .fail_if(m > c)
}

/// Runs `check` on every primitive period of length `1..=t_max` (or
/// `t_min..=t_max`) and folds the results into one report.
fn exhaustive<F>(claim: &str, t_min: usize, t_max: usize, check: F) -> VerificationReport
where
    F: Fn(&PeriodicSequence) -> VerificationReport,
{
    let mut report = VerificationReport::new(claim, format!("T={t_min}..={t_max},exhaustive"));
    let mut checked = 0u64;
    for t in t_min..=t_max {
        for s in primitive_periods(t) {
            let r = check(&s);
            checked += 1;
            if r.failed() {
                report.set("checked", checked);
                report.set("counterexample", period_label(&s));
                for (k, v) in r.evidence {
                    report.set(&format!("counterexample.{k}"), v);
                }
                return report.fail_if(true);
            }
        }
    }
    report.with("checked", checked)
}

pub fn thm2_suite(t_max: usize) -> VerificationReport {
    exhaustive("thm2", 1, t_max, verify_thm2)
}

/// `mu(N) = q` for `N` in `2T+1..=2T+3`; `mu(2T)` is reported to show a
/// possible strict gap below.
pub fn verify_lemma1(s: &PeriodicSequence) -> VerificationReport {
    let t = s.len();
    let q = connection(s).q;
    let w = s.unroll(2 * t + 3);
    let mut report = VerificationReport::new("lemma1", period_label(s)).with("q", &q);
    let mut failed = false;
    for n in 2 * t + 1..=2 * t + 3 {
        let mu = adic_min(&w, n).mu;
        if mu != q {
            failed = true;
            report.set("counterexample_n", n);
            report.set(&format!("mu({n})"), &mu);
            break;
        }
        report.set(&format!("mu({n})"), &mu);
    }
    let before = adic_min(&w, 2 * t);
    report.set(&format!("mu({})", 2 * t), &before.mu);
    report.set("gap_at_2T", before.mu < q);
    report.set("witness_2T", format!("({},{})", before.f, before.q));
    report.fail_if(failed)
}

pub fn lemma1_suite(t_max: usize) -> VerificationReport {
    exhaustive("lemma1", 1, t_max, verify_lemma1)
}

/// `ceil(log2 mu(N)) >= log2(N + 1 - C_2(S,N)) - 1` at `N = len`, checked as
/// `2^(ceil(log2 mu) + 1) >= N + 1 - C_2`.
pub fn verify_cor1(w: &Word) -> VerificationReport {
    let n = w.len();
    let report = VerificationReport::new("cor1", format!("len={n}"));
    let Ok((c2, witness)) = correlation2(w) else {
        return report.skipped("length below 2");
    };
    let mu = adic_min(w, n).mu;
    let c = ceil_log2(&mu);
    let rhs = n as u64 + 1 - c2;
    let lhs = BigUint::one() << (c + 1);
    report
        .with("C2", c2)
        .with("C2_witness", format!("U={},D={:?}", witness.u, witness.offsets))
        .with("mu", &mu)
        .with("ceil_log2_mu", c)
        .with("N+1-C2", rhs)
        .fail_if(lhs < BigUint::from(rhs))
}

/// For every `A` coprime to `q`, the coset characterization of `M(S)` agrees
/// with the directly computed value.
pub fn verify_thm4(q: u64) -> VerificationReport {
    let report = VerificationReport::new("thm4", format!("q={q}"));
    if q < 3 || q.is_multiple_of(2) {
        return report.skipped("q must be odd and at least 3");
    }
    let qb = BigUint::from(q);
    let mut values = BTreeSet::new();
    let mut count = 0u64;
    let mut period = 0usize;
    for a in 1..q {
        if a.gcd(&q) != 1 {
            continue;
        }
        let ab = BigUint::from(a);
        let s = fcsr_word(&ab, &qb).expect("validated");
        period = s.len();
        let direct = moc_periodic(&s);
        let via_coset = moc_from_coset(&ab, &qb).expect("validated");
        count += 1;
        values.insert(direct);
        if direct != via_coset {
            return report
                .with("counterexample_A", a)
                .with("M_direct", direct)
                .with("M_coset", via_coset)
                .with("period", s.period())
                .fail_if(true);
        }
    }
    report
        .with("T", period)
        .with("coprime_A", count)
        .with("M_values", set_text(&values))
}

pub fn thm4_suite(q_max: u64) -> VerificationReport {
    let mut report = VerificationReport::new("thm4", format!("odd q=3..={q_max}"));
    let mut checked = 0u64;
    for q in (3..=q_max).step_by(2) {
        let r = verify_thm4(q);
        checked += 1;
        if r.failed() {
            report.set("counterexample_q", q);
            for (k, v) in r.evidence {
                report.set(&format!("counterexample.{k}"), v);
            }
            return report.fail_if(true);
        }
    }
    report.with("moduli", checked)
}

/// `q` is an odd prime power with 2 primitive modulo `q`.
pub fn is_ell_modulus(q: u64) -> bool {
    let qb = BigUint::from(q);
    q >= 3
        && matches!(numtheory::is_odd_prime_power(&qb), Ok(Some(_)))
        && numtheory::is_two_primitive(&qb).unwrap_or(false)
}

/// `M` of the ℓ-sequence with connection integer `q` equals
/// `floor(log2 q)` for `q` in {3, 5, 9} and `ceil(log2 q)` otherwise.
pub fn verify_thm5(q: u64) -> VerificationReport {
    let report = VerificationReport::new("thm5", format!("q={q}"));
    if !is_ell_modulus(q) {
        return report.skipped("not an odd prime power with 2 primitive");
    }
    let qb = BigUint::from(q);
    let s = fcsr_word(&BigUint::one(), &qb).expect("q >= 3 odd");
    let m = moc_periodic(&s);
    let formula = moc_ell_formula(&qb).expect("ell modulus");
    report
        .with("T", s.len())
        .with("M", m)
        .with("formula", formula)
        .fail_if(m != formula)
}

pub fn thm5_suite(q_max: u64) -> VerificationReport {
    let mut report = VerificationReport::new("thm5", format!("ell moduli q<={q_max}"));
    let mut checked = 0u64;
    for q in (3..=q_max).step_by(2) {
        let r = verify_thm5(q);
        match r.status {
            Status::Skipped => continue,
            Status::Pass => checked += 1,
            Status::Fail => {
                report.set("counterexample_q", q);
                for (k, v) in r.evidence {
                    report.set(&format!("counterexample.{k}"), v);
                }
                return report.fail_if(true);
            }
        }
    }
    report.with("moduli", checked)
}

pub const LEMMA3_EXPECTED: [u64; 3] = [3, 5, 9];
pub const LEMMA3_MAX_K: u32 = 40;

/// The `q = 2^k + 1`, `k <= k_max`, that are ℓ-moduli; these must be exactly
/// {3, 5, 9}.
pub fn lemma3_scan(k_max: u32) -> VerificationReport {
    lemma3_scan_against(k_max, &LEMMA3_EXPECTED)
}

fn lemma3_scan_against(k_max: u32, expected: &[u64]) -> VerificationReport {
    let report = VerificationReport::new("lemma3", format!("k=1..={k_max}"));
    if k_max > LEMMA3_MAX_K {
        return report.skipped(format!("k_max above {LEMMA3_MAX_K}"));
    }
    let found: BTreeSet<u64> = (1..=k_max)
        .map(|k| (1u64 << k) + 1)
        .filter(|&q| is_ell_modulus(q))
        .collect();
    let expected: BTreeSet<u64> = expected.iter().copied().collect();
    let rejected: Vec<u64> = (1..=k_max)
        .map(|k| (1u64 << k) + 1)
        .filter(|&q| {
            !found.contains(&q)
                && matches!(numtheory::is_odd_prime_power(&BigUint::from(q)), Ok(Some(_)))
        })
        .collect();
    report
        .with("found", set_text(&found))
        .with("prime_powers_without_primitive_2", format!("{rejected:?}"))
        .fail_if(found != expected)
}

/// Every primitive period of length `t` with `M(S) = t - 1` has connection
/// integer `2^t - 1`. At `t = 8` the period (00100100) with `M = 6` and
/// `q = 85` is recorded as well.
pub fn verify_thm6(t: usize) -> VerificationReport {
    let report = VerificationReport::new("thm6", format!("T={t},exhaustive"));
    if !(2..=20).contains(&t) {
        return report.skipped("T must lie in 2..=20");
    }
    let full = (BigUint::one() << t) - 1u32;
    let mut maximal = 0u64;
    let mut checked = 0u64;
    for s in primitive_periods(t) {
        checked += 1;
        if moc_periodic(&s) != t - 1 {
            continue;
        }
        maximal += 1;
        let q = connection(&s).q;
        if q != full {
            return report
                .with("counterexample", period_label(&s))
                .with("q", &q)
                .fail_if(true);
        }
    }
    let mut report = report
        .with("checked", checked)
        .with("M=T-1", maximal);
    if t == 8 {
        let s = PeriodicSequence::new("00100100".parse().expect("literal")).expect("nonempty");
        let m = moc_periodic(&s);
        let q = connection(&s).q;
        report.set("T-2_example", period_label(&s));
        report.set("T-2_example.M", m);
        report.set("T-2_example.q", &q);
        let ok = m == t - 2 && q == BigUint::from(85u32);
        report = report.fail_if(!ok);
    }
    report
}

pub fn thm6_suite(t_max: usize) -> VerificationReport {
    let mut report = VerificationReport::new("thm6", format!("T=2..={t_max},exhaustive"));
    let mut maximal = 0u64;
    for t in 2..=t_max {
        let r = verify_thm6(t);
        if !r.passed() {
            report.set("counterexample_T", t);
            for (k, v) in r.evidence {
                report.set(&format!("counterexample.{k}"), v);
            }
            return report.fail_if(true);
        }
        maximal += r.evidence["M=T-1"].parse::<u64>().expect("count");
        if t == 8 {
            for (k, v) in r.evidence.iter().filter(|(k, _)| k.starts_with("T-2")) {
                report.set(k, v);
            }
        }
    }
    report.with("M=T-1", maximal)
}

/// Feedback taps `s_{n+r} = sum_{t in taps} s_{n+t}` of primitive
/// polynomials of degree `r`.
pub const MSEQUENCE_FIXTURES: [(usize, &[usize]); 8] = [
    (2, &[0, 1]),
    (3, &[0, 1]),
    (4, &[0, 1]),
    (5, &[0, 2]),
    (6, &[0, 1]),
    (7, &[0, 1]),
    (8, &[0, 2, 3, 4]),
    (10, &[0, 3]),
];

/// For an m-sequence of degree `r` and period `T = 2^r - 1`: linear complexity
/// `r` at `N = 2T` and connection integer `2^T - 1`.
pub fn verify_msequence(r: usize, taps: &[usize]) -> VerificationReport {
    let taps_text = taps.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+");
    let report = VerificationReport::new("msequence", format!("r={r},taps={taps_text}"));
    if r == 1 {
        return report.skipped("degree 1 gives the constant sequence");
    }
    if r > 16 {
        return report.skipped("degree above 16");
    }
    let seed: Word = (0..r).map(|i| i == 0).collect();
    let s = match lfsr_period(r, taps, &seed) {
        Ok(s) => s,
        Err(e) => return report.skipped(e.to_string()),
    };
    let t = s.len();
    let expected_t = (1usize << r) - 1;
    let l = *linear_profile(&s.unroll(2 * t)).last().expect("t >= 1");
    let q = connection(&s).q;
    let full = (BigUint::one() << t) - 1u32;
    let q_text = if q == full {
        format!("2^{t}-1")
    } else {
        q.to_string()
    };
    report
        .with("T", t)
        .with("L", l)
        .with("q", q_text)
        .fail_if(t != expected_t || l != r || q != full)
}

/// Chain `ceil(log2 mu(N)) >= M(S,N) - 1` and `M(S,N) > N / divisor` for
/// `n_min <= N <= len`, which together give `ceil(log2 mu(N)) > N/divisor - 1`.
/// The direct bound `ceil(log2 mu(N)) >= N/divisor` is reported, not asserted.
pub fn verify_lower_bound(
    claim: &str,
    w: &Word,
    divisor: u64,
    n_min: usize,
) -> VerificationReport {
    let moc = moc_profile(w);
    let report = VerificationReport::new(
        claim,
        format!("N={n_min}..={},M>N/{divisor}", w.len()),
    );
    let mut direct_failures = 0u64;
    for n in n_min..=w.len() {
        let mu = adic_min(w, n).mu;
        let c = ceil_log2(&mu);
        let m = *moc.at(n) as u64;
        if c + 1 < m || m * divisor <= n as u64 {
            return report
                .with("counterexample_n", n)
                .with("M", m)
                .with("mu", &mu)
                .with("ceil_log2_mu", c)
                .fail_if(true);
        }
        if c * divisor < n as u64 {
            direct_failures += 1;
        }
    }
    report.with("direct_bound_failures", direct_failures)
}

/// Thue-Morse, `6 <= N <= n_max`, divisor 5.
pub fn verify_thue_morse_bound(n_max: usize) -> VerificationReport {
    let w = crate::generators::thue_morse_word(n_max);
    verify_lower_bound("bound-thue-morse", &w, 5, 6)
}

/// Pattern sequence of order `k >= 2`, `2^(k+3) - 7 <= N <= n_max`, divisor 6.
pub fn verify_pattern_bound(k: u32, n_max: usize) -> VerificationReport {
    let w = crate::generators::pattern_word(k, n_max);
    let n_min = (1usize << (k + 3)) - 7;
    verify_lower_bound(&format!("bound-pattern-k{k}"), &w, 6, n_min)
}

fn set_text(values: &BTreeSet<impl fmt::Display>) -> String {
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// One expected table row: modulus, period, `ceil(log2 q)` and the set of
/// maximum-order complexities over the sequences considered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableExpectation {
    pub q: u64,
    pub t: u64,
    pub ceil_log2: u64,
    pub m: &'static [usize],
}

const fn row(q: u64, t: u64, ceil_log2: u64, m: &'static [usize]) -> TableExpectation {
    TableExpectation { q, t, ceil_log2, m }
}

/// ℓ-sequences (one `A` per modulus).
pub const TABLE1: [TableExpectation; 8] = [
    row(3, 2, 2, &[1]),
    row(9, 6, 4, &[3]),
    row(27, 18, 5, &[5]),
    row(5, 4, 3, &[2]),
    row(625, 500, 10, &[10]),
    row(19, 18, 5, &[5]),
    row(361, 342, 9, &[9]),
    row(6859, 6498, 13, &[13]),
];

/// Non-ℓ moduli; `m` is the set over all `A` coprime to `q`.
pub const TABLE2: [TableExpectation; 5] = [
    row(51, 8, 6, &[4, 5]),
    row(63, 6, 6, &[3, 4, 5]),
    row(65, 12, 7, &[4, 6]),
    row(93, 10, 7, &[4, 5, 6]),
    row(217, 15, 8, &[5, 6, 7, 8]),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub q: u64,
    pub t: u64,
    pub ceil_log2: u64,
    pub m: BTreeSet<usize>,
    /// `M = floor(log2 q)` for a single-valued row.
    pub floor_remark: bool,
    pub expected_t: u64,
    pub expected_ceil_log2: u64,
    pub expected_m: BTreeSet<usize>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub which: u8,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn mismatches(&self) -> Vec<&TableRow> {
        self.rows.iter().filter(|r| !r.matches).collect()
    }

    pub const CSV_HEADER: &'static str =
        "# seqlab table v1: q,T,ceil_log2_q,M,floor_remark,expected_T,expected_ceil_log2_q,expected_M,match";

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record([
            "q",
            "T",
            "ceil_log2_q",
            "M",
            "floor_remark",
            "expected_T",
            "expected_ceil_log2_q",
            "expected_M",
            "match",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            wtr.write_record([
                r.q.to_string(),
                r.t.to_string(),
                r.ceil_log2.to_string(),
                set_text(&r.m),
                r.floor_remark.to_string(),
                r.expected_t.to_string(),
                r.expected_ceil_log2.to_string(),
                set_text(&r.expected_m),
                r.matches.to_string(),
            ])
            .expect("in-memory write");
        }
        let body = String::from_utf8(wtr.into_inner().expect("flush")).expect("utf-8");
        format!("{}\n{body}", Self::CSV_HEADER)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// One verification report per row, for uniform reporting.
    pub fn reports(&self) -> Vec<VerificationReport> {
        self.rows
            .iter()
            .map(|r| {
                VerificationReport::new(&format!("table{}", self.which), format!("q={}", r.q))
                    .with("T", r.t)
                    .with("ceil_log2_q", r.ceil_log2)
                    .with("M", set_text(&r.m))
                    .with("expected", format!(
                        "T={},ceil_log2_q={},M={}",
                        r.expected_t,
                        r.expected_ceil_log2,
                        set_text(&r.expected_m)
                    ))
                    .fail_if(!r.matches)
            })
            .collect()
    }
}

/// Recomputes table 1 (`which = 1`) or table 2 (`which = 2`).
pub fn reproduce_table(which: u8) -> Option<TableReport> {
    match which {
        1 => Some(reproduce_rows(1, &TABLE1, false)),
        2 => Some(reproduce_rows(2, &TABLE2, true)),
        _ => None,
    }
}

/// Recomputes rows against arbitrary expectations. With `all_a` the value set
/// runs over every `A` coprime to `q`; otherwise `A = 1` alone.
pub fn reproduce_rows(which: u8, expected: &[TableExpectation], all_a: bool) -> TableReport {
    let rows = expected
        .iter()
        .map(|e| {
            let q = BigUint::from(e.q);
            let a_values: Vec<u64> = if all_a {
                (1..e.q).filter(|a| a.gcd(&e.q) == 1).collect()
            } else {
                vec![1]
            };
            let mut m = BTreeSet::new();
            let mut t = 0u64;
            for a in a_values {
                let s = fcsr_word(&BigUint::from(a), &q).expect("coprime");
                t = s.len() as u64;
                m.insert(moc_periodic(&s));
            }
            let ceil = ceil_log2(&q);
            let floor = floor_log2(&q);
            let floor_remark = m.len() == 1 && m.iter().all(|&v| v as u64 == floor && floor != ceil);
            let expected_m: BTreeSet<usize> = e.m.iter().copied().collect();
            let matches = t == e.t && ceil == e.ceil_log2 && m == expected_m;
            TableRow {
                q: e.q,
                t,
                ceil_log2: ceil,
                m,
                floor_remark,
                expected_t: e.t,
                expected_ceil_log2: e.ceil_log2,
                expected_m,
                matches,
            }
        })
        .collect();
    TableReport { which, rows }
}

pub const DEFAULT_SCAN_C: f64 = 8.0;
pub const DEFAULT_GRID_RATIO: f64 = 1.3;
/// Every `N` up to this value is on the scan grid.
pub const DENSE_GRID_LIMIT: usize = 64;

/// All `N` in `2..=min(64, n_max)`, then geometric steps of `ratio`, always
/// ending at `n_max`.
pub fn scan_grid(n_max: usize, ratio: f64) -> Vec<usize> {
    assert!(ratio > 1.0, "grid ratio must exceed 1");
    let mut grid: Vec<usize> = (2..=n_max.min(DENSE_GRID_LIMIT)).collect();
    let mut n = DENSE_GRID_LIMIT;
    loop {
        let next = ((n as f64) * ratio).ceil() as usize;
        n = next.max(n + 1);
        if n >= n_max {
            break;
        }
        grid.push(n);
    }
    if n_max > DENSE_GRID_LIMIT {
        grid.push(n_max);
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    #[serde(serialize_with = "crate::ser_display")]
    pub mu: BigUint,
    pub log2_mu: f64,
    pub target: f64,
    pub deviation: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub spec: String,
    pub n_max: usize,
    pub c: f64,
    pub grid_ratio: f64,
    /// Connection integer of the period for periodic families.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt")]
    pub q: Option<BigUint>,
    pub status: Status,
    pub rows: Vec<ScanRow>,
}

fn ser_opt<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.collect_str(q),
        None => s.serialize_none(),
    }
}

impl ScanReport {
    pub const CSV_HEADER: &'static str =
        "# seqlab scan v1: N,mu,log2_mu,target,deviation,within";

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["N", "mu", "log2_mu", "target", "deviation", "within"])
            .expect("in-memory write");
        for r in &self.rows {
            wtr.write_record([
                r.n.to_string(),
                r.mu.to_string(),
                format!("{:.6}", r.log2_mu),
                format!("{:.6}", r.target),
                format!("{:.6}", r.deviation),
                r.within.to_string(),
            ])
            .expect("in-memory write");
        }
        let body = String::from_utf8(wtr.into_inner().expect("flush")).expect("utf-8");
        format!("{}\n{body}", Self::CSV_HEADER)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan serializes")
    }

    pub fn max_abs_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max)
    }
}

/// Compares `log2 mu(N)` with `N/2` on the scan grid; for Legendre sequences
/// the target is `min{N/2, log2 q}` with `q` the connection integer of the
/// period. Passes iff every deviation is at most `c * log2 N`.
pub fn conjecture_scan(
    spec: &SeqSpec,
    n_max: usize,
    c: f64,
    grid_ratio: f64,
) -> Result<ScanReport, crate::seqspec::SpecError> {
    let w = spec.word(n_max)?;
    let q = spec.period()?.map(|p| connection(&p).q);
    let capped = matches!(spec.family, crate::seqspec::Family::Legendre { .. });
    let log2_q = q.as_ref().filter(|_| capped).map(numtheory::log2);
    let rows: Vec<ScanRow> = scan_grid(n_max, grid_ratio)
        .into_iter()
        .map(|n| {
            let mu = adic_min(&w, n).mu;
            let log2_mu = numtheory::log2(&mu);
            let half = n as f64 / 2.0;
            let target = log2_q.map_or(half, |l| l.min(half));
            let deviation = log2_mu - target;
            let within = deviation.abs() <= c * (n as f64).log2();
            ScanRow {
                n,
                mu,
                log2_mu,
                target,
                deviation,
                within,
            }
        })
        .collect();
    let status = if rows.iter().all(|r| r.within) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(ScanReport {
        spec: spec.to_string(),
        n_max,
        c,
        grid_ratio,
        q,
        status,
        rows,
    })
}

/// Claim identifiers accepted by [`run_claim`], in output order.
pub const CLAIM_IDS: [&str; 13] = [
    "thm1",
    "thm2",
    "lemma1",
    "cor1",
    "thm4",
    "thm5",
    "lemma3",
    "thm6",
    "msequence",
    "bound-thue-morse",
    "bound-pattern",
    "table1",
    "table2",
];

/// Parameters of a verification run. The defaults are the full desk-scale
/// ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Overrides the exhaustive period bound of `thm2`, `lemma1` and `thm6`.
    pub exhaustive_t: Option<usize>,
    pub seed: u64,
    pub random_words: usize,
    pub thm4_q_max: u64,
    pub thm5_q_max: u64,
    pub lemma3_k_max: u32,
    pub bound_n_max: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            exhaustive_t: None,
            seed: 1,
            random_words: 100,
            thm4_q_max: 1000,
            thm5_q_max: 10_000,
            lemma3_k_max: 30,
            bound_n_max: 2000,
        }
    }
}

/// `count` words of length `len` from a ChaCha8 stream seeded with `seed`.
pub fn random_words(seed: u64, count: usize, len: usize) -> Vec<Word> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..len).map(|_| rng.gen::<bool>()).collect())
        .collect()
}

/// Folds per-word reports into one, keeping the first failure.
fn fold_words(claim: &str, instance: String, reports: Vec<VerificationReport>) -> VerificationReport {
    let mut out = VerificationReport::new(claim, instance);
    let total = reports.len();
    for (i, r) in reports.into_iter().enumerate() {
        if r.failed() {
            out.set("counterexample_index", i);
            for (k, v) in r.evidence {
                out.set(&format!("counterexample.{k}"), v);
            }
            return out.fail_if(true);
        }
    }
    out.with("words", total)
}

/// Runs one claim; `None` for an unknown id.
pub fn run_claim(id: &str, opts: &VerifyOptions) -> Option<Vec<VerificationReport>> {
    let t_or = |default: usize| opts.exhaustive_t.unwrap_or(default);
    let reports = match id {
        "thm1" => {
            let words = random_words(opts.seed, opts.random_words, 128);
            vec![
                fold_words(
                    "thm1",
                    format!("random,count={},len=128,seed={}", opts.random_words, opts.seed),
                    words.iter().map(verify_thm1).collect(),
                ),
                VerificationReport {
                    instance: "thue-morse,len=256".into(),
                    ..verify_thm1(&crate::generators::thue_morse_word(256))
                },
            ]
        }
        "thm2" => vec![thm2_suite(t_or(10))],
        "lemma1" => vec![lemma1_suite(t_or(8))],
        "cor1" => {
            let legendre = crate::generators::legendre_word(
                101,
                &crate::generators::PolySpec::identity(),
                101,
            )
            .expect("101 is prime");
            let words = random_words(opts.seed.wrapping_add(1), opts.random_words, 128);
            vec![
                VerificationReport {
                    instance: "legendre:p=101,f=n,len=101".into(),
                    ..verify_cor1(&legendre)
                },
                VerificationReport {
                    instance: "zero,len=64".into(),
                    ..verify_cor1(&Word::zeros(64))
                },
                fold_words(
                    "cor1",
                    format!(
                        "random,count={},len=128,seed={}",
                        opts.random_words,
                        opts.seed.wrapping_add(1)
                    ),
                    words.iter().map(verify_cor1).collect(),
                ),
            ]
        }
        "thm4" => vec![thm4_suite(opts.thm4_q_max)],
        "thm5" => vec![thm5_suite(opts.thm5_q_max)],
        "lemma3" => vec![lemma3_scan(opts.lemma3_k_max)],
        "thm6" => vec![thm6_suite(t_or(12))],
        "msequence" => {
            let mut v: Vec<VerificationReport> = MSEQUENCE_FIXTURES
                .iter()
                .map(|(r, taps)| verify_msequence(*r, taps))
                .collect();
            v.push(verify_msequence(1, &[0]));
            v
        }
        "bound-thue-morse" => vec![verify_thue_morse_bound(opts.bound_n_max)],
        "bound-pattern" => vec![verify_pattern_bound(2, opts.bound_n_max)],
        "table1" => reproduce_table(1).expect("table 1").reports(),
        "table2" => reproduce_table(2).expect("table 2").reports(),
        _ => return None,
    };
    Some(reports)
}

/// Runs every claim in [`CLAIM_IDS`] concurrently; output order is the claim
/// order regardless of completion order.
pub fn run_all(opts: &VerifyOptions) -> Vec<VerificationReport> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = CLAIM_IDS
            .iter()
            .map(|id| scope.spawn(move || run_claim(id, opts).expect("known claim")))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("verifier thread"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::thue_morse_word;
    use crate::seqspec::parse_seqspec;

    fn periodic(s: &str) -> PeriodicSequence {
        PeriodicSequence::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn thm1_examples() {
        assert!(verify_thm1(&thue_morse_word(256)).passed());
        let r = verify_thm1(&Word::zeros(64));
        assert!(r.passed());
        assert_eq!(r.evidence["min_slack"], "1");
    }

    #[test]
    fn thm2_examples_and_suite() {
        let ell19 = fcsr_word(&BigUint::one(), &BigUint::from(19u32)).unwrap();
        let r = verify_thm2(&ell19);
        assert!(r.passed());
        assert_eq!((r.evidence["M"].as_str(), r.evidence["ceil_log2_q"].as_str()), ("5", "5"));
        assert!(verify_thm2(&periodic("1")).passed());
        let suite = thm2_suite(8);
        assert!(suite.passed(), "{suite:?}");
        let expected: usize = (1..=8).map(|t| primitive_periods(t).count()).sum();
        assert_eq!(suite.evidence["checked"], expected.to_string());
    }

    #[test]
    fn primitive_period_counts() {
        // Necklace-free words: 2, 2, 6, 12, 30, 54
        let counts: Vec<usize> = (1..=6).map(|t| primitive_periods(t).count()).collect();
        assert_eq!(counts, vec![2, 2, 6, 12, 30, 54]);
    }

    #[test]
    fn lemma1_examples() {
        let r = verify_lemma1(&periodic("01001"));
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.evidence["mu(11)"], "31");
        assert_eq!(r.evidence["gap_at_2T"], "true");
        let mu10: u64 = r.evidence["mu(10)"].parse().unwrap();
        assert!(mu10 <= 22);
        let one = verify_lemma1(&periodic("1"));
        assert!(one.passed());
        assert_eq!(one.evidence["mu(3)"], "1");
        assert!(lemma1_suite(6).passed());
    }

    #[test]
    fn cor1_examples() {
        let l = parse_seqspec("legendre:p=101").unwrap().word(101).unwrap();
        assert!(verify_cor1(&l).passed());
        let r = verify_cor1(&Word::zeros(50));
        assert!(r.passed());
        assert_eq!(r.evidence["C2"], "49");
        assert_eq!(verify_cor1(&Word::zeros(1)).status, Status::Skipped);
    }

    #[test]
    fn thm4_examples() {
        let r = verify_thm4(63);
        assert!(r.passed());
        assert_eq!(r.evidence["M_values"], "{3,4,5}");
        assert!(verify_thm4(31).passed());
        assert_eq!(verify_thm4(217).evidence["M_values"], "{5,6,7,8}");
        assert_eq!(verify_thm4(10).status, Status::Skipped);
        assert!(thm4_suite(101).passed());
    }

    #[test]
    fn thm5_and_lemma3() {
        let r = verify_thm5(5);
        assert!(r.passed());
        assert_eq!(r.evidence["M"], "2");
        assert_eq!(verify_thm5(361).evidence["M"], "9");
        assert_eq!(verify_thm5(7).status, Status::Skipped);
        let l = lemma3_scan(30);
        assert!(l.passed(), "{l:?}");
        assert_eq!(l.evidence["found"], "{3,5,9}");
        assert_eq!(l.evidence["prime_powers_without_primitive_2"], "[17, 257, 65537]");
    }

    #[test]
    fn thm6_examples() {
        assert!(verify_thm6(2).passed());
        let r = verify_thm6(5);
        assert!(r.passed());
        let r8 = verify_thm6(8);
        assert!(r8.passed(), "{r8:?}");
        assert_eq!(r8.evidence["T-2_example.q"], "85");
        assert_eq!(r8.evidence["T-2_example.M"], "6");
        let s = periodic("10110101");
        assert_eq!(connection(&s).q, BigUint::from(255u32));
        let s5 = periodic("10100");
        assert_eq!(moc_periodic(&s5), 4);
        assert_eq!(connection(&s5).q, BigUint::from(31u32));
    }

    #[test]
    fn msequence_fixtures() {
        let r = verify_msequence(4, &[0, 1]);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.evidence["L"], "4");
        assert_eq!(r.evidence["q"], "2^15-1");
        assert!(verify_msequence(5, &[0, 2]).passed());
        assert_eq!(verify_msequence(1, &[0]).status, Status::Skipped);
        for (r, taps) in MSEQUENCE_FIXTURES {
            assert!(verify_msequence(r, taps).passed(), "r={r}");
        }
        // x^4 + x^2 + 1 is not primitive: period 6, not 15
        assert!(verify_msequence(4, &[0, 2]).failed());
    }

    #[test]
    fn lower_bounds_small() {
        assert!(verify_thue_morse_bound(300).passed());
        assert!(verify_pattern_bound(2, 300).passed());
        // Constant word has M = 0: the chain fails immediately.
        let r = verify_lower_bound("bound-zero", &Word::zeros(40), 5, 6);
        assert!(r.failed());
        assert_eq!(r.evidence["counterexample_n"], "6");
    }

    #[test]
    fn tables() {
        let t2 = reproduce_table(2).unwrap();
        assert!(t2.all_match(), "{:?}", t2.mismatches());
        let q93 = t2.rows.iter().find(|r| r.q == 93).unwrap();
        assert_eq!((q93.t, q93.ceil_log2), (10, 7));
        assert!(reproduce_table(3).is_none());
        let small: Vec<TableExpectation> =
            TABLE1.iter().filter(|e| e.q < 1000).cloned().collect();
        let t1 = reproduce_rows(1, &small, false);
        assert!(t1.all_match(), "{:?}", t1.mismatches());
        let q3 = &t1.rows[0];
        assert!(q3.floor_remark);
        assert!(!t1.rows.iter().find(|r| r.q == 27).unwrap().floor_remark);
    }

    #[test]
    fn mutated_expectations_are_reported() {
        let mut rows = vec![TABLE1[3].clone()];
        rows[0].m = &[3];
        let t = reproduce_rows(1, &rows, false);
        assert!(!t.all_match());
        assert!(t.reports()[0].failed());
        assert!(t.to_csv().contains("false"));

        let mut rows = vec![TABLE2[4].clone()];
        rows[0].t = 16;
        assert!(!reproduce_rows(2, &rows, true).all_match());

        assert!(lemma3_scan_against(30, &[3, 5]).failed());
    }

    #[test]
    fn scan_grid_shape() {
        let g = scan_grid(200, 1.3);
        assert_eq!(&g[..3], &[2, 3, 4]);
        assert_eq!(g[62], 64);
        assert_eq!(&g[63..], &[84, 110, 143, 186, 200]);
        assert_eq!(scan_grid(10, 1.3), (2..=10).collect::<Vec<_>>());
        assert!(g.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn scans() {
        let tm = parse_seqspec("thue-morse").unwrap();
        let r = conjecture_scan(&tm, 300, DEFAULT_SCAN_C, DEFAULT_GRID_RATIO).unwrap();
        assert_eq!(r.status, Status::Pass);
        let zero = parse_seqspec("zero").unwrap();
        let z = conjecture_scan(&zero, 300, DEFAULT_SCAN_C, DEFAULT_GRID_RATIO).unwrap();
        assert_eq!(z.q, Some(BigUint::one()));
        assert!(z.rows.iter().all(|r| r.mu == BigUint::one()));
        assert_eq!(z.status, Status::Fail);
        let leg = parse_seqspec("legendre:p=101").unwrap();
        let l = conjecture_scan(&leg, 202, DEFAULT_SCAN_C, DEFAULT_GRID_RATIO).unwrap();
        let log2_q = numtheory::log2(l.q.as_ref().unwrap());
        let last = l.rows.last().unwrap();
        assert_eq!(last.target, log2_q.min(101.0));
        assert_eq!(r.to_csv(), conjecture_scan(&tm, 300, 8.0, 1.3).unwrap().to_csv());
    }

    #[test]
    fn claim_dispatch() {
        let opts = VerifyOptions {
            exhaustive_t: Some(5),
            random_words: 3,
            thm4_q_max: 31,
            thm5_q_max: 100,
            bound_n_max: 100,
            ..VerifyOptions::default()
        };
        assert!(run_claim("nope", &opts).is_none());
        let all = run_all(&opts);
        assert!(all.iter().all(|r| !r.failed()), "{all:?}");
        let ids: Vec<&str> = all.iter().map(|r| r.claim_id.as_str()).collect();
        assert_eq!(ids.first(), Some(&"thm1"));
        assert_eq!(ids.last(), Some(&"table2"));
        assert_eq!(all[2].instance, "T=1..=5,exhaustive");
        assert_eq!(reports_to_csv(&all), reports_to_csv(&run_all(&opts)));
    }

    #[test]
    fn report_formats_are_deterministic() {
        let reports = vec![verify_thm4(63), verify_thm5(7), verify_lemma1(&periodic("01001"))];
        let csv = reports_to_csv(&reports);
        assert!(csv.starts_with("# seqlab report v1"));
        assert!(csv.contains("skipped(not an odd prime power with 2 primitive)"));
        assert_eq!(csv, reports_to_csv(&[verify_thm4(63), verify_thm5(7), verify_lemma1(&periodic("01001"))]));
        let json = reports_to_json(&reports);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed[0]["claim_id"], "thm4");
        assert_eq!(parsed[1]["status"], "skipped");
    }
}
