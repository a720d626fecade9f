//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 8 (conjecture scans) is report-grade: its line shows the scan
//! outcome, but only the all-zero control is asserted.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqlab::adic::{adic_min, adic_oracle, connection};
use seqlab::generators::{fcsr_word, lfsr_period, rudin_shapiro_word, thue_morse_word};
use seqlab::maxorder::{moc, moc_oracle, moc_periodic};
use seqlab::measures::{expansion_complexity, linear_complexity, Expansion};
use seqlab::relations::{
    conjecture_scan, reports_to_csv, reports_to_json, reproduce_table, run_all, run_claim,
    ScanReport, Status, VerifyOptions,
};
use seqlab::seqspec::parse_seqspec;
use seqlab::{PeriodicSequence, Word};

const TABLE1_LIMIT: Duration = Duration::from_secs(120);
const TABLE2_LIMIT: Duration = Duration::from_secs(60);
const SCAN_C: f64 = 8.0;
const SCAN_GRID_RATIO: f64 = 1.3;
const SCAN_N_MAX: usize = 5000;
const LEGENDRE_PRIMES: [u64; 5] = [11, 101, 499, 1009, 1999];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn biguint(v: u64) -> BigUint {
    BigUint::from(v)
}

fn table(which: u8, limit: Duration) -> Outcome {
    let start = Instant::now();
    let report = reproduce_table(which).expect("known table");
    let elapsed = start.elapsed();
    let matching = report.rows.iter().filter(|r| r.matches).count();
    let mismatches: Vec<u64> = report.mismatches().iter().map(|r| r.q).collect();
    let floors: Vec<u64> = report.rows.iter().filter(|r| r.floor_remark).map(|r| r.q).collect();
    let floors_ok = which != 1 || floors == vec![3, 9, 5];
    outcome(
        report.all_match() && floors_ok && elapsed < limit,
        format!(
            "{matching}/{} rows match, mismatches {mismatches:?}, floor rows {floors:?}, {:.1}s (limit {}s)",
            report.rows.len(),
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn fixtures() -> Outcome {
    let cases = [
        (3u64, 31u64, "11000", 3usize),
        (5, 31, "10100", 4),
        (37, 127, "1010010", 6),
        (173, 255, "10110101", 7),
    ];
    let mut bad = Vec::new();
    for (a, q, period, m) in cases {
        let s = fcsr_word(&biguint(a), &biguint(q)).expect("valid parameters");
        let got_m = moc_periodic(&s);
        let got_q = connection(&s).q;
        if s.period().to_string() != period || got_m != m || got_q != biguint(q) {
            bad.push(format!("A={a},q={q}: {} M={got_m} q={got_q}", s.period()));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "4/4 fixtures exact".to_string() } else { bad.join("; ") })
}

fn lemma1_counterexample() -> Outcome {
    let s = PeriodicSequence::new("01001".parse().expect("literal")).expect("nonempty");
    let w = s.unroll(11);
    let mu11 = adic_min(&w, 11).mu;
    let at10 = adic_min(&w, 10);
    let oracle10 = adic_oracle(&w, 10).expect("within oracle bound");
    let modulus = BigInt::one() << 10;
    let sv = BigInt::from(w.prefix(10).prefix_value());
    let admissible = (BigInt::from(19) * sv - BigInt::from(22)).mod_floor(&modulus) == BigInt::from(0);
    let pass = mu11 == biguint(31)
        && at10.mu <= biguint(22)
        && admissible
        && at10 == oracle10;
    outcome(
        pass,
        format!(
            "mu(11)={mu11}, mu(10)={} via ({},{}), oracle mu(10)={}, (22,19) admissible={admissible}",
            at10.mu, at10.f, at10.q, oracle10.mu
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    for v in 0..(1u64 << 16) {
        let w = Word::from_u64(v, 16);
        if moc(&w).m != moc_oracle(&w).expect("short").m {
            mismatches.push(format!("moc {w}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for _ in 0..1000 {
        let w: Word = (0..500).map(|_| rng.gen::<bool>()).collect();
        if moc(&w).m != moc_oracle(&w).expect("within bound").m {
            mismatches.push(format!("moc {w}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut adic_checks = 0;
    for n in [8usize, 12, 16, 18] {
        for _ in 0..200 {
            let w: Word = (0..n).map(|_| rng.gen::<bool>()).collect();
            adic_checks += 1;
            if adic_min(&w, n) != adic_oracle(&w, n).expect("within bound") {
                mismatches.push(format!("adic N={n} {w}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "moc: 65536 exhaustive + 1000 random (len 500); adic: {adic_checks} random; mismatches {}",
            mismatches.len()
        ),
    )
}

fn theorem_suites() -> Outcome {
    let opts = VerifyOptions::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for id in ["thm1", "thm2", "lemma1", "thm4", "thm5", "lemma3", "thm6"] {
        let reports = run_claim(id, &opts).expect("known claim");
        let ok = reports.iter().all(|r| r.passed());
        pass &= ok;
        if id == "lemma3" {
            let found = &reports[0].evidence["found"];
            pass &= found == "{3,5,9}";
            lines.push(format!("lemma3 {found}"));
        } else if id == "thm6" {
            let e = &reports[0].evidence;
            let witness_ok = e.get("T-2_example.q").map(String::as_str) == Some("85")
                && e.get("T-2_example.M").map(String::as_str) == Some("6");
            pass &= witness_ok;
            lines.push(format!("thm6 {} (q=85 witness {witness_ok})", if ok { "ok" } else { "FAIL" }));
        } else {
            lines.push(format!("{id} {}", if ok { "ok" } else { "FAIL" }));
        }
    }
    outcome(pass, lines.join(", "))
}

fn lower_bounds() -> Outcome {
    let opts = VerifyOptions::default();
    let mut pass = true;
    let mut lines = Vec::new();
    for id in ["bound-thue-morse", "bound-pattern"] {
        let r = &run_claim(id, &opts).expect("known claim")[0];
        pass &= r.passed();
        lines.push(format!("{} {} [{}]", r.instance, r.status, r.evidence_text()));
    }
    outcome(pass, lines.join("; "))
}

fn scans() -> (Outcome, Vec<ScanReport>) {
    let mut specs: Vec<(String, usize)> = vec![
        ("thue-morse".into(), SCAN_N_MAX),
        ("rudin-shapiro".into(), SCAN_N_MAX),
    ];
    specs.extend(LEGENDRE_PRIMES.iter().map(|p| (format!("legendre:p={p}"), 2 * *p as usize)));
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    let mut all_within = true;
    for (text, n_max) in &specs {
        let spec = parse_seqspec(text).expect("valid spec");
        let r = conjecture_scan(&spec, *n_max, SCAN_C, SCAN_GRID_RATIO).expect("scan runs");
        all_within &= r.status == Status::Pass;
        let full = r.q.as_ref().map(|q| *q == (BigUint::one() << spec.period().unwrap().unwrap().len()) - 1u32);
        parts.push(format!(
            "{text} N<={n_max} {} max|dev|={:.3}{}",
            r.status,
            r.max_abs_deviation(),
            match full {
                Some(true) => " q=2^p-1".to_string(),
                Some(false) => " q<2^p-1".to_string(),
                None => String::new(),
            }
        ));
        reports.push(r);
    }
    let zero = conjecture_scan(&parse_seqspec("zero").expect("valid"), 500, SCAN_C, SCAN_GRID_RATIO)
        .expect("scan runs");
    let zero_fails = zero.status == Status::Fail;
    parts.push(format!("zero control fails={zero_fails}"));
    (
        Outcome {
            pass: all_within && zero_fails,
            detail: format!(
                "report-grade, c={SCAN_C}: {}{}",
                parts.join(", "),
                if all_within { "" } else { " (not asserted)" }
            ),
        },
        reports,
    )
}

fn cross_measures() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let m = lfsr_period(4, &[0, 1], &"1000".parse().expect("literal")).expect("valid");
    let l_m = linear_complexity(&m.unroll(2 * m.len()));
    let q_m = connection(&m).q;
    let ok = l_m == 4 && q_m == (BigUint::one() << 15) - 1u32;
    pass &= ok;
    notes.push(format!("m-seq r=4: L={l_m}, q={q_m}"));

    let ell = fcsr_word(&biguint(1), &biguint(11)).expect("valid");
    let l_ell = linear_complexity(&ell.unroll(2 * ell.len()));
    pass &= l_ell == 6;
    notes.push(format!("ell q=11: L={l_ell}"));

    let tm = thue_morse_word(100);
    let e_tm = expansion_complexity(&tm, 100, 10);
    pass &= matches!(e_tm.degree(), Some(d) if d <= 5);
    notes.push(format!("E(TM,100)={:?}", e_tm.degree()));

    let mut fixtures: Vec<(String, Word)> = vec![
        ("m-seq".into(), m.unroll(30)),
        ("ell11".into(), ell.unroll(20)),
        ("thue-morse".into(), tm),
        ("rudin-shapiro".into(), rudin_shapiro_word(100)),
        ("zero".into(), Word::zeros(50)),
    ];
    for (a, q) in [(3u64, 31u64), (5, 31), (37, 127), (173, 255)] {
        let s = fcsr_word(&biguint(a), &biguint(q)).expect("valid");
        fixtures.push((format!("fcsr {a}/{q}"), s.unroll(2 * s.len())));
    }
    let mut violations = Vec::new();
    for (name, w) in &fixtures {
        let n = w.len();
        let l = linear_complexity(w);
        let mo = moc(w).m;
        let e = match expansion_complexity(w, n, n + 2) {
            Expansion::Degree { degree, .. } => degree,
            Expansion::AboveBound => usize::MAX,
        };
        if e > (l + 1).min(n + 2 - l) || mo > l {
            violations.push(format!("{name}: E={e} L={l} M={mo}"));
        }
    }
    pass &= violations.is_empty();
    notes.push(format!("E/M/L bounds on {} fixtures, violations {violations:?}", fixtures.len()));
    outcome(pass, notes.join(", "))
}

fn determinism(first_scans: &[ScanReport]) -> Outcome {
    let opts = VerifyOptions::default();
    let a = run_all(&opts);
    let b = run_all(&opts);
    let csv_same = reports_to_csv(&a) == reports_to_csv(&b);
    let json_same = reports_to_json(&a) == reports_to_json(&b);
    let tables_same = (1..=2).all(|w| {
        let x = reproduce_table(w).expect("table");
        let y = reproduce_table(w).expect("table");
        x.to_csv() == y.to_csv() && x.to_json() == y.to_json()
    });
    let scan_same = first_scans.iter().take(1).all(|r| {
        let again = conjecture_scan(
            &parse_seqspec(&r.spec).expect("round trip"),
            r.n_max,
            r.c,
            r.grid_ratio,
        )
        .expect("scan runs");
        again.to_csv() == r.to_csv() && again.to_json() == r.to_json()
    });
    let failures = a.iter().filter(|r| r.failed()).count();
    outcome(
        csv_same && json_same && tables_same && scan_same,
        format!(
            "{} reports ({failures} failed): csv identical={csv_same}, json identical={json_same}, tables identical={tables_same}, scan identical={scan_same}",
            a.len()
        ),
    )
}

fn main() {
    let started = Instant::now();
    type Job = fn() -> Outcome;
    let jobs: [(u8, &str, Job); 8] = [
        (1, "Table 1 reproduction", || table(1, TABLE1_LIMIT)),
        (2, "Table 2 reproduction", || table(2, TABLE2_LIMIT)),
        (3, "FCSR fixtures", fixtures),
        (4, "mu(11)=31 and mu(10)<=22 counterexample", lemma1_counterexample),
        (5, "oracle equivalence", oracle_equivalence),
        (6, "theorem suites", theorem_suites),
        (7, "lower bounds at desk scale", lower_bounds),
        (9, "cross-measure facts", cross_measures),
    ];
    let (mut results, scan_reports) = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(id, name, job)| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let o = job();
                    (*id, *name, o, t.elapsed())
                })
            })
            .collect();
        let t = Instant::now();
        let (o, reports) = scans();
        let scan_elapsed = t.elapsed();
        let mut results: Vec<_> = handles
            .into_iter()
            .map(|h| h.join().expect("criterion thread"))
            .collect();
        results.push((8, "conjecture scans", o, scan_elapsed));
        (results, reports)
    });
    let t = Instant::now();
    let det = determinism(&scan_reports);
    results.push((10, "determinism", det, t.elapsed()));
    results.sort_by_key(|r| r.0);

    let mut failed = Vec::new();
    for (id, name, o, elapsed) in &results {
        let label = match (o.pass, *id == 8) {
            (true, _) => "PASS",
            (false, true) => "FAIL (report-grade)",
            (false, false) => "FAIL",
        };
        println!("{label} [{id}] {name} ({:.1}s): {}", elapsed.as_secs_f64(), o.detail);
        let asserted = *id != 8 || !o.detail.contains("zero control fails=true");
        if !o.pass && asserted {
            failed.push(*id);
        }
    }
    println!("acceptance: {} criteria, {:.1}s total", results.len(), started.elapsed().as_secs_f64());
    let observed: BTreeSet<u8> = results.iter().map(|r| r.0).collect();
    assert_eq!(observed, (1..=10).collect::<BTreeSet<u8>>());
    if !failed.is_empty() {
        eprintln!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
