use seqlab::adic::adic_min;
use seqlab::generators::fcsr_word;
use seqlab::maxorder::{moc, moc_periodic};
use seqlab::measures::linear_complexity;
use seqlab::seqspec::parse_seqspec;
use seqlab::BigUint;
use seqlab_web::{periodic_of, profiles_of, sweep_of, MAX_PROFILE_LEN, MAX_SWEEP_MODULUS};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn profiles_follow_prefixes() {
    let p = profiles_of("thue-morse", 64).unwrap();
    assert_eq!(p.seq, "thue-morse");
    assert_eq!((p.moc.len(), p.log2_mu.len(), p.linear.len()), (64, 64, 64));
    let w = parse_seqspec("thue-morse").unwrap().word(64).unwrap();
    assert_eq!(p.bits, w.to_string());
    for n in [1, 7, 20, 64] {
        let prefix = w.prefix(n);
        assert_eq!(p.moc[n - 1], moc(&prefix).m);
        assert_eq!(p.linear[n - 1], linear_complexity(&prefix));
        let mu = adic_min(&w, n).mu;
        assert!((p.log2_mu[n - 1] - seqlab::numtheory::log2(&mu)).abs() < 1e-12);
    }
}

#[test]
fn profiles_reject_bad_input() {
    assert!(profiles_of("thue-morse", 0).is_err());
    assert!(profiles_of("thue-morse", MAX_PROFILE_LEN + 1).is_err());
    assert!(profiles_of("ell:q=10,A=3", 10).is_err());
}

#[test]
fn periodic_summary_of_ell_sequence() {
    let s = periodic_of("ell:q=31,A=5").unwrap();
    assert_eq!((s.t, s.q.as_str(), s.a.as_str(), s.m), (5, "31", "5", 4));
    assert_eq!(s.period, "10100");
    assert!(periodic_of("zeckendorf").is_err());
}

#[test]
fn sweep_agrees_with_unrolled_sequences() {
    for q in [3u64, 9, 11, 21, 25, 45] {
        let sweep = sweep_of(q).unwrap();
        let coprime = (1..q).filter(|a| gcd(*a, q) == 1).count();
        assert_eq!(sweep.rows.len(), coprime);
        for row in &sweep.rows {
            let s = fcsr_word(&BigUint::from(row.a), &BigUint::from(q)).unwrap();
            assert_eq!(row.t, s.len(), "q={q} A={}", row.a);
            assert_eq!(row.m, moc_periodic(&s), "q={q} A={}", row.a);
        }
    }
}

#[test]
fn sweep_of_prime_with_primitive_two() {
    let sweep = sweep_of(11).unwrap();
    assert_eq!(sweep.ceil_log2, 4);
    assert!(sweep.rows.iter().all(|r| r.t == 10 && r.m == 4));
    assert!(sweep_of(8).is_err());
    assert!(sweep_of(1).is_err());
    assert!(sweep_of(MAX_SWEEP_MODULUS + 2).is_err());
}
