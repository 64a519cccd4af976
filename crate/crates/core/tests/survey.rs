use std::collections::BTreeSet;

use d6lab_core::curves::EllipticCurve;
use d6lab_core::family::{excluded_u_set, r_from_u, D6Params};
use d6lab_core::fields::{is_prime_u64, PrimeField};
use d6lab_core::survey::{
    build_trace_table, degree12_splits, easytwist_lambdas, easytwist_predicate, emit_report, enumerate_classes,
    extraordinary_detect, extraordinary_roots, find_pairs, primes_near, run_survey, split_completely_in_l,
    survey_prime, RefineSet, SurveyError, SurveyReport, PRIME_HEADER,
};
use d6lab_core::tricover::special_prym;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn primes_below(n: u64) -> Vec<u64> {
    (5..n).filter(|&p| is_prime_u64(p)).collect()
}

/// Nearest primes to 2^n by a plain scan outward, both sides of a tie kept.
fn window_oracle(n: u32, count: usize) -> Vec<u64> {
    let c = 1i64 << n;
    let mut all: Vec<u64> = (5..(2 * c + 2000) as u64).filter(|&p| is_prime_u64(p)).collect();
    all.sort_by_key(|&p| ((p as i64 - c).abs(), p));
    let cutoff = (all[count - 1] as i64 - c).abs();
    let mut out: Vec<u64> = all.into_iter().filter(|&p| (p as i64 - c).abs() <= cutoff).collect();
    out.sort_unstable();
    out
}

#[test]
fn prime_windows() {
    // 4093 and 4099 tie at distance 3; 4091 follows at distance 5.
    assert_eq!(primes_near(12, 3), vec![4091, 4093, 4099]);
    assert_eq!(primes_near(12, 1), vec![4093, 4099]);
    assert_eq!(primes_near(10, 1), vec![1021]);
    let w = primes_near(12, 1024);
    assert_eq!(w.len(), 1024);
    assert_eq!((w[0], w[1023]), (7, 8179));
    for (n, count) in [(8u32, 10usize), (10, 50), (12, 1024), (13, 300)] {
        assert_eq!(primes_near(n, count), window_oracle(n, count), "n={n} count={count}");
    }
}

#[test]
fn trace_table_agrees_with_point_counting() {
    let p = 4093;
    let f = fp(p);
    let table = build_trace_table(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let l = rng.gen_range(2..p);
        let t = table.trace(l);
        assert_eq!(t as i128, EllipticCurve::legendre(&f, 1, l).unwrap().trace().unwrap());
        assert!(t * t <= 4 * p as i64);
        // The six lambdas of one j-invariant share |t|.
        let inv = f.inv(l).unwrap();
        let lm1 = f.sub(l, 1);
        for m in [f.sub(1, l), inv, f.div(l, lm1).unwrap(), f.div(lm1, l).unwrap(), f.inv(f.sub(1, l)).unwrap()] {
            assert_eq!(table.trace(m).abs(), t.abs());
            let a = EllipticCurve::legendre(&f, 1, m).unwrap().j_invariant();
            assert_eq!(a, EllipticCurve::legendre(&f, 1, l).unwrap().j_invariant());
        }
    }
}

#[test]
fn class_enumeration() {
    let empty = enumerate_classes(&fp(11), &build_trace_table(11).unwrap());
    assert!(empty.is_empty());
    // F_13 and F_17 carry no valid parameter at all.
    assert!(enumerate_classes(&fp(13), &build_trace_table(13).unwrap()).is_empty());
    assert!(enumerate_classes(&fp(17), &build_trace_table(17).unwrap()).is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [19u64, 23, 101, 1009, 4093] {
        let f = fp(p);
        let classes = enumerate_classes(&f, &build_trace_table(p).unwrap());
        let total: usize = classes.iter().map(|c| c.orbit_size).sum();
        assert_eq!(total as u64, 2 * (p - 1 - excluded_u_set(&f).len() as u64), "p={p}");
        for rec in classes.iter().take(20) {
            let params = rec.class.params(f);
            let orbit = params.equivalence_orbit();
            let (u, ns) = orbit[rng.gen_range(0..orbit.len())];
            let other = D6Params::new(f, u, ns).unwrap();
            assert_eq!(other.trace_signature().unwrap().key(), rec.signature.key());
        }
    }
}

#[test]
fn pairs_are_exactly_signature_matches() {
    for p in [1009u64, 4093, 4099] {
        let f = fp(p);
        let classes = enumerate_classes(&f, &build_trace_table(p).unwrap());
        let pairs = find_pairs(p, &classes);
        let mut brute = BTreeSet::new();
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if a.signature.key() == b.signature.key() {
                    brute.insert((a.class.min(b.class), a.class.max(b.class)));
                }
            }
        }
        let got: BTreeSet<_> = pairs.iter().map(|r| (r.first, r.second)).collect();
        assert_eq!(got, brute);
        for r in &pairs {
            assert!(r.first < r.second);
            // Twist means same u-orbit with the other c.
            let (a, _) = r.params();
            let flipped = a.with_class(!a.nonsquare()).canonical_class();
            assert_eq!(r.is_twist, flipped == r.second);
        }
    }
}

/// u = s(1 + t)/2 for square roots s of 3 and t of 5.
fn corollary_us(f: &PrimeField) -> Vec<u64> {
    let (s, t) = (f.sqrt(3).unwrap(), f.sqrt(5).unwrap());
    let half = f.inv(2).unwrap();
    let mut out = vec![];
    for s in [s, f.neg(s)] {
        for t in [t, f.neg(t)] {
            out.push(f.mul(f.mul(s, f.add(1, t)), half));
        }
    }
    out
}

#[test]
fn corollary_parameters_satisfy_the_easy_twist_hypotheses() {
    let mut checked = 0;
    for p in primes_below(10_000).into_iter().filter(|p| p % 120 == 11 || p % 120 == 59) {
        let f = fp(p);
        let bad = excluded_u_set(&f);
        for u in corollary_us(&f) {
            let quartic = f.add(f.sub(f.pow(u, 4), f.mul(9, f.mul(u, u))), 9);
            assert_eq!(quartic, 0);
            if bad.contains(&u) {
                continue;
            }
            assert!(easytwist_predicate(&f, u).unwrap(), "p={p} u={u}");
            // j of the first lambda is a root of the class polynomial for -60.
            let l1 = easytwist_lambdas(&f, u)[0].unwrap();
            let j = EllipticCurve::legendre(&f, 1, l1).unwrap().j_invariant();
            let hilbert = f.add(f.sub(f.mul(j, j), f.mul(f.reduce(37018076625), j)), f.reduce(153173312762625));
            assert_eq!(hilbert, 0, "p={p} u={u}");
            // The pair (u, 1), (u, ns) is found by the survey.
            let params = D6Params::new(f, u, false).unwrap();
            let (a, b) = (params.canonical_class(), params.with_class(true).canonical_class());
            let (a, b) = (a.min(b), a.max(b));
            if p < 2000 {
                let s = survey_prime(p, RefineSet::NONE).unwrap();
                let rec = s.pairs.iter().find(|r| (r.first, r.second) == (a, b)).expect("corollary pair");
                assert!(rec.is_twist && rec.flags.easy_twist_theorem);
            }
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn easy_twist_predicate_rejects_bad_inputs() {
    assert!(matches!(easytwist_predicate(&fp(4093), 5), Err(SurveyError::BadParameter(_))));
    let f = fp(4099);
    let bad = *excluded_u_set(&f).iter().next().unwrap();
    assert!(matches!(easytwist_predicate(&f, bad), Err(SurveyError::BadParameter(_))));
}

#[test]
fn splitting_field_criteria_agree() {
    let primes = primes_below(10_000);
    for &p in &primes {
        if p == 29 {
            continue;
        }
        assert_eq!(split_completely_in_l(p), degree12_splits(p), "p={p}");
    }
    let all = primes_below(100_000);
    let split = all.iter().filter(|&&p| split_completely_in_l(p)).count();
    let density = split as f64 / all.len() as f64;
    assert!((density - 1.0 / 12.0).abs() < 0.01, "density {density}");
}

#[test]
fn extraordinary_roots_and_inert_primes() {
    for p in primes_below(3000) {
        let f = fp(p);
        match extraordinary_roots(&f) {
            Some((a, b)) => {
                assert_ne!(a, b);
                assert_eq!(f.add(a, b), 27 % p);
                assert_eq!(f.mul(a, b), 1);
            }
            None => assert!(p == 5 || p == 29 || f.legendre(29) == -1, "p={p}"),
        }
    }
    // 4099 is inert (29 is not a square mod 4099), so nothing is flagged.
    let f = fp(4099);
    assert_eq!(f.legendre(29), -1);
    let s = survey_prime(4099, RefineSet::NONE).unwrap();
    assert!(s.pairs.iter().all(|r| !extraordinary_detect(r)));
}

#[test]
fn split_primes_carry_the_extraordinary_pair() {
    let mut seen = 0;
    for p in primes_below(20_000).into_iter().filter(|&p| split_completely_in_l(p)) {
        let f = fp(p);
        let (r1, r2) = extraordinary_roots(&f).unwrap();
        let bad = excluded_u_set(&f);
        let find = |r: u64| (1..p).find(|&u| !bad.contains(&u) && r_from_u(&f, u).ok() == Some(r));
        let (Some(u1), Some(u2)) = (find(r1), find(r2)) else { continue };
        let a = D6Params::new(f, u1, false).unwrap();
        let b = D6Params::new(f, u2, false).unwrap();
        assert_ne!(a.coarse_invariant(), b.coarse_invariant());
        let (sa, sb) = (a.trace_signature().unwrap(), b.trace_signature().unwrap());
        // Some twist of the second curve is doubly isogenous to the first.
        let twin = [b, b.with_class(true)]
            .into_iter()
            .find(|x| x.trace_signature().unwrap().key() == sa.key())
            .unwrap_or_else(|| panic!("p={p}: no twin for {sb:?}"));
        assert!(special_prym(&a).unwrap().matches(&special_prym(&twin).unwrap()), "p={p}");
        seen += 1;
    }
    assert!(seen > 100, "{seen}");
}

#[test]
fn reports_are_independent_of_thread_count() {
    let primes = primes_near(9, 24);
    let one = SurveyReport::new(&run_survey(&primes, RefineSet::ALL, 1).unwrap());
    let three = SurveyReport::new(&run_survey(&primes, RefineSet::ALL, 3).unwrap());
    assert_eq!(one.prime_csv(), three.prime_csv());
    assert_eq!(one.aggregate_csv(), three.aggregate_csv());
    assert_eq!(one.pairs_json(), three.pairs_json());
}

#[test]
fn report_files_follow_the_schema() {
    let primes = primes_near(10, 12);
    let report = SurveyReport::new(&run_survey(&primes, RefineSet::parse("3a,four").unwrap(), 2).unwrap());
    let dir = tempfile::tempdir().unwrap();
    emit_report(&report, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("primes.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(PRIME_HEADER));
    assert!(!csv.contains('\r'));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), primes.len());
    for (row, &p) in rows.iter().zip(&primes) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 14);
        assert_eq!(cells[0], p.to_string());
        // 3b was not requested.
        assert_eq!((cells[5], cells[8]), ("", ""));
        for (i, c) in cells.iter().enumerate() {
            if i != 5 && i != 8 {
                assert!(c.parse::<u64>().is_ok(), "{row}");
            }
        }
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pairs.json")).unwrap()).unwrap();
    let pairs = json.as_array().unwrap();
    assert_eq!(pairs.len(), report.totals.twist_pairs + report.totals.nontwist_pairs);
    let expected: BTreeSet<&str> =
        ["p", "u1", "c1", "u2", "c2", "isTwist", "special3", "mult3", "four", "easyTwistTheorem", "extraordinary"].into();
    for pair in pairs {
        let keys: BTreeSet<&str> = pair.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, expected);
        assert!(pair["mult3"].is_null());
    }
    let agg = std::fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    let cells: Vec<&str> = agg.lines().nth(1).unwrap().split(',').collect();
    let sum: usize = report.rows.iter().map(|r| r.counts.twist_pairs).sum();
    assert_eq!(cells[4], sum.to_string());
}

#[test]
fn refine_set_parsing() {
    assert_eq!(RefineSet::parse("special3,mult3,four").unwrap(), RefineSet::ALL);
    assert_eq!(RefineSet::parse("all").unwrap(), RefineSet::ALL);
    assert_eq!(RefineSet::parse("").unwrap(), RefineSet::NONE);
    assert!(RefineSet::parse("five").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn perturbing_one_trace_breaks_membership(p in prop::sample::select(vec![1009u64, 2003, 4093]), idx in 0usize..16, delta in 1i64..3) {
        let f = fp(p);
        let classes = enumerate_classes(&f, &build_trace_table(p).unwrap());
        let pairs = find_pairs(p, &classes);
        prop_assume!(!pairs.is_empty());
        let rec = pairs[idx % pairs.len()];
        let mut changed = classes.clone();
        let pos = changed.iter().position(|c| c.class == rec.first).unwrap();
        changed[pos].signature.t_base += delta;
        let after = find_pairs(p, &changed);
        prop_assert!(!after.iter().any(|r| (r.first, r.second) == (rec.first, rec.second)));
    }
}
