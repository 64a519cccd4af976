use std::collections::BTreeSet;

use d6lab_core::family::{
    coarse_invariant, enumerate_class_params, excluded_u_set, r_from_u, u_bad_set, weierstrass_points, D6Params, FamilyError,
    LambdaTable, Orbit,
};
use d6lab_core::fields::PrimeField;
use proptest::prelude::*;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn chi(p: u64, a: u64) -> i64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if (1..p).any(|x| x * x % p == a) {
        1
    } else {
        -1
    }
}

/// Square roots by scanning.
fn roots_of(p: u64, a: u64) -> Vec<u64> {
    (0..p).filter(|&x| x * x % p == a % p).collect()
}

/// U_bad by brute force: every combination of scanned square roots.
fn u_bad_oracle(p: u64) -> BTreeSet<u64> {
    let m = |a: u64, b: u64| a * b % p;
    let neg = |a: u64| (p - a % p) % p;
    let mut s = BTreeSet::new();
    for v in [1, 3] {
        s.insert(v);
        s.insert(neg(v));
    }
    for r3 in roots_of(p, 3) {
        s.insert(r3);
        for sign in [r3, neg(r3)] {
            let t = 2 * sign % p;
            for v in [(3 + t) % p, (3 + p - t) % p] {
                s.insert(v);
                s.insert(neg(v));
            }
        }
    }
    for i in roots_of(p, p - 1) {
        for t in roots_of(p, 2) {
            s.insert((i + t) % p);
        }
    }
    for a in roots_of(p, p - 2) {
        for b in roots_of(p, 2) {
            let v = m((1 + a) % p, (1 + b) % p);
            s.insert(v);
            s.insert(neg(v));
        }
    }
    s.remove(&0);
    s
}

#[test]
fn u_bad_examples() {
    let all: BTreeSet<u64> = (1..11).collect();
    assert_eq!(u_bad_set(&fp(11)), all);
    assert_eq!(u_bad_set(&fp(13)), BTreeSet::from([1, 12, 3, 10, 4, 9, 11, 8, 5, 2]));
    for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 73, 97, 193, 409, 1009] {
        assert_eq!(u_bad_set(&fp(p)), u_bad_oracle(p), "p = {p}");
    }
    // p = 13 and 29 are 5 mod 8: 2 and -2 are both nonsquares, so only the
    // first four families contribute.
    for p in [13u64, 29, 37, 53] {
        let f = fp(p);
        assert_eq!((f.legendre(2), f.legendre(p - 2)), (-1, -1));
        assert!(u_bad_set(&f).len() <= 10);
    }
}

#[test]
fn r_and_weierstrass_examples() {
    // u = 2 lies in U_bad(13) (it is -3 - 2*sqrt(3), and r = -27 there), so the
    // worked example goes through the unchecked formula path.
    let f = fp(13);
    assert!(u_bad_set(&f).contains(&2));
    assert!(matches!(r_from_u(&f, 2), Err(FamilyError::BadParameter { .. })));
    let formal = D6Params::formal(f, 2, false).unwrap();
    assert_eq!(formal.r(), 12);
    assert_eq!(D6Params::formal(f, 11, false).unwrap().r(), 12);
    assert!(matches!(r_from_u(&f, 1), Err(FamilyError::BadParameter { .. })));
    assert!(r_from_u(&f, 0).is_err());
    let w = formal.weierstrass();
    assert_eq!(w.0, [2, 11, 5, 8, 4, 9]);
    // prod (x - u_k) = x^6 - 6x^4 + 57x^2 + 12, coefficients mod 13.
    assert_eq!(w.sextic(&f), [12, 0, 57 % 13, 0, 7, 0, 1]);
    let mut set = w.0.to_vec();
    set.sort_unstable();
    let mut neg = D6Params::formal(f, 11, false).unwrap().weierstrass().0.to_vec();
    neg.sort_unstable();
    assert_eq!(set, neg);
    assert_eq!(formal.coarse_invariant(), 11);
    // (u + 3)/(u - 1) gives the same r.
    assert_eq!(D6Params::formal(f, 5, false).unwrap().r(), 12);
    // Every unit of F_13 is excluded: 6 and 7 are the square roots of -3.
    assert!(excluded_u_set(&f).len() == 12);
    assert!(excluded_u_set(&fp(17)).len() == 16);
    let f = fp(19);
    assert_eq!(r_from_u(&f, 2).unwrap(), D6Params::formal(f, 2, false).unwrap().r());
    assert_eq!(weierstrass_points(&f, 2).unwrap(), D6Params::formal(f, 2, false).unwrap().weierstrass());
    assert_eq!(coarse_invariant(&f, 2).unwrap(), D6Params::new(f, 2, false).unwrap().coarse_invariant());
}

#[test]
fn orbit_example_and_counting_identity() {
    let f = fp(13);
    let params = D6Params::formal(f, 2, false).unwrap();
    let orbit = params.equivalence_orbit();
    // -1 is a square mod 13, so the c class never flips.
    let inv = |a: u64| f.inv(a).unwrap();
    let second: BTreeSet<u64> = [
        f.mul(3, inv(2)),
        f.neg(f.mul(3, inv(2))),
        f.mul(3, inv(5)),
        f.neg(f.mul(3, inv(5))),
        f.mul(9, inv(12)),
        f.neg(f.mul(9, inv(12))),
    ]
    .into();
    assert_eq!(second, BTreeSet::from([8, 5, 11, 2, 4, 9]));
    assert!(orbit.iter().all(|&(_, ns)| !ns));
    let us: BTreeSet<u64> = orbit.iter().map(|&(u, _)| u).collect();
    assert!(second.is_subset(&us));

    for p in [13u64, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 101, 103, 4093] {
        let f = fp(p);
        let classes = enumerate_class_params(&f);
        let total: usize = classes.iter().map(|(_, n)| n).sum();
        assert_eq!(total as u64, 2 * (p - 1 - excluded_u_set(&f).len() as u64), "p = {p}");
        for (class, size) in &classes {
            assert_eq!(12 % size, 0);
            let params = class.params(f);
            for (u, ns) in params.equivalence_orbit() {
                let member = D6Params::new(f, u, ns).unwrap();
                assert_eq!(member.equivalence_orbit().len(), *size);
                assert_eq!(member.canonical_class(), *class);
                assert_eq!(member.coarse_invariant(), class.coarse);
            }
        }
    }
    assert!(enumerate_class_params(&fp(11)).is_empty());
}

#[test]
fn base_curve_and_tables() {
    let f = fp(13);
    let params = D6Params::formal(f, 2, false).unwrap();
    let [c, a2, a4, a6] = params.base_curve().cubic_coefficients();
    assert_eq!([c, a2, a4, a6], [1, 7, 5, 12]);
    let entries = params.orbit_prym_curves();
    assert_eq!(entries[0].lambda, 12);
    assert_eq!(entries.iter().filter(|e| e.orbit == Orbit::Six).count(), 6);
    let pairs: BTreeSet<(u8, u8)> = entries.iter().map(|e| e.pair).collect();
    assert_eq!(pairs.len(), 15);
}

fn random_valid(p: u64, seed: u64) -> Option<D6Params> {
    let f = fp(p);
    let bad = excluded_u_set(&f);
    let good: Vec<u64> = (1..p).filter(|u| !bad.contains(u)).collect();
    if good.is_empty() {
        return None;
    }
    let u = good[(seed % good.len() as u64) as usize];
    D6Params::new(f, u, (seed / 7) % 2 == 1).ok()
}

fn sextic_point_count(params: &D6Params) -> i64 {
    let f = params.field();
    let p = params.p();
    let w = params.weierstrass().0;
    let c = params.c();
    let mut n = 1 + chi(p, c);
    for x in 0..p {
        let s = w.iter().fold(1u64, |acc, &uk| f.mul(acc, f.sub(x, uk)));
        n += 1 + f.legendre(f.mul(c, s)) as i64;
    }
    n
}

/// Trace of c' y^2 = prod_{k in ks}(x - k) for a monic quartic, by counting.
fn quartic_trace(f: &PrimeField, cprime: u64, roots: &[u64]) -> i64 {
    let p = f.p();
    let mut n = 1 + f.legendre(cprime) as i64;
    for x in 0..p {
        let q = roots.iter().fold(1u64, |acc, &r| f.mul(acc, f.sub(x, r)));
        n += 1 + f.legendre(f.mul(cprime, q)) as i64;
    }
    p as i64 + 1 - n
}

/// Prym trace of the double cover d z^2 = (x - u_i)(x - u_j) normalised so
/// that (u_1, 0) splits, computed on c d y^2 = prod_{k != i, j}(x - u_k).
fn quartic_prym_trace(params: &D6Params, i: usize, j: usize) -> i64 {
    let f = params.field();
    let w = params.weierstrass().0;
    let others: Vec<u64> = (0..6).filter(|&k| k != i && k != j).map(|k| w[k]).collect();
    let d = if i != 0 && j != 0 {
        f.mul(f.sub(w[0], w[i]), f.sub(w[0], w[j]))
    } else {
        let h = others.iter().fold(1u64, |acc, &uk| f.mul(acc, f.sub(w[0], uk)));
        f.mul(params.c(), h)
    };
    quartic_trace(f, f.mul(params.c(), d), &others)
}

#[test]
fn prym_traces_match_quartic_models() {
    let mut checked = 0;
    for (k, p) in [13u64, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199]
        .iter()
        .enumerate()
    {
        for s in 0..2u64 {
            let Some(params) = random_valid(*p, 31 * k as u64 + 17 * s + 5) else { continue };
            let table = LambdaTable::build(params.field()).unwrap();
            let f = params.field();
            for en in params.orbit_prym_curves() {
                let (i, j) = (en.pair.0 as usize - 1, en.pair.1 as usize - 1);
                let expected = quartic_prym_trace(&params, i, j);
                assert_eq!(f.legendre(en.e) as i64 * table.trace(en.lambda), expected, "p={p} u={} pair={:?}", params.u(), en.pair);
            }
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn signature_paths_agree_and_sextic_count() {
    for p in [13u64, 17, 19, 29, 37, 41, 53, 101, 4093, 4099] {
        let f = fp(p);
        let table = LambdaTable::build(&f).unwrap();
        for seed in 0..5 {
            let Some(params) = random_valid(p, seed * 11 + 3) else { continue };
            let direct = params.trace_signature().unwrap();
            let fast = params.trace_signature_with(|l| table.trace(l));
            assert_eq!(direct, fast);
            if p < 200 {
                assert_eq!(sextic_point_count(&params), p as i64 + 1 - 2 * direct.t_base);
            }
        }
    }
}

#[test]
fn golden_signature_p19() {
    let f = fp(19);
    let params = D6Params::new(f, 2, false).unwrap();
    let sig = params.trace_signature().unwrap();
    let [_, a2, a4, a6] = params.base_curve().cubic_coefficients();
    let n: i64 = 1 + (0..19u64).map(|x| 1 + chi(19, x * x * x + a2 * x * x + a4 * x + a6)).sum::<i64>();
    assert_eq!(sig.t_base, 20 - n);
    let expected: Vec<i64> = params
        .orbit_prym_curves()
        .iter()
        .map(|en| quartic_prym_trace(&params, en.pair.0 as usize - 1, en.pair.1 as usize - 1))
        .collect();
    let mut all = expected.clone();
    all.sort_unstable();
    assert_eq!(sig.all_prym_traces().to_vec(), all);
    assert_eq!(sig.t_base, 4);
    assert_eq!(sig.traces6, [-4, -4, -4, -4, 4, 4]);
    assert_eq!(sig.traces3a, [-4, 4, 4]);
    assert_eq!(sig.traces3b, [-4, -4, 4]);
    assert_eq!(sig.traces3c, [-4, -4, -4]);
}

#[test]
fn base_cubic_roots_and_j_invariants() {
    for p in [13u64, 17, 29, 101, 4093, 65537] {
        let f = fp(p);
        for seed in 0..10 {
            let Some(params) = random_valid(p, seed * 7 + 1) else { continue };
            let w = params.weierstrass().0;
            let curve = params.base_curve();
            for k in [0, 2, 4] {
                assert_eq!(curve.rhs(f.mul(w[k], w[k])), 0);
            }
            let r = params.r();
            // j(E_{r,c}) = -(r - 3)^3 (r - 27) / r.
            let r3 = f.sub(r, 3);
            let j = f.div(f.neg(f.mul(f.mul(r3, f.mul(r3, r3)), f.sub(r, 27))), r).unwrap();
            assert_eq!(curve.j_invariant(), j);
            // Orbit-6 curves have j = -16 (r - 27)^2 / r.
            let e6 = params.orbit_prym_curves()[0];
            let c6 = d6lab_core::curves::EllipticCurve::legendre(&f, e6.e, e6.lambda).unwrap();
            let s = f.sub(r, 27);
            assert_eq!(c6.j_invariant(), f.div(f.neg(f.mul(16, f.mul(s, s))), r).unwrap());
            // -r is a square.
            assert_eq!(f.legendre(f.neg(r)), 1);
        }
    }
}

#[test]
fn lambda_and_e_never_degenerate() {
    for p in [5u64, 7, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
        let f = fp(p);
        let bad = excluded_u_set(&f);
        let forbidden_r: Vec<u64> = {
            let mut v = vec![0, 27 % p, f.neg(27)];
            if let Some(s) = f.sqrt(p - 2) {
                v.push(f.add(23, f.mul(10, s)));
                v.push(f.sub(23, f.mul(10, s)));
            }
            v
        };
        for u in 1..p {
            if bad.contains(&u) {
                continue;
            }
            let params = D6Params::new(f, u, false).unwrap();
            let r = params.r();
            assert!(!forbidden_r.contains(&r), "p={p} u={u} r={r}");
            for en in params.orbit_prym_curves() {
                assert!(en.lambda != 0 && en.lambda != 1 && en.e != 0, "p={p} u={u}");
            }
            let (lb, eb) = params.base_legendre();
            assert!(lb != 0 && lb != 1 && eb != 0);
        }
    }
}

#[test]
fn twist_flips_base_and_c_dependent_entries() {
    let f = fp(4093);
    let table = LambdaTable::build(&f).unwrap();
    for u in [5u64, 77, 1000, 2047] {
        let a = D6Params::new(f, u, false).unwrap();
        let b = a.with_class(true);
        let sa = a.trace_signature_with(|l| table.trace(l));
        let sb = b.trace_signature_with(|l| table.trace(l));
        assert_eq!(sa.t_base, -sb.t_base);
        // Entries without c keep their trace; entries with c flip.
        for (ea, eb) in a.orbit_prym_curves().iter().zip(b.orbit_prym_curves().iter()) {
            let ta = f.legendre(ea.e) as i64 * table.trace(ea.lambda);
            let tb = f.legendre(eb.e) as i64 * table.trace(eb.lambda);
            if ea.e == eb.e {
                assert_eq!(ta, tb);
            } else {
                assert_eq!(ta, -tb);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signature_key_is_class_invariant(idx in 0usize..64, seed in any::<u64>()) {
        let primes = [13u64, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
                      101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179,
                      181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269,
                      271, 277, 281, 283, 293, 307, 311, 313, 317, 331, 337, 347];
        let p = primes[idx];
        let Some(params) = random_valid(p, seed) else { return Ok(()) };
        let table = LambdaTable::build(params.field()).unwrap();
        let key = params.trace_signature_with(|l| table.trace(l)).key();
        for (u, ns) in params.equivalence_orbit() {
            let member = D6Params::new(*params.field(), u, ns).unwrap();
            prop_assert_eq!(member.trace_signature_with(|l| table.trace(l)).key(), key);
        }
    }

    #[test]
    fn hasse_holds_for_every_table_entry(idx in 0usize..6) {
        let p = [5u64, 13, 101, 1009, 4093, 8191][idx];
        let table = LambdaTable::build(&fp(p)).unwrap();
        for l in 2..p {
            let t = table.trace(l);
            prop_assert!(t * t <= 4 * p as i64);
        }
    }
}

