use d6lab_core::curves::{extension_trace, WeilFactor};
use d6lab_core::family::{excluded_u_set, D6Params};
use d6lab_core::fields::{ExtField, FiniteField, FqElem, PrimeField};
use d6lab_core::tricover::{
    e2_model, general_cubic, general_curves, general_orbit_roots, general_orbit_traces, general_triple_data,
    general_triple_weil, mult3_signature, special_f_curve, special_f_twist, special_genus2_oracle, special_prym,
    Direction, Rc, TriCoverError,
};
use proptest::prelude::*;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// -sum chi(c f(x)) over F_{p^e}, with f given by integer coefficients.
fn brute_trace<F: FiniteField>(field: &F, c: F::Elem, a2: F::Elem, a4: F::Elem, a6: F::Elem) -> i128 {
    let mut s = 0i128;
    for i in 0..field.order() {
        let x = field.element(i);
        let fx = field.add(field.mul(field.add(field.mul(field.add(x, a2), x), a4), x), a6);
        s += field.quadratic_character(field.mul(c, fx)) as i128;
    }
    -s
}

fn brute_prime_trace(p: u64, c: i64, a2: i64, a4: i64, a6: i64) -> i128 {
    let m = |v: i64| v.rem_euclid(p as i64) as u64;
    let f = fp(p);
    brute_trace(&f, m(c), m(a2), m(a4), m(a6))
}

fn curve_brute<F: FiniteField>(field: &F, curve: &d6lab_core::curves::EllipticCurve<F>) -> i128 {
    let [c, a2, a4, a6] = curve.cubic_coefficients();
    brute_trace(field, c, a2, a4, a6)
}

/// Brute-force traces of curves A and B for a root of degree e.
fn orbit_brute(p: u64, e: u32, root: FqElem, c: u64) -> (i128, i128) {
    if e == 1 {
        let f = fp(p);
        let (a, b) = general_curves(&f, root.as_base().unwrap(), c).unwrap();
        return (curve_brute(&f, &a), curve_brute(&f, &b));
    }
    let l = ExtField::prime(p, e).unwrap();
    let (a, b) = general_curves(&l, root, l.embed(c)).unwrap();
    (curve_brute(&l, &a), curve_brute(&l, &b))
}

fn valid_params(p: u64) -> Vec<D6Params> {
    let f = fp(p);
    let bad = excluded_u_set(&f);
    (1..p)
        .filter(|u| !bad.contains(u))
        .flat_map(|u| [false, true].map(|ns| D6Params::new(f, u, ns).unwrap()))
        .collect()
}

#[test]
fn special_curves_at_r12_p13() {
    // u = 2 over F_13 gives r = 12 (the formal evaluation; see the family tests).
    let f = fp(13);
    let rc = Rc { r: 12, c: 1 };
    let f_curve = special_f_curve(&f, rc).unwrap();
    // F: s^2 = w^3 + 81 w^2 + 864 w + 2304.
    let expected = brute_prime_trace(13, 1, 81, 864, 2304);
    assert_eq!(f_curve.trace().unwrap(), expected);
    assert_eq!(expected, -4);
    // The twist by (81 - 36) = 45 = 6 mod 13, a nonsquare, negates the trace.
    assert_eq!(f.legendre(6), -1);
    assert_eq!(special_f_twist(&f, rc).unwrap().trace().unwrap(), -expected);
}

#[test]
fn e2_model_is_isogenous_to_the_base_curve() {
    for p in [19u64, 23, 29, 101, 4093] {
        for params in valid_params(p).into_iter().step_by(7) {
            let rc = Rc::of(&params, Direction::First);
            let t2 = e2_model(params.field(), rc).unwrap().trace().unwrap();
            assert_eq!(t2, params.base_curve().trace().unwrap(), "p={p} u={}", params.u());
        }
    }
}

#[test]
fn special_prym_matches_brute_force() {
    for p in [19u64, 23, 31, 43] {
        for params in valid_params(p) {
            let sp = special_prym(&params).unwrap();
            for dir in Direction::BOTH {
                let Rc { r, c } = Rc::of(&params, dir);
                let (r, c) = (r as i64, c as i64);
                let p64 = p as i64;
                let t_f = brute_prime_trace(p, 1, 81, 72 * r % p64, 16 * (r * r % p64));
                let twist = ((81 - 3 * r) % p64 * c).rem_euclid(p64);
                let t_tw = brute_prime_trace(p, twist, 81, 72 * r % p64, 16 * (r * r % p64));
                assert_eq!(sp.directions[dir as usize], (t_f, t_tw));
            }
        }
    }
}

#[test]
fn second_direction_is_first_direction_of_dual() {
    for p in [19u64, 29, 4093] {
        for params in valid_params(p).into_iter().step_by(5).take(40) {
            let dual = params.dual();
            let a = special_prym(&params).unwrap();
            let b = special_prym(&dual).unwrap();
            assert_eq!(a.directions[1], b.directions[0]);
            assert_eq!(a.directions[0], b.directions[1]);
            let ma = mult3_signature(&params).unwrap();
            let mb = mult3_signature(&dual).unwrap();
            assert_eq!(ma.directions[1], mb.directions[0]);
            assert!(ma.matches(&mb));
        }
    }
}

#[test]
fn special_root_never_meets_the_general_cubic() {
    for p in [13u64, 19, 4093] {
        let f = fp(p);
        for r in [1u64, 5, 12, 26, 28, p - 1] {
            let h = general_cubic(&f, r);
            let at = h.eval(&f, f.neg(3));
            assert_eq!(at, f.mul(192, f.sub(r, 27)));
        }
    }
}

#[test]
fn general_orbits_at_r12_p13() {
    let f = fp(13);
    let h = general_cubic(&f, 12);
    let scan: Vec<u64> = (0..13).filter(|&x| h.eval(&f, x) == 0).collect();
    let orbits = general_orbit_roots(&f, 12).unwrap();
    let degrees: Vec<u32> = orbits.iter().map(|o| o.0).collect();
    match scan.len() {
        3 => assert_eq!(degrees, vec![1, 1, 1]),
        1 => assert_eq!(degrees, vec![1, 2]),
        0 => assert_eq!(degrees, vec![3]),
        n => panic!("cubic with {n} simple roots"),
    }
    // Each canonical root is a root, and its curves agree with brute force.
    for &(e, v) in &orbits {
        if e > 1 {
            let l = ExtField::prime(13, e).unwrap();
            let lifted = h.map(&l, |a| l.embed(a));
            assert!(l.is_zero(lifted.eval(&l, v)));
        }
        assert_eq!(general_orbit_traces(13, e, v, 1).unwrap(), orbit_brute(13, e, v, 1));
    }
}

#[test]
fn general_factors_are_independent_of_the_root_in_an_orbit() {
    for p in [19u64, 23, 29, 37] {
        for params in valid_params(p).into_iter().step_by(3) {
            let f = params.field();
            for dir in Direction::BOTH {
                let rc = Rc::of(&params, dir);
                for (e, v) in general_orbit_roots(f, rc.r).unwrap() {
                    let base = general_orbit_traces(p, e, v, rc.c).unwrap();
                    if e == 1 {
                        continue;
                    }
                    let l = ExtField::prime(p, e).unwrap();
                    let mut w = v;
                    for _ in 1..e {
                        w = l.frobenius(w);
                        assert_eq!(general_orbit_traces(p, e, w, rc.c).unwrap(), base);
                    }
                }
            }
        }
    }
}

#[test]
fn general_traces_match_brute_force_counts() {
    for p in [19u64, 23] {
        for params in valid_params(p).into_iter().step_by(4) {
            for orbit in general_triple_data(&params, Direction::First).unwrap() {
                let got = (orbit.t_a, orbit.t_b);
                assert_eq!(got, orbit_brute(p, orbit.e, orbit.root, params.c()));
            }
        }
    }
}

#[test]
fn degree_bookkeeping() {
    for p in [19u64, 29, 4093, 65537] {
        for params in valid_params(p).into_iter().step_by(97).take(6) {
            for dir in Direction::BOTH {
                let data = general_triple_data(&params, dir).unwrap();
                assert_eq!(data.iter().map(|o| o.e).sum::<u32>(), 3);
                let factors = general_triple_weil(&params, dir).unwrap();
                let deg: u32 = factors.iter().map(WeilFactor::degree).sum();
                assert_eq!(deg, 12);
            }
            let m = mult3_signature(&params).unwrap();
            assert!(m.directions.iter().all(|w| w.degree() == 16));
        }
    }
}

#[test]
fn golden_mult3_signature_p19_u2() {
    let params = D6Params::new(fp(19), 2, false).unwrap();
    let sp = special_prym(&params).unwrap();
    assert_eq!(sp.directions, GOLDEN_SPECIAL_P19_U2);
    for dir in Direction::BOTH {
        let data = general_triple_data(&params, dir).unwrap();
        let got: Vec<(u32, i128, i128)> = data.iter().map(|o| (o.e, o.t_a, o.t_b)).collect();
        assert_eq!(got, GOLDEN_GENERAL_P19_U2[dir as usize]);
    }
}

const GOLDEN_SPECIAL_P19_U2: [(i128, i128); 2] = [(5, -5), (-4, 4)];
const GOLDEN_GENERAL_P19_U2: [&[(u32, i128, i128)]; 2] = [&[(3, 56, -56)], &[(3, 56, -56)]];

#[test]
fn genus2_oracle_small_cases() {
    special_genus2_oracle(&fp(13), Rc { r: 12, c: 1 }).unwrap();
    special_genus2_oracle(&fp(13), Rc { r: 12, c: 2 }).unwrap();
    for params in valid_params(19).into_iter().chain(valid_params(23)) {
        for dir in Direction::BOTH {
            special_genus2_oracle(params.field(), Rc::of(&params, dir)).unwrap();
        }
    }
    assert!(matches!(
        special_genus2_oracle(&fp(13), Rc { r: 27 % 13, c: 1 }),
        Err(TriCoverError::BadParameter { .. })
    ));
}

/// x^2 - 29, x^2 + 1 and x^3 + x^2 + 2 all split, by scanning.
fn splits_completely(p: u64) -> bool {
    let roots = |g: &dyn Fn(u64) -> u64| (0..p).filter(|&x| g(x) % p == 0).count();
    roots(&|x| (x * x + p * 29 - 29) % p) == 2
        && roots(&|x| (x * x + 1) % p) == 2
        && roots(&|x| (x * x % p * x + x * x + 2) % p) == 3
}

#[test]
fn extraordinary_special_pryms_agree() {
    let mut seen = 0;
    for p in (5u64..3000).filter(|&p| d6lab_core::fields::is_prime_u64(p) && splits_completely(p)) {
        let f = fp(p);
        let rs: Vec<u64> = (1..p).filter(|&x| (x * x + 1 + 27 * (p - x)) % p == 0).collect();
        assert_eq!(rs.len(), 2);
        for &r in &rs {
            // 81 - 3r is 3 times a square and 27/r - 1 is a square.
            assert_eq!(f.legendre(f.mul(3, f.sub(81, f.mul(3, r)))), 1, "p={p} r={r}");
            assert_eq!(f.legendre(f.sub(f.div(27, r).unwrap(), 1)), 1, "p={p} r={r}");
        }
        let bad = excluded_u_set(&f);
        let u_for = |r: u64| (1..p).find(|&u| !bad.contains(&u) && d6lab_core::family::r_from_u(&f, u).ok() == Some(r));
        let (Some(u1), Some(u2)) = (u_for(rs[0]), u_for(rs[1])) else { continue };
        let a = special_prym(&D6Params::new(f, u1, false).unwrap()).unwrap();
        let b = special_prym(&D6Params::new(f, u2, false).unwrap()).unwrap();
        assert!(a.matches(&b), "p={p}");
        seen += 1;
    }
    assert!(seen >= 3, "only {seen} split primes checked");
}

fn oracle_case() -> impl Strategy<Value = (u64, u64, bool)> {
    prop::sample::select(vec![19u64, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97])
        .prop_flat_map(|p| (Just(p), 1..p, any::<bool>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn genus2_oracle_random((p, u, ns) in oracle_case()) {
        let f = fp(p);
        prop_assume!(!excluded_u_set(&f).contains(&u));
        let params = D6Params::new(f, u, ns).unwrap();
        for dir in Direction::BOTH {
            prop_assert!(special_genus2_oracle(&f, Rc::of(&params, dir)).is_ok());
        }
    }

    #[test]
    fn mult3_power_sums_match_component_traces((p, u, ns) in oracle_case()) {
        let f = fp(p);
        prop_assume!(!excluded_u_set(&f).contains(&u));
        let params = D6Params::new(f, u, ns).unwrap();
        let m = mult3_signature(&params).unwrap();
        let sp = special_prym(&params).unwrap();
        for dir in Direction::BOTH {
            let (a, b) = sp.directions[dir as usize];
            let mut expected = extension_trace(a, p as u128, 6) + extension_trace(b, p as u128, 6);
            for o in general_triple_data(&params, dir).unwrap() {
                let q = (p as u128).pow(o.e);
                expected += o.e as i128 * (extension_trace(o.t_a, q, 6 / o.e) + extension_trace(o.t_b, q, 6 / o.e));
            }
            prop_assert_eq!(m.directions[dir as usize].power_sum(6), expected);
        }
    }
}
