use std::collections::{BTreeMap, BTreeSet};

use d6lab_core::curves::{EllipticCurve, WeilFactor};
use d6lab_core::family::{excluded_u_set, D6Params};
use d6lab_core::fields::{ExtField, FiniteField, FqElem, PrimeField};
use d6lab_core::quadcover::{
    companion_curves, d2_direct_count_oracle, enumerate_four_covers, enumerate_four_covers_with, four_prym_weil,
    four_prym_weil_with, predicted_d2_count, CoverChoices, FourCaches, FourCoverDescriptor,
};
use proptest::prelude::*;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn valid_params(p: u64) -> Vec<D6Params> {
    let f = fp(p);
    let bad = excluded_u_set(&f);
    (1..p)
        .filter(|u| !bad.contains(u))
        .flat_map(|u| [false, true].map(|ns| D6Params::new(f, u, ns).unwrap()))
        .collect()
}

/// F_{p^k} built from a primitive polynomial found by scanning, with
/// elements stored as base-p digit vectors packed into an index and
/// multiplication through exp/log tables.
struct TableField {
    p: u64,
    k: u32,
    q: usize,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl TableField {
    fn new(p: u64, k: u32) -> Self {
        let q = p.pow(k) as usize;
        // Monic modulus x^k + m_{k-1} x^{k-1} + ... + m_0, coefficients as digits.
        for tail in 0..q {
            let m: Vec<u64> = (0..k).map(|i| (tail as u64 / p.pow(i)) % p).collect();
            if m[0] == 0 {
                continue;
            }
            let mut exp = Vec::with_capacity(q - 1);
            let mut log = vec![u32::MAX; q];
            let mut cur = vec![0u64; k as usize];
            cur[0] = 1;
            let mut primitive = true;
            for i in 0..q - 1 {
                let idx = Self::pack(p, &cur);
                if log[idx] != u32::MAX {
                    primitive = false;
                    break;
                }
                log[idx] = i as u32;
                exp.push(idx as u32);
                // cur *= x
                let top = cur[k as usize - 1];
                for j in (1..k as usize).rev() {
                    cur[j] = cur[j - 1];
                }
                cur[0] = 0;
                for j in 0..k as usize {
                    cur[j] = (cur[j] + (p - m[j]) * top) % p;
                }
            }
            if primitive {
                return TableField { p, k, q, exp, log };
            }
        }
        unreachable!("a primitive polynomial always exists")
    }

    fn pack(p: u64, digits: &[u64]) -> usize {
        digits.iter().rev().fold(0u64, |acc, &d| acc * p + d) as usize
    }

    fn digits(&self, a: usize) -> Vec<u64> {
        (0..self.k).map(|i| (a as u64 / self.p.pow(i)) % self.p).collect()
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        Self::pack(self.p, &s)
    }

    fn neg(&self, a: usize) -> usize {
        let s: Vec<u64> = self.digits(a).iter().map(|&u| (self.p - u) % self.p).collect();
        Self::pack(self.p, &s)
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a] as usize + self.log[b] as usize) % (self.q - 1);
        self.exp[e] as usize
    }

    fn chi(&self, a: usize) -> i128 {
        match a {
            0 => 0,
            _ if self.log[a] % 2 == 0 => 1,
            _ => -1,
        }
    }

    /// Some root of the given monic polynomial (coefficients low to high).
    fn root_of(&self, poly: &[u64]) -> Option<usize> {
        (0..self.q).find(|&z| {
            let mut acc = 0;
            for &c in poly.iter().rev() {
                acc = self.add(self.mul(acc, z), c as usize);
            }
            acc == 0
        })
    }
}

/// Maps library F_{p^2} elements into a table field of even degree.
struct Embedding<'a> {
    t: &'a TableField,
    theta: Option<usize>,
}

impl Embedding<'_> {
    fn map(&self, x: FqElem) -> usize {
        match x.as_base() {
            Some(v) => v as usize,
            None => {
                let th = self.theta.expect("quadratic element needs an even degree");
                self.t.add(x.0[0] as usize, self.t.mul(x.0[1] as usize, th))
            }
        }
    }
}

/// #D_2 over the table field: c_1 w^2 = prod (z^2 - alpha) and e' v^2 = prod (z - b).
fn table_d2_count(t: &TableField, emb: &Embedding, desc: &FourCoverDescriptor) -> i128 {
    let c1 = desc.c1 as usize;
    let e1 = emb.map(desc.e_prime);
    let b: Vec<usize> = desc.b.iter().map(|&x| emb.map(x)).collect();
    let nb: Vec<usize> = b.iter().map(|&x| t.neg(x)).collect();
    let mut n = (1 + t.chi(c1)) * (1 + t.chi(e1));
    for z in 0..t.q {
        let minus = b.iter().fold(1, |acc, &bk| t.mul(acc, t.add(z, t.neg(bk))));
        let plus = nb.iter().fold(1, |acc, &nk| t.mul(acc, t.add(z, t.neg(nk))));
        if minus == 0 {
            // The ratio w / v is sqrt(c_1 e' prod (z + b)) / (c_1 e') up to squares.
            n += 1 + t.chi(t.mul(t.mul(e1, c1), plus));
        } else {
            n += (1 + t.chi(t.mul(c1, t.mul(minus, plus)))) * (1 + t.chi(t.mul(e1, minus)));
        }
    }
    n
}

fn check_table_oracle(params: &D6Params, desc: &FourCoverDescriptor, kmax: u32) {
    let p = params.p();
    let l = ExtField::new(*params.field(), 2).unwrap();
    let ks: Vec<u32> = if desc.rational { (1..=kmax).collect() } else { (2..=kmax).step_by(2).collect() };
    for k in ks {
        let t = TableField::new(p, k);
        let theta = (k % 2 == 0).then(|| t.root_of(&l.modulus()).unwrap());
        let counted = table_d2_count(&t, &Embedding { t: &t, theta }, desc);
        let kk = if desc.rational { k } else { k / 2 };
        let predicted = predicted_d2_count(params, desc, kk).unwrap();
        assert_eq!(counted, predicted, "p={p} u={} pair={:?} k={k}", params.u(), desc.pair());
    }
}

#[test]
fn table_field_is_a_field() {
    let t = TableField::new(7, 3);
    assert_eq!(t.q, 343);
    for a in 1..t.q {
        // a^(q-1) = 1 and a + (-a) = 0.
        assert_eq!(t.add(a, t.neg(a)), 0);
        let inv = t.exp[(t.q - 1 - t.log[a] as usize) % (t.q - 1)] as usize;
        assert_eq!(t.mul(a, inv), 1);
    }
    // Distributivity on a sample.
    for (a, b, c) in [(5usize, 100, 300), (17, 42, 200), (1, 2, 3)] {
        assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
    }
    assert_eq!((1..t.q).filter(|&a| t.chi(a) == 1).count(), 171);
}

#[test]
fn one_hundred_twenty_covers() {
    for params in valid_params(19).into_iter().chain(valid_params(4093).into_iter().step_by(501)) {
        let descs = enumerate_four_covers(&params).unwrap();
        assert_eq!(descs.len(), 120);
        let mut per_pair: BTreeMap<(u8, u8), BTreeSet<u8>> = BTreeMap::new();
        for d in &descs {
            per_pair.entry(d.pair()).or_default().insert(d.signs);
            assert!(d.a.iter().all(|&a| a != 0));
            assert_eq!(d.a.iter().collect::<BTreeSet<_>>().len(), 4);
        }
        assert_eq!(per_pair.len(), 15);
        assert!(per_pair.values().all(|s| s.len() == 8));
    }
}

#[test]
fn global_negation_gives_the_same_covers() {
    for params in valid_params(23).into_iter().step_by(3) {
        let base = enumerate_four_covers(&params).unwrap();
        let neg = enumerate_four_covers_with(&params, CoverChoices { negate_roots: true, ..Default::default() }).unwrap();
        let f = params.field();
        let l = ExtField::new(*f, 2).unwrap();
        for (a, b) in base.iter().zip(&neg) {
            assert_eq!(a.pair(), b.pair());
            let nb: Vec<FqElem> = b.b.iter().map(|&x| l.neg(x)).collect();
            assert_eq!(a.b.to_vec(), nb);
            let ta = companion_curves(&l, a).unwrap().map(|e| e.trace().unwrap());
            let mut tb = companion_curves(&l, b).unwrap().map(|e| e.trace().unwrap());
            tb.sort();
            let mut ta_sorted = ta;
            ta_sorted.sort();
            assert_eq!(ta_sorted, tb);
        }
    }
}

#[test]
fn companion_curves_are_geometrically_the_square() {
    // E+ and E- are twists of each other over F_{p^2}: equal j-invariants.
    for params in valid_params(29).into_iter().step_by(4) {
        let l = ExtField::new(*params.field(), 2).unwrap();
        for d in enumerate_four_covers(&params).unwrap() {
            let [ep, em] = companion_curves(&l, &d).unwrap();
            assert_eq!(ep.j_invariant(), em.j_invariant());
        }
    }
}

#[test]
fn prym_is_invariant_under_construction_choices() {
    for p in [19u64, 23, 29] {
        for params in valid_params(p).into_iter().step_by(5) {
            let caches = FourCaches::new(params.field());
            let base = four_prym_weil(&params).unwrap();
            assert_eq!(base.degree(), 480);
            for bits in 1..8u8 {
                let choices = CoverChoices {
                    swap_ends: bits & 1 != 0,
                    negate_roots: bits & 2 != 0,
                    other_base_point: bits & 4 != 0,
                };
                let w = four_prym_weil_with(&params, choices, &caches).unwrap();
                assert!(w.same_polynomial(&base), "p={p} u={} choices={choices:?}", params.u());
            }
        }
    }
}

#[test]
fn prym_is_invariant_across_the_equivalence_orbit() {
    for p in [19u64, 23, 31] {
        for params in valid_params(p).into_iter().step_by(7) {
            let base = four_prym_weil(&params).unwrap();
            for (u, ns) in params.equivalence_orbit() {
                let other = D6Params::new(*params.field(), u, ns).unwrap();
                assert!(four_prym_weil(&other).unwrap().same_polynomial(&base), "p={p} u={} -> u={u}", params.u());
            }
        }
    }
}

#[test]
fn quadratic_slots_pair_up() {
    for params in valid_params(31).into_iter().step_by(3) {
        let w = four_prym_weil(&params).unwrap();
        let rational = enumerate_four_covers(&params).unwrap().iter().filter(|d| d.rational).count();
        let ell = w.factors().iter().filter(|f| matches!(f, WeilFactor::Ell { .. })).count();
        let res = w.factors().iter().filter(|f| matches!(f, WeilFactor::ResScalars { e: 2, .. })).count();
        assert_eq!(ell, 2 * rational);
        assert_eq!(ell + 2 * res, 240);
    }
}

#[test]
fn at_most_26_geometric_factors() {
    let mut generic = 0;
    for p in [19u64, 101, 4093] {
        for params in valid_params(p).into_iter().step_by(61).take(5) {
            let l = ExtField::new(*params.field(), 2).unwrap();
            let js: BTreeSet<FqElem> = enumerate_four_covers(&params)
                .unwrap()
                .iter()
                .flat_map(|d| companion_curves(&l, d).unwrap())
                .map(|e: EllipticCurve<ExtField>| e.j_invariant())
                .collect();
            assert!(js.len() <= 26, "p={p} u={}: {} j-invariants", params.u(), js.len());
            if p > 1000 && js.len() == 26 {
                generic += 1;
            }
        }
    }
    assert!(generic > 0, "no large-p sample reached 26 distinct j-invariants");
}

#[test]
fn library_d2_oracle_passes() {
    for p in [19u64, 23] {
        for params in valid_params(p).into_iter().step_by(9) {
            for d in enumerate_four_covers(&params).unwrap().iter().step_by(11) {
                d2_direct_count_oracle(&params, d, 2).unwrap();
            }
        }
    }
}

#[test]
fn table_d2_oracle_at_formal_u2_p13() {
    let params = D6Params::formal(fp(13), 2, false).unwrap();
    let descs = enumerate_four_covers(&params).unwrap();
    let first = &descs[0];
    assert_eq!(first.pair(), (1, 2));
    check_table_oracle(&params, first, 5);
    let counts: Vec<i128> = (1..=if first.rational { 5 } else { 2 })
        .map(|k| predicted_d2_count(&params, first, k).unwrap())
        .collect();
    assert_eq!(counts, GOLDEN_D2_U2_P13);
}

const GOLDEN_D2_U2_P13: &[i128] = &[224, 28728];

#[test]
fn table_d2_oracle_samples() {
    let mut checked = 0;
    for p in [17u64, 19] {
        let f = fp(p);
        let params: Vec<D6Params> = match valid_params(p) {
            v if v.is_empty() => (2..p).filter_map(|u| D6Params::formal(f, u, false)).take(2).collect(),
            v => v.into_iter().step_by(11).take(2).collect(),
        };
        for params in params {
            for d in enumerate_four_covers(&params).unwrap().iter().step_by(29) {
                check_table_oracle(&params, d, if p == 17 { 4 } else { 3 });
                checked += 1;
            }
        }
    }
    assert!(checked >= 10, "{checked} descriptors");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn swapping_ends_keeps_the_prym(p in prop::sample::select(vec![37u64, 41, 43, 47, 53]), u in 2u64..37, ns: bool) {
        let f = fp(p);
        prop_assume!(!excluded_u_set(&f).contains(&u));
        let params = D6Params::new(f, u, ns).unwrap();
        let caches = FourCaches::new(&f);
        let a = four_prym_weil_with(&params, CoverChoices::default(), &caches).unwrap();
        let b = four_prym_weil_with(&params, CoverChoices { swap_ends: true, ..Default::default() }, &caches).unwrap();
        prop_assert!(a.same_polynomial(&b));
    }
}
