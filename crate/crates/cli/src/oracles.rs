//! The point-count oracle suite: every check compares a formula against a
//! count done another way.

use d6lab_core::family::{excluded_u_set, D6Params, LambdaTable};
use d6lab_core::fields::{is_prime_u64, ExtField, PrimeField};
use d6lab_core::quadcover::{
    enumerate_four_covers, four_prym_weil, four_prym_weil_with, predicted_d2_count, CoverChoices, FourCaches,
    FourCoverDescriptor,
};
use d6lab_core::tricover::{special_genus2_oracle, Direction, Rc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::table_field::TableField;

#[derive(Debug, Clone, Serialize)]
pub struct OracleOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

fn small_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo..hi).filter(|&p| is_prime_u64(p)).collect()
}

/// A random valid (u, c) over one of the primes; primes without valid
/// parameters are redrawn.
fn random_params(rng: &mut ChaCha8Rng, primes: &[u64]) -> D6Params {
    loop {
        let p = *primes.choose(rng).expect("nonempty");
        let f = PrimeField::new(p).expect("prime");
        let bad = excluded_u_set(&f);
        let good: Vec<u64> = (1..p).filter(|u| !bad.contains(u)).collect();
        if let Some(&u) = good.choose(rng) {
            return D6Params::new(f, u, rng.gen_bool(0.5)).expect("valid parameter");
        }
    }
}

/// Trace of c' y^2 = prod (x - r) over the four given roots, by counting.
fn quartic_trace(f: &PrimeField, cprime: u64, roots: &[u64]) -> i64 {
    let p = f.p();
    let mut n = 1 + f.legendre(cprime) as i64;
    for x in 0..p {
        let q = roots.iter().fold(1u64, |acc, &r| f.mul(acc, f.sub(x, r)));
        n += 1 + f.legendre(f.mul(cprime, q)) as i64;
    }
    p as i64 + 1 - n
}

/// Prym trace of the cover branched away from u_i, u_j, counted on the
/// complementary quartic with the twist that splits (u_1, 0).
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

/// (a) The fifteen Legendre-table Prym traces against quartic-model counts.
pub fn prym_quartic(seed: u64, cases: usize) -> OracleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = small_primes(13, 200);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let params = random_params(&mut rng, &primes);
        let f = params.field();
        let table = LambdaTable::build(f).expect("small prime");
        for en in params.orbit_prym_curves() {
            let (i, j) = (en.pair.0 as usize - 1, en.pair.1 as usize - 1);
            let got = f.legendre(en.e) as i64 * table.trace(en.lambda);
            let want = quartic_prym_trace(&params, i, j);
            if got != want {
                failures.push(format!("p={} u={} c={} pair={:?}: {got} vs {want}", f.p(), params.u(), params.c(), en.pair));
            }
        }
    }
    OracleOutcome { name: "prym traces vs quartic counts", cases, failures }
}

/// (b) The sextic vanishes at the six Weierstrass points, the base cubic at
/// u_1^2, u_3^2, u_5^2, and #C(F_p) = p + 1 - 2 t_base.
pub fn root_identities(seed: u64, cases: usize) -> OracleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb);
    let primes = small_primes(13, 200);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let params = random_params(&mut rng, &primes);
        let f = params.field();
        let p = f.p();
        let tag = format!("p={p} u={} c={}", params.u(), params.c());
        let ws = params.weierstrass();
        let w = ws.0;
        let sextic = ws.sextic(f);
        let eval = |x: u64| sextic.iter().rev().fold(0u64, |acc, &c| f.add(f.mul(acc, x), c));
        if w.iter().any(|&x| eval(x) != 0) {
            failures.push(format!("{tag}: sextic does not vanish on the Weierstrass points"));
        }
        let mut sorted = w.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != 6 {
            failures.push(format!("{tag}: Weierstrass points collide"));
        }
        let curve = params.base_curve();
        if [0, 2, 4].iter().any(|&k| curve.rhs(f.mul(w[k], w[k])) != 0) {
            failures.push(format!("{tag}: base cubic misses a root"));
        }
        let c = params.c();
        let mut n = 1 + f.legendre(c) as i64;
        for x in 0..p {
            let s = w.iter().fold(1u64, |acc, &uk| f.mul(acc, f.sub(x, uk)));
            n += 1 + f.legendre(f.mul(c, s)) as i64;
        }
        let t_base = params.trace_signature().map(|s| s.t_base);
        if t_base.as_ref().map(|t| p as i64 + 1 - 2 * t) != Ok(n) {
            failures.push(format!("{tag}: sextic count {n} vs base trace {t_base:?}"));
        }
    }
    OracleOutcome { name: "sextic and base-cubic identities", cases, failures }
}

/// (c) The special genus-2 quotient counted over F_p and F_{p^2} against
/// its predicted elliptic factors, both directions.
pub fn special_genus2(seed: u64, cases: usize) -> OracleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc);
    let primes = small_primes(13, 200);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let params = random_params(&mut rng, &primes);
        for dir in Direction::BOTH {
            if let Err(e) = special_genus2_oracle(params.field(), Rc::of(&params, dir)) {
                failures.push(format!("p={} u={} {dir:?}: {e}", params.p(), params.u()));
            }
        }
    }
    OracleOutcome { name: "special genus-2 Weil polynomial", cases, failures }
}

/// #D_2 over a table field: c_1 w^2 = prod (z^2 - alpha), e' v^2 = prod (z - b).
fn table_d2_count(t: &TableField, theta: Option<usize>, desc: &FourCoverDescriptor) -> i128 {
    let c1 = desc.c1 as usize;
    let e1 = t.embed(desc.e_prime, theta);
    let b: Vec<usize> = desc.b.iter().map(|&x| t.embed(x, theta)).collect();
    let nb: Vec<usize> = b.iter().map(|&x| t.neg(x)).collect();
    let mut n = (1 + t.chi(c1)) * (1 + t.chi(e1));
    for z in 0..t.size() {
        let minus = nb.iter().fold(1, |acc, &nk| t.mul(acc, t.add(z, nk)));
        let plus = b.iter().fold(1, |acc, &bk| t.mul(acc, t.add(z, bk)));
        if minus == 0 {
            n += 1 + t.chi(t.mul(t.mul(e1, c1), plus));
        } else {
            n += (1 + t.chi(t.mul(c1, t.mul(minus, plus)))) * (1 + t.chi(t.mul(e1, minus)));
        }
    }
    n
}

/// First parameter at p with four-cover data; formal parameters are allowed
/// because F_13 and F_17 have no valid ones.
fn fourfold_params(p: u64) -> Option<D6Params> {
    let f = PrimeField::new(p).ok()?;
    (2..p).flat_map(|u| [false, true].map(|ns| (u, ns))).find_map(|(u, ns)| {
        let params = D6Params::new(f, u, ns).ok().or_else(|| D6Params::formal(f, u, ns))?;
        enumerate_four_covers(&params).ok().map(|_| params)
    })
}

/// (d) #D_2(F_{p^k}) for k up to 5 against the predicted Weil data, on ten
/// descriptors over p = 13, 17, 19.
pub fn fourfold_counts(seed: u64) -> OracleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd);
    let mut failures = Vec::new();
    let mut cases = 0;
    for (p, take) in [(13u64, 3usize), (17, 3), (19, 4)] {
        let Some(params) = fourfold_params(p) else {
            failures.push(format!("p={p}: no parameter with four-cover data"));
            continue;
        };
        let descs = enumerate_four_covers(&params).expect("checked above");
        // Mix rational and quadratic descriptors.
        let (mut rat, mut quad): (Vec<_>, Vec<_>) = descs.into_iter().partition(|d| d.rational);
        rat.shuffle(&mut rng);
        quad.shuffle(&mut rng);
        let mut chosen: Vec<FourCoverDescriptor> = Vec::new();
        while chosen.len() < take && (!rat.is_empty() || !quad.is_empty()) {
            let pool = if chosen.len() % 2 == 0 && !rat.is_empty() || quad.is_empty() { &mut rat } else { &mut quad };
            chosen.push(pool.pop().expect("nonempty"));
        }
        let l = ExtField::new(*params.field(), 2).expect("prime");
        for desc in chosen {
            cases += 1;
            let ks: Vec<u32> = if desc.rational { (1..=5).collect() } else { vec![2, 4] };
            for k in ks {
                let t = TableField::new(p, k);
                let theta = (k % 2 == 0).then(|| t.root_of(&l.modulus()).expect("F_p^2 embeds"));
                let counted = table_d2_count(&t, theta, &desc);
                let kk = if desc.rational { k } else { k / 2 };
                match predicted_d2_count(&params, &desc, kk) {
                    Ok(pred) if pred == counted => {}
                    other => failures.push(format!("p={p} u={} pair={:?} k={k}: counted {counted}, predicted {other:?}", params.u(), desc.pair())),
                }
            }
        }
    }
    OracleOutcome { name: "fourfold D_2 counts up to k = 5", cases, failures }
}

/// (e) The degree-480 Weil polynomial does not depend on construction
/// choices.
pub fn four_prym_invariance(seed: u64, cases: usize) -> OracleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe);
    let primes = [19u64, 23, 29, 31];
    let mut failures = Vec::new();
    for _ in 0..cases {
        let params = random_params(&mut rng, &primes);
        let tag = format!("p={} u={} c={}", params.p(), params.u(), params.c());
        let base = match four_prym_weil(&params) {
            Ok(w) => w,
            Err(e) => {
                failures.push(format!("{tag}: {e}"));
                continue;
            }
        };
        if base.degree() != 480 {
            failures.push(format!("{tag}: degree {}", base.degree()));
        }
        let caches = FourCaches::new(params.field());
        for bits in 1..8u8 {
            let choices = CoverChoices { swap_ends: bits & 1 != 0, negate_roots: bits & 2 != 0, other_base_point: bits & 4 != 0 };
            match four_prym_weil_with(&params, choices, &caches) {
                Ok(w) if w.same_polynomial(&base) => {}
                other => failures.push(format!("{tag} {choices:?}: {:?}", other.map(|w| w.degree()))),
            }
        }
    }
    OracleOutcome { name: "fourfold Prym invariance", cases, failures }
}

/// All five oracles with the acceptance case counts.
pub fn run_suite(seed: u64) -> Vec<OracleOutcome> {
    vec![
        prym_quartic(seed, 50),
        root_identities(seed, 50),
        special_genus2(seed, 30),
        fourfold_counts(seed),
        four_prym_invariance(seed, 8),
    ]
}
