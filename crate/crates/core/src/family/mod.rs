//! The D6 family D_{u,c}: parameters, Weierstrass points, the twelve-fold
//! equivalence, and the fifteen double-cover Pryms.

pub(crate) mod table;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::curves::{CurveError, EllipticCurve};
use crate::fields::PrimeField;

pub use table::{LambdaTable, ResourceLimit, TABLE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("u = {u} is a bad parameter over F_{p}")]
    BadParameter { u: u64, p: u64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Elements of F_p^x that give singular curves or extra automorphisms.
pub fn u_bad_set(f: &PrimeField) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let push_pm = |v: u64, out: &mut BTreeSet<u64>| {
        out.insert(v);
        out.insert(f.neg(v));
    };
    push_pm(1, &mut out);
    push_pm(3, &mut out);
    if let Some(s3) = f.sqrt(3) {
        push_pm(s3, &mut out);
        let t = f.add(s3, s3);
        push_pm(f.add(3, t), &mut out);
        push_pm(f.sub(3, t), &mut out);
    }
    if let (Some(i), Some(s2)) = (f.sqrt(f.neg(1)), f.sqrt(2)) {
        push_pm(f.add(i, s2), &mut out);
        push_pm(f.sub(i, s2), &mut out);
    }
    if let (Some(sm2), Some(s2)) = (f.sqrt(f.neg(2)), f.sqrt(2)) {
        for a in [f.add(1, sm2), f.sub(1, sm2)] {
            for b in [f.add(1, s2), f.sub(1, s2)] {
                push_pm(f.mul(a, b), &mut out);
            }
        }
    }
    out.remove(&0);
    out
}

/// U_bad together with +-sqrt(-3), where r = 27 and the six Weierstrass
/// points collapse to two. These are all the units that give no curve.
pub fn excluded_u_set(f: &PrimeField) -> BTreeSet<u64> {
    let mut out = u_bad_set(f);
    if let Some(s) = f.sqrt(f.neg(3)) {
        out.insert(s);
        out.insert(f.neg(s));
    }
    out
}

/// r = -u^2 (u^2 - 9)^2 / (u^2 - 1)^2.
pub fn r_from_u(f: &PrimeField, u: u64) -> Result<u64, FamilyError> {
    r_checked(f, u, &excluded_u_set(f))
}

fn r_checked(f: &PrimeField, u: u64, bad_set: &BTreeSet<u64>) -> Result<u64, FamilyError> {
    let bad = || FamilyError::BadParameter { u, p: f.p() };
    if u % f.p() == 0 || bad_set.contains(&(u % f.p())) {
        return Err(bad());
    }
    r_unchecked(f, u).ok_or_else(bad)
}

fn r_unchecked(f: &PrimeField, u: u64) -> Option<u64> {
    let u2 = f.mul(u, u);
    let a = f.sub(u2, 9);
    let num = f.neg(f.mul(u2, f.mul(a, a)));
    let d = f.sub(u2, 1);
    f.div(num, f.mul(d, d))
}

/// r + 729 / r.
pub fn coarse_invariant_of_r(f: &PrimeField, r: u64) -> u64 {
    f.add(r, f.div(729 % f.p(), r).expect("r is nonzero for good u"))
}

pub fn coarse_invariant(f: &PrimeField, u: u64) -> Result<u64, FamilyError> {
    Ok(coarse_invariant_of_r(f, r_from_u(f, u)?))
}

/// The x-coordinates u_1..u_6 of the Weierstrass points, in the fixed order
/// u, -u, (u+3)/(u-1), -(u+3)/(u-1), (u-3)/(u+1), -(u-3)/(u+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WeierstrassSet(pub [u64; 6]);

impl WeierstrassSet {
    /// Coefficients of prod (x - u_k), constant first.
    pub fn sextic(&self, f: &PrimeField) -> [u64; 7] {
        let mut c = vec![1u64];
        for &uk in &self.0 {
            let mut next = vec![0u64; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] = f.add(next[i + 1], ci);
                next[i] = f.sub(next[i], f.mul(ci, uk));
            }
            c = next;
        }
        c.try_into().unwrap()
    }
}

pub fn weierstrass_points(f: &PrimeField, u: u64) -> Result<WeierstrassSet, FamilyError> {
    let r = r_from_u(f, u)?;
    Ok(weierstrass_unchecked(f, u % f.p(), r))
}

fn weierstrass_unchecked(f: &PrimeField, u: u64, r: u64) -> WeierstrassSet {
    let u3 = f.div(f.add(u, 3), f.sub(u, 1)).unwrap();
    let u5 = f.div(f.sub(u, 3), f.add(u, 1)).unwrap();
    let w = WeierstrassSet([u, f.neg(u), u3, f.neg(u3), u5, f.neg(u5)]);
    let expected = [r, 0, f.sub(81, f.mul(2, r)), 0, f.sub(r, 18), 0, 1];
    assert_eq!(w.sextic(f), expected, "sextic identity fails at u = {u}");
    w
}

/// A point (u, c) of the family with c reduced to its square class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct D6Params {
    field: PrimeField,
    u: u64,
    nonsquare: bool,
    r: u64,
    w: WeierstrassSet,
}

impl D6Params {
    /// `nonsquare` selects c = smallest quadratic nonresidue, else c = 1.
    pub fn new(field: PrimeField, u: u64, nonsquare: bool) -> Result<Self, FamilyError> {
        Self::with_bad_set(field, u, nonsquare, &excluded_u_set(&field))
    }

    /// Evaluates the family formulas at any u with u(u^2 - 1) nonzero, skipping
    /// the U_bad check. Only for inspecting the formulas at excluded points.
    pub fn formal(field: PrimeField, u: u64, nonsquare: bool) -> Option<Self> {
        let u = u % field.p();
        if u == 0 {
            return None;
        }
        let r = r_unchecked(&field, u)?;
        if r == 0 {
            return None;
        }
        let w = weierstrass_unchecked(&field, u, r);
        Some(D6Params { field, u, nonsquare, r, w })
    }

    /// As [`D6Params::new`] with a precomputed `excluded_u_set(field)`.
    pub fn with_bad_set(field: PrimeField, u: u64, nonsquare: bool, bad: &BTreeSet<u64>) -> Result<Self, FamilyError> {
        let r = r_checked(&field, u, bad)?;
        let u = u % field.p();
        let w = weierstrass_unchecked(&field, u, r);
        Ok(D6Params { field, u, nonsquare, r, w })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn nonsquare(&self) -> bool {
        self.nonsquare
    }

    /// The concrete twist representative.
    pub fn c(&self) -> u64 {
        if self.nonsquare {
            self.field.smallest_nonresidue()
        } else {
            1
        }
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn coarse_invariant(&self) -> u64 {
        coarse_invariant_of_r(&self.field, self.r)
    }

    pub fn weierstrass(&self) -> WeierstrassSet {
        self.w
    }

    pub fn with_class(&self, nonsquare: bool) -> Self {
        D6Params { nonsquare, ..*self }
    }

    /// The partner (3/u, -c), which has r' = 729/r.
    pub fn dual(&self) -> Self {
        let f = &self.field;
        let u = f.div(3, self.u).unwrap();
        D6Params::new(*f, u, self.nonsquare ^ (f.legendre(f.neg(1)) == -1)).expect("U_bad is stable under u -> 3/u")
    }

    /// All parameter pairs giving a curve isomorphic to this one, deduplicated
    /// and sorted.
    pub fn equivalence_orbit(&self) -> Vec<(u64, bool)> {
        let f = &self.field;
        let u = self.u;
        let flip = f.legendre(f.neg(1)) == -1;
        let first = [
            u,
            f.div(f.add(u, 3), f.sub(u, 1)).unwrap(),
            f.div(f.sub(u, 3), f.add(u, 1)).unwrap(),
        ];
        let second = [
            f.div(3, u).unwrap(),
            f.div(f.mul(3, f.sub(u, 1)), f.add(u, 3)).unwrap(),
            f.div(f.mul(3, f.add(u, 1)), f.sub(u, 3)).unwrap(),
        ];
        let mut out: Vec<(u64, bool)> = Vec::with_capacity(12);
        for v in first {
            out.push((v, self.nonsquare));
            out.push((f.neg(v), self.nonsquare));
        }
        for v in second {
            out.push((v, self.nonsquare ^ flip));
            out.push((f.neg(v), self.nonsquare ^ flip));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn canonical_class(&self) -> CurveClass {
        let (u, nonsquare) = self.equivalence_orbit()[0];
        CurveClass { u, nonsquare, coarse: self.coarse_invariant() }
    }

    /// E_{r,c}: c y^2 = x^3 + (r - 18) x^2 + (81 - 2r) x + r.
    pub fn base_curve(&self) -> EllipticCurve<PrimeField> {
        let f = &self.field;
        let r = self.r;
        EllipticCurve::cubic(f, self.c(), f.sub(r, 18), f.sub(81, f.mul(2, r)), r)
            .expect("E_{r,c} is nonsingular for good u")
    }

    /// Legendre parameter and twist of E_{r,c} after moving u_1^2 to 0 and
    /// u_3^2 to 1.
    pub fn base_legendre(&self) -> (u64, u64) {
        let f = &self.field;
        let w = self.weierstrass().0;
        let s1 = f.mul(w[0], w[0]);
        let s3 = f.sub(f.mul(w[2], w[2]), s1);
        let s5 = f.sub(f.mul(w[4], w[4]), s1);
        (f.div(s5, s3).unwrap(), f.mul(self.c(), s3))
    }

    /// The fifteen (lambda, e) pairs, orbit by orbit.
    pub fn orbit_prym_curves(&self) -> [OrbitEntry; 15] {
        let f = &self.field;
        let u = self.u;
        let c = self.c();
        let m = |vals: &[u64]| vals.iter().fold(1u64, |acc, &v| f.mul(acc, v));
        let um3 = f.sub(u, 3);
        let um1 = f.sub(u, 1);
        let up1 = f.add(u, 1);
        let up3 = f.add(u, 3);
        let usq3 = f.add(f.mul(u, u), 3);
        let neg = |v: u64| f.neg(v);

        let l6 = f.div(f.mul(4, u), f.mul(um1, up3)).unwrap();
        let l3a = f.div(f.mul(16, f.mul(u, u)), f.mul(usq3, usq3)).unwrap();
        let l3b = f.div(m(&[um3, um3, up1, up1]), f.mul(usq3, usq3)).unwrap();
        let l3c = f.div(m(&[um1, um1, up3, up3]), f.mul(usq3, usq3)).unwrap();

        use Orbit::*;
        let e = |orbit, i, j, lambda, e| OrbitEntry { orbit, pair: (i, j), lambda, e };
        [
            e(Six, 1, 4, l6, neg(m(&[u, um3, up1]))),
            e(Six, 1, 5, l6, m(&[u, um3, up1])),
            e(Six, 2, 3, l6, neg(m(&[c, u, um3, um1, up1, up3, usq3]))),
            e(Six, 2, 6, l6, m(&[c, u, usq3])),
            e(Six, 3, 6, l6, m(&[c, um3, up1, usq3])),
            e(Six, 4, 5, l6, m(&[c, um1, up3, usq3])),
            e(ThreeA, 1, 2, l3a, neg(m(&[um1, up1, up3, um3]))),
            e(ThreeA, 3, 5, l3a, m(&[c, um3, up1, usq3])),
            e(ThreeA, 4, 6, l3a, m(&[c, um1, up3, usq3])),
            e(ThreeB, 1, 3, l3b, neg(m(&[u, um1, up3]))),
            e(ThreeB, 2, 4, l3b, neg(m(&[c, u, usq3]))),
            e(ThreeB, 5, 6, l3b, neg(m(&[c, um1, up3, usq3]))),
            e(ThreeC, 1, 6, l3c, m(&[u, um3, up1])),
            e(ThreeC, 2, 5, l3c, m(&[c, u, usq3])),
            e(ThreeC, 3, 4, l3c, neg(m(&[c, um3, up1, usq3]))),
        ]
    }

    /// Signature with Legendre traces supplied by `legendre_trace(lambda)`
    /// (the trace of y^2 = x(x-1)(x-lambda)).
    pub fn trace_signature_with(&self, legendre_trace: impl Fn(u64) -> i64) -> TraceSignature {
        let f = &self.field;
        let (lb, eb) = self.base_legendre();
        let t_base = f.legendre(eb) as i64 * legendre_trace(lb);
        let entries = self.orbit_prym_curves();
        let traces: Vec<i64> = entries.iter().map(|en| f.legendre(en.e) as i64 * legendre_trace(en.lambda)).collect();
        TraceSignature::new(f.p(), t_base, &traces)
    }

    /// Signature with every trace counted directly on its curve.
    pub fn trace_signature(&self) -> Result<TraceSignature, FamilyError> {
        let f = &self.field;
        let t_base = self.base_curve().trace()? as i64;
        let mut traces = Vec::with_capacity(15);
        for en in self.orbit_prym_curves() {
            traces.push(EllipticCurve::legendre(f, en.e, en.lambda)?.trace()? as i64);
        }
        Ok(TraceSignature::new(f.p(), t_base, &traces))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Orbit {
    Six,
    ThreeA,
    ThreeB,
    ThreeC,
}

impl Orbit {
    pub fn label(&self) -> &'static str {
        match self {
            Orbit::Six => "6",
            Orbit::ThreeA => "3a",
            Orbit::ThreeB => "3b",
            Orbit::ThreeC => "3c",
        }
    }
}

/// One row of the double-cover table: the Prym of d z^2 = (x - u_i)(x - u_j)
/// is e y^2 = x (x - 1)(x - lambda).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitEntry {
    pub orbit: Orbit,
    pub pair: (u8, u8),
    pub lambda: u64,
    pub e: u64,
}

/// Canonical representative of an isomorphism class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CurveClass {
    pub u: u64,
    pub nonsquare: bool,
    pub coarse: u64,
}

impl CurveClass {
    pub fn params(&self, field: PrimeField) -> D6Params {
        D6Params::new(field, self.u, self.nonsquare).expect("class representatives are valid")
    }
}

/// Base trace plus the fifteen Prym traces, each orbit as a sorted multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TraceSignature {
    pub t_base: i64,
    pub traces6: [i64; 6],
    pub traces3a: [i64; 3],
    pub traces3b: [i64; 3],
    pub traces3c: [i64; 3],
}

impl TraceSignature {
    /// `traces` in the table order of [`D6Params::orbit_prym_curves`].
    fn new(p: u64, t_base: i64, traces: &[i64]) -> Self {
        assert_eq!(traces.len(), 15);
        for &t in std::iter::once(&t_base).chain(traces) {
            assert!((t as i128).pow(2) <= 4 * p as i128, "Hasse bound violated: t = {t}, p = {p}");
        }
        let sorted = |s: &[i64]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v
        };
        TraceSignature {
            t_base,
            traces6: sorted(&traces[0..6]).try_into().unwrap(),
            traces3a: sorted(&traces[6..9]).try_into().unwrap(),
            traces3b: sorted(&traces[9..12]).try_into().unwrap(),
            traces3c: sorted(&traces[12..15]).try_into().unwrap(),
        }
    }

    /// All fifteen Prym traces as one sorted multiset.
    pub fn all_prym_traces(&self) -> [i64; 15] {
        let mut v: Vec<i64> = self
            .traces6
            .iter()
            .chain(&self.traces3a)
            .chain(&self.traces3b)
            .chain(&self.traces3c)
            .copied()
            .collect();
        v.sort_unstable();
        v.try_into().unwrap()
    }

    /// The doubly-isogenous key: base trace and the fifteen-trace multiset.
    pub fn key(&self) -> (i64, [i64; 15]) {
        (self.t_base, self.all_prym_traces())
    }
}

/// Every valid (u, c) over F_p grouped into classes; each class appears once
/// with its canonical representative, orbit size included.
pub fn enumerate_class_params(f: &PrimeField) -> Vec<(CurveClass, usize)> {
    let bad = excluded_u_set(f);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for u in 1..f.p() {
        if bad.contains(&u) {
            continue;
        }
        for nonsquare in [false, true] {
            if seen.contains(&(u, nonsquare)) {
                continue;
            }
            let params = D6Params::with_bad_set(*f, u, nonsquare, &bad).expect("u is good");
            let orbit = params.equivalence_orbit();
            for &m in &orbit {
                seen.insert(m);
            }
            out.push((params.canonical_class(), orbit.len()));
        }
    }
    out.sort_unstable();
    out
}
