//! Deterministic root finding for totally split polynomials over F_p.
//!
//! Fifteen curves from the D6 family are evaluated at the generic root v of
//! f, and Schoof's algorithm runs over F_p[v]/(f). Roots whose curves have
//! different traces modulo some l are separated by a zero divisor. If two
//! generic parameters never share all fifteen traces, every split f is
//! factored without randomness.

mod algebra;
mod schoof;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::family::{D6Params, LambdaTable, ResourceLimit};
use crate::fields::{is_prime_u64, poly_gcd, PrimeField, UniPoly};

pub use algebra::{algebra_invert, EtaleAlgebra, EtaleElem, Inverse, ZeroDivisorSignal};
pub use schoof::{division_polynomial, schoof_trace_mod_l, ShortCurve};

/// The parameter shifts u, u - 22, u - 30.
pub const SHIFTS: [u64; 3] = [0, 22, 30];

/// The five curves attached to one parameter, in tuple order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyCurve {
    Base,
    Six,
    ThreeA,
    ThreeB,
    ThreeC,
}

pub const FAMILY_CURVES: [FamilyCurve; 5] =
    [FamilyCurve::Base, FamilyCurve::Six, FamilyCurve::ThreeA, FamilyCurve::ThreeB, FamilyCurve::ThreeC];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("the polynomial is not a product of distinct linear factors")]
    NotTotallySplit,
    #[error("the factor with coefficients {part:?} has components sharing all fifteen traces")]
    ConjectureViolation { part: Vec<u64> },
    #[error(transparent)]
    Resource(#[from] ResourceLimit),
}

/// Fifteen traces, shift-major: index 5 * s + k is curve `FAMILY_CURVES[k]`
/// at parameter u - `SHIFTS[s]`. The base curve has c = 1 and the orbit
/// curves are Legendre curves with e = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FifteenTuple(pub [i64; 15]);

impl FifteenTuple {
    pub fn at(&self, shift: usize, curve: FamilyCurve) -> i64 {
        let k = FAMILY_CURVES.iter().position(|&c| c == curve).unwrap();
        self.0[5 * shift + k]
    }
}

/// 0, +-1, +-3 and +-sqrt(-3) when it exists: where a curve degenerates.
fn degenerate_values(f: &PrimeField) -> Vec<u64> {
    let mut out = vec![0, 1, f.neg(1), 3 % f.p(), f.neg(3)];
    if let Some(s) = f.sqrt(f.neg(3)) {
        out.extend([s, f.neg(s)]);
    }
    out.sort();
    out.dedup();
    out
}

/// The at most 21 values of u for which some shift is degenerate.
pub fn bad_values(f: &PrimeField) -> Vec<u64> {
    let base = degenerate_values(f);
    let mut out: Vec<u64> = SHIFTS.iter().flat_map(|&s| base.iter().map(move |&b| f.add(b, s % f.p()))).collect();
    out.sort();
    out.dedup();
    out
}

pub fn is_generic(f: &PrimeField, u: u64) -> bool {
    !bad_values(f).contains(&(u % f.p()))
}

/// Why the fifteen curves could not be built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degenerate {
    Signal(ZeroDivisorSignal),
    /// The modulus is linear with a bad root.
    BadValue(u64),
}

fn divide(alg: &EtaleAlgebra, a: &EtaleElem, b: &EtaleElem) -> Result<EtaleElem, Degenerate> {
    match algebra_invert(b, alg) {
        Inverse::Unit(bi) => Ok(alg.mul(a, &bi)),
        Inverse::Signal(s) => Err(Degenerate::Signal(s)),
        Inverse::Zero => unreachable!("denominators vanish only at prescreened values"),
    }
}

/// c y^2 = x^3 + a2 x^2 + a4 x + a6 with c = 1, moved to short form.
fn short_form(alg: &EtaleAlgebra, a2: &EtaleElem, a4: &EtaleElem, a6: &EtaleElem) -> ShortCurve {
    let f = alg.field();
    let inv3 = f.inv(3).expect("p > 3");
    let inv27 = f.pow(inv3, 3);
    let a2sq = alg.square(a2);
    let a = alg.sub(a4, &alg.scale(&a2sq, inv3));
    let b = alg.add(
        &alg.sub(&alg.scale(&alg.mul(&a2sq, a2), f.mul(2, inv27)), &alg.scale(&alg.mul(a2, a4), inv3)),
        a6,
    );
    ShortCurve { a, b }
}

fn legendre_form(alg: &EtaleAlgebra, lambda: &EtaleElem) -> ShortCurve {
    let a2 = alg.neg(&alg.add(&alg.one(), lambda));
    short_form(alg, &a2, lambda, &alg.zero())
}

/// The five curves at the parameter w.
fn five_curves(alg: &EtaleAlgebra, w: &EtaleElem) -> Result<[ShortCurve; 5], Degenerate> {
    let k = |c: i64| alg.from_i64(c);
    let plus = |c: i64| alg.add(w, &k(c));
    let w2 = alg.square(w);
    let w2m9 = alg.sub(&w2, &k(9));
    let w2m1 = alg.sub(&w2, &k(1));
    let r = alg.neg(&divide(alg, &alg.mul(&w2, &alg.square(&w2m9)), &alg.square(&w2m1))?);
    let base = short_form(alg, &alg.sub(&r, &k(18)), &alg.sub(&k(81), &alg.scale(&r, 2)), &r);
    let m1p3 = alg.mul(&plus(-1), &plus(3));
    let q2 = alg.square(&alg.add(&w2, &k(3)));
    let l6 = divide(alg, &alg.scale(w, 4), &m1p3)?;
    let l3a = divide(alg, &alg.scale(&w2, 16), &q2)?;
    let l3b = divide(alg, &alg.square(&alg.mul(&plus(-3), &plus(1))), &q2)?;
    let l3c = divide(alg, &alg.square(&m1p3), &q2)?;
    Ok([base, legendre_form(alg, &l6), legendre_form(alg, &l3a), legendre_form(alg, &l3b), legendre_form(alg, &l3c)])
}

/// The fifteen curves over A = F_p[v]/(f), in tuple order, at u = v.
pub fn fifteen_curves(alg: &EtaleAlgebra) -> Result<Vec<ShortCurve>, Degenerate> {
    let f = alg.field();
    if f.p() <= 3 {
        panic!("short Weierstrass forms need p > 3");
    }
    for b in bad_values(f) {
        if alg.modulus().eval(f, b) == 0 {
            return Err(if alg.degree() == 1 {
                Degenerate::BadValue(b)
            } else {
                Degenerate::Signal(alg.signal(UniPoly::linear(f, b)))
            });
        }
    }
    let v = alg.generator();
    let mut out = Vec::with_capacity(15);
    for s in SHIFTS {
        let w = alg.sub(&v, &alg.constant(s % f.p()));
        out.extend(five_curves(alg, &w)?);
    }
    Ok(out)
}

/// Odd primes l != p, ascending, until their product exceeds 4 sqrt(p).
pub fn schoof_primes(p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut prod = 1u128;
    let mut l = 3u64;
    while prod * prod <= 16 * p as u128 {
        if is_prime_u64(l) && l != p {
            out.push(l);
            prod *= l as u128;
        }
        l += 2;
    }
    out
}

/// One proper factor of a squarefree split `g` of degree at least two.
fn split_once(field: &PrimeField, g: &UniPoly<u64>) -> Result<UniPoly<u64>, FactorError> {
    let alg = EtaleAlgebra::new(*field, g.clone()).expect("monic part");
    let dg = poly_gcd(field, g, &g.derivative(field));
    if dg.degree() != Some(0) {
        return Ok(alg.signal(dg).factor);
    }
    let curves = match fifteen_curves(&alg) {
        Ok(c) => c,
        Err(Degenerate::Signal(s)) => return Ok(s.factor),
        Err(Degenerate::BadValue(_)) => unreachable!("parts here have degree at least two"),
    };
    let ells = schoof_primes(field.p());
    for curve in &curves {
        for &ell in &ells {
            if let Err(sig) = schoof_trace_mod_l(&alg, curve, ell) {
                return Ok(sig.factor);
            }
        }
    }
    Err(FactorError::ConjectureViolation { part: g.coeffs().to_vec() })
}

/// All roots of a monic f that splits into distinct linear factors,
/// ascending.
pub fn factor_totally_split(field: &PrimeField, f: &UniPoly<u64>) -> Result<Vec<u64>, FactorError> {
    let p = field.p();
    if p <= 3 {
        return Err(FactorError::BadParameter(format!("p = {p} is too small")));
    }
    let Some(deg) = f.degree() else {
        return Err(FactorError::BadParameter("the zero polynomial".into()));
    };
    if !f.is_monic(field) {
        return Err(FactorError::BadParameter("the polynomial is not monic".into()));
    }
    if deg >= 2 {
        let v = UniPoly::x(field);
        if v.powmod(field, p as u128, f) != v {
            return Err(FactorError::NotTotallySplit);
        }
    }
    let mut roots = Vec::with_capacity(deg);
    let mut work = vec![f.clone()];
    while let Some(g) = work.pop() {
        match g.degree() {
            Some(0) => {}
            Some(1) => roots.push(field.neg(g.coeffs()[0])),
            _ => {
                let h = split_once(field, &g)?;
                let (q, r) = g.divrem(field, &h);
                debug_assert!(r.is_zero());
                work.push(q);
                work.push(h);
            }
        }
    }
    roots.sort();
    let prod = roots
        .iter()
        .fold(UniPoly::constant(field, 1), |acc, &r| acc.mul(field, &UniPoly::linear(field, r)));
    assert_eq!(&prod, f, "roots must multiply back to f");
    Ok(roots)
}

/// The tuple at u from Legendre traces, or `None` when u is not generic.
pub fn fifteen_tuple(table: &LambdaTable, u: u64) -> Option<FifteenTuple> {
    let f = PrimeField::new(table.p()).ok()?;
    if !is_generic(&f, u) {
        return None;
    }
    let mut out = [0i64; 15];
    for (s, &shift) in SHIFTS.iter().enumerate() {
        let w = f.sub(u % f.p(), shift % f.p());
        let params = D6Params::formal(f, w, false)?;
        let (lb, eb) = params.base_legendre();
        out[5 * s] = table.chi(eb) as i64 * table.trace(lb);
        let entries = params.orbit_prym_curves();
        for (k, idx) in [0usize, 6, 9, 12].into_iter().enumerate() {
            out[5 * s + 1 + k] = table.trace(entries[idx].lambda);
        }
    }
    Some(FifteenTuple(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TuplesReport {
    pub p: u64,
    pub generic: usize,
    /// Pairs u1 < u2 with equal tuples.
    pub collisions: Vec<(u64, u64)>,
}

impl TuplesReport {
    pub fn ok(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Checks that generic parameters have pairwise distinct tuples.
pub fn distinct_tuples_check(p: u64) -> Result<TuplesReport, FactorError> {
    let f = PrimeField::new(p).map_err(|e| FactorError::BadParameter(e.to_string()))?;
    if p <= 3 {
        return Err(FactorError::BadParameter(format!("p = {p} is too small")));
    }
    let table = LambdaTable::build(&f)?;
    let mut seen: HashMap<FifteenTuple, u64> = HashMap::new();
    let mut collisions = Vec::new();
    let mut generic = 0;
    for u in 0..p {
        let Some(t) = fifteen_tuple(&table, u) else { continue };
        generic += 1;
        if let Some(&prev) = seen.get(&t) {
            collisions.push((prev, u));
        } else {
            seen.insert(t, u);
        }
    }
    Ok(TuplesReport { p, generic, collisions })
}
