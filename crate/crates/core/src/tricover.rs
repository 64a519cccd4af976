//! Pryms of unramified cyclic 3-covers obtained by pulling back 3-isogenies
//! along the double covers C -> E_1 and C -> E_2.
//!
//! Every formula depends on (r, c) only. Direction 1 uses the parameters as
//! given; direction 2 is direction 1 of (729/r, -c), which describes the same
//! curve with the roles of E_1 and E_2 exchanged.

use serde::Serialize;

use crate::curves::{extension_trace, res_scalars_weil, CurveError, EllipticCurve, WeilFactor, WeilPolynomial};
use crate::family::D6Params;
use crate::fields::{poly_roots, ExtField, FiniteField, FqElem, PrimeField, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TriCoverError {
    #[error("r = {r} is not a valid parameter over F_{p}")]
    BadParameter { r: u64, p: u64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("oracle mismatch over F_{p}^{k}: counted {counted}, predicted {predicted}")]
    OracleMismatch { p: u64, k: u32, counted: i128, predicted: i128 },
}

/// Which elliptic factor the cover is pulled back from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    First,
    Second,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::First, Direction::Second];
}

/// The (r, c) pair the direction-1 formulas are evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rc {
    pub r: u64,
    pub c: u64,
}

impl Rc {
    pub fn of(params: &D6Params, dir: Direction) -> Self {
        let f = params.field();
        match dir {
            Direction::First => Rc { r: params.r(), c: params.c() },
            Direction::Second => Rc { r: f.div(729 % f.p(), params.r()).unwrap(), c: f.neg(params.c()) },
        }
    }

    fn check(&self, f: &PrimeField) -> Result<(), TriCoverError> {
        let r = self.r % f.p();
        if r == 0 || r == 27 % f.p() || self.c % f.p() == 0 {
            return Err(TriCoverError::BadParameter { r: self.r, p: f.p() });
        }
        Ok(())
    }
}

/// Traces (t_F, t_F') per direction, where F: s^2 = w^3 + 81 w^2 + 72 r w + 16 r^2
/// and F' is its twist by (81 - 3r) c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpecialPrym {
    pub directions: [(i128, i128); 2],
}

impl SpecialPrym {
    pub fn weil(&self, p: u64, dir: Direction) -> WeilPolynomial {
        let (a, b) = self.directions[dir as usize];
        let q = p as u128;
        WeilPolynomial::new(vec![WeilFactor::Ell { t: a, q }, WeilFactor::Ell { t: b, q }])
    }

    fn sorted_pairs(&self) -> [(i128, i128); 2] {
        let mut d = self.directions.map(|(a, b)| (a.min(b), a.max(b)));
        d.sort_unstable();
        d
    }

    /// The two Pryms agree up to isogeny, directions taken as an unordered pair.
    pub fn matches(&self, other: &Self) -> bool {
        self.sorted_pairs() == other.sorted_pairs()
    }
}

pub fn special_f_curve(f: &PrimeField, rc: Rc) -> Result<EllipticCurve<PrimeField>, TriCoverError> {
    rc.check(f)?;
    let r = rc.r;
    Ok(EllipticCurve::cubic(f, 1, 81 % f.p(), f.mul(72, r), f.mul(16, f.mul(r, r)))?)
}

/// The (81 - 3r) c twist of F.
pub fn special_f_twist(f: &PrimeField, rc: Rc) -> Result<EllipticCurve<PrimeField>, TriCoverError> {
    let d = f.mul(f.sub(81, f.mul(3, rc.r)), rc.c);
    Ok(special_f_curve(f, rc)?.quadratic_twist(d)?)
}

/// E_2 in the model c z^2 = w^3 + (r + 81) w^2 + 144 r w + 64 r^2.
pub fn e2_model(f: &PrimeField, rc: Rc) -> Result<EllipticCurve<PrimeField>, TriCoverError> {
    rc.check(f)?;
    let r = rc.r;
    Ok(EllipticCurve::cubic(f, rc.c, f.add(r, 81), f.mul(144, r), f.mul(64, f.mul(r, r)))?)
}

pub fn special_prym(params: &D6Params) -> Result<SpecialPrym, TriCoverError> {
    let f = params.field();
    let mut directions = [(0, 0); 2];
    for dir in Direction::BOTH {
        let rc = Rc::of(params, dir);
        directions[dir as usize] = (special_f_curve(f, rc)?.trace()?, special_f_twist(f, rc)?.trace()?);
    }
    Ok(SpecialPrym { directions })
}

/// 3(x - 9)^3 + 4r(x^2 - 6x + 21), the cubic factor of the 3-division
/// polynomial of E_1 once the root x = -3 is removed.
pub fn general_cubic(f: &PrimeField, r: u64) -> UniPoly<u64> {
    let k = |v: i64| f.from_i64(v);
    UniPoly::new(
        f,
        vec![
            f.add(k(-2187), f.mul(84, r)),
            f.sub(729, f.mul(24, r)),
            f.add(k(-81), f.mul(4, r)),
            3,
        ],
    )
}

/// One Galois orbit of roots of the general cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneralOrbit {
    /// Degree of the field of definition of the roots.
    pub e: u32,
    /// The least root of the orbit in the canonical F_{p^e}.
    pub root: FqElem,
    /// Trace over F_{p^e} of -3(v + 3) y^2 = g.
    pub t_a: i128,
    /// Trace over F_{p^e} of 3(v - 9) c y^2 = g.
    pub t_b: i128,
}

/// Curves A and B of a root v, in any field containing it.
pub fn general_curves<F: FiniteField>(
    field: &F,
    v: F::Elem,
    c: F::Elem,
) -> Result<(EllipticCurve<F>, EllipticCurve<F>), TriCoverError> {
    let k = |n: i64| field.from_int(n);
    let vm9 = field.sub(v, k(9));
    let vp3 = field.add(v, k(3));
    let quad = field.add(field.mul(field.sub(v, k(6)), v), k(21));
    let den = field.mul(k(4), field.mul(vm9, vp3));
    let kk = field
        .div(field.mul(k(27), quad), den)
        .ok_or_else(|| TriCoverError::InternalInconsistency("(v - 9)(v + 3) vanishes".into()))?;
    // g = x^3 + kk (x + 1)^2
    let (a2, a4, a6) = (kk, field.add(kk, kk), kk);
    let ca = field.mul(k(-3), vp3);
    let cb = field.mul(field.mul(k(3), vm9), c);
    Ok((EllipticCurve::cubic(field, ca, a2, a4, a6)?, EllipticCurve::cubic(field, cb, a2, a4, a6)?))
}

/// Traces over F_{p^e} of curves A and B for a root v in the canonical F_{p^e}.
pub fn general_orbit_traces(p: u64, e: u32, v: FqElem, c: u64) -> Result<(i128, i128), TriCoverError> {
    if e == 1 {
        let f = PrimeField::new(p).map_err(|_| TriCoverError::BadParameter { r: 0, p })?;
        let v = v.as_base().ok_or_else(|| TriCoverError::InternalInconsistency("root not in F_p".into()))?;
        let (a, b) = general_curves(&f, v, c)?;
        return Ok((a.trace()?, b.trace()?));
    }
    let fe = ExtField::prime(p, e).map_err(|_| TriCoverError::BadParameter { r: 0, p })?;
    let (a, b) = general_curves(&fe, v, fe.embed(c))?;
    Ok((a.trace()?, b.trace()?))
}

/// Roots of the general cubic grouped into Galois orbits, each with its
/// canonical root, in increasing order of e.
pub fn general_orbit_roots(f: &PrimeField, r: u64) -> Result<Vec<(u32, FqElem)>, TriCoverError> {
    let p = f.p();
    let h = general_cubic(f, r);
    let base = poly_roots(f, &h, 0);
    if base.windows(2).any(|w| w[0] == w[1]) || base.len() == 2 {
        return Err(TriCoverError::InternalInconsistency(format!("repeated roots of the general cubic at r = {r}")));
    }
    let mut out: Vec<(u32, FqElem)> = base.iter().map(|&v| (1, FqElem::from_base(v))).collect();
    let missing = 3 - base.len() as u32;
    if missing > 0 {
        let fe = ExtField::prime(p, missing).map_err(|_| TriCoverError::BadParameter { r, p })?;
        let lifted = h.map(&fe, |a| fe.embed(a));
        let roots = poly_roots(&fe, &lifted, 0);
        let root = roots
            .into_iter()
            .filter(|v| v.as_base().is_none())
            .min()
            .ok_or_else(|| TriCoverError::InternalInconsistency("no root in the extension".into()))?;
        out.push((missing, root));
    }
    let total: u32 = out.iter().map(|&(e, _)| e).sum();
    if total != 3 {
        return Err(TriCoverError::InternalInconsistency(format!("orbit degrees sum to {total}")));
    }
    Ok(out)
}

pub fn general_triple_data(params: &D6Params, dir: Direction) -> Result<Vec<GeneralOrbit>, TriCoverError> {
    general_triple_data_rc(params.field(), Rc::of(params, dir))
}

pub fn general_triple_data_rc(f: &PrimeField, rc: Rc) -> Result<Vec<GeneralOrbit>, TriCoverError> {
    rc.check(f)?;
    general_orbit_roots(f, rc.r)?
        .into_iter()
        .map(|(e, root)| {
            let (t_a, t_b) = general_orbit_traces(f.p(), e, root, rc.c)?;
            Ok(GeneralOrbit { e, root, t_a, t_b })
        })
        .collect()
}

/// Restriction-of-scalars factors of the general covers in one direction,
/// total degree 12.
pub fn general_triple_weil(params: &D6Params, dir: Direction) -> Result<Vec<WeilFactor>, TriCoverError> {
    let q = params.p() as u128;
    let mut out = Vec::with_capacity(6);
    for orbit in general_triple_data(params, dir)? {
        out.push(res_scalars_weil(orbit.t_a, q, orbit.e)?);
        out.push(res_scalars_weil(orbit.t_b, q, orbit.e)?);
    }
    let degree: u32 = out.iter().map(WeilFactor::degree).sum();
    if degree != 12 {
        return Err(TriCoverError::InternalInconsistency(format!("general factors have degree {degree}")));
    }
    Ok(out)
}

/// Prym of the pullback of multiplication by 3, one Weil polynomial per
/// direction: the special pair together with the general factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Mult3Signature {
    pub directions: [WeilPolynomial; 2],
}

impl Mult3Signature {
    /// Equality of the directions as an unordered pair of polynomials.
    pub fn matches(&self, other: &Self) -> bool {
        let [a1, b1] = &self.directions;
        let [a2, b2] = &other.directions;
        (a1.same_polynomial(a2) && b1.same_polynomial(b2)) || (a1.same_polynomial(b2) && b1.same_polynomial(a2))
    }
}

pub fn mult3_signature(params: &D6Params) -> Result<Mult3Signature, TriCoverError> {
    mult3_signature_with(params, &special_prym(params)?)
}

/// As [`mult3_signature`], reusing an already computed special Prym.
pub fn mult3_signature_with(params: &D6Params, special: &SpecialPrym) -> Result<Mult3Signature, TriCoverError> {
    let p = params.p();
    let mut directions: [WeilPolynomial; 2] = Default::default();
    for dir in Direction::BOTH {
        let w = special.weil(p, dir).union(&WeilPolynomial::new(general_triple_weil(params, dir)?));
        if w.degree() != 16 {
            return Err(TriCoverError::InternalInconsistency(format!("mult-by-3 Prym has degree {}", w.degree())));
        }
        directions[dir as usize] = w;
    }
    Ok(Mult3Signature { directions })
}

/// Counts the genus-2 quotient c y^2 = P_E2(w) P_F(w) of the special cover over
/// F_p and F_{p^2} and checks it against E_2 times the twisted F.
pub fn special_genus2_oracle(f: &PrimeField, rc: Rc) -> Result<(), TriCoverError> {
    let p = f.p();
    assert!(p <= 200, "the genus-2 oracle counts points exhaustively");
    rc.check(f)?;
    let t_e2 = e2_model(f, rc)?.trace()?;
    let t_tw = special_f_twist(f, rc)?.trace()?;
    let r = rc.r;
    let pe2 = [f.mul(64, f.mul(r, r)), f.mul(144, r), f.add(r, 81), 1];
    let pf = [f.mul(16, f.mul(r, r)), f.mul(72, r), 81 % p, 1];
    for k in 1..=2u32 {
        let fe = ExtField::prime(p, k).expect("p is a valid prime");
        let lift = |c: &[u64; 4]| UniPoly::new(&fe, c.iter().map(|&a| fe.embed(a)).collect());
        let sextic = lift(&pe2).mul(&fe, &lift(&pf));
        let c = fe.embed(rc.c);
        let q = fe.order();
        let mut n = q as i128 + 1 + fe.quadratic_character(c) as i128;
        for i in 0..q {
            n += fe.quadratic_character(fe.mul(c, sextic.eval(&fe, fe.element(i)))) as i128;
        }
        let predicted = q as i128 + 1 - extension_trace(t_e2, p as u128, k) - extension_trace(t_tw, p as u128, k);
        if n != predicted {
            return Err(TriCoverError::OracleMismatch { p, k, counted: n, predicted });
        }
    }
    Ok(())
}
