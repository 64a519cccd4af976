//! The 120 unramified cyclic 4-covers of D_{u,c} and the Weil polynomial of
//! the Prym of C^(4) -> C^(2).
//!
//! A cover is fixed by a pair {i, j} of Weierstrass points and a choice of
//! square roots. Sending u_i to 0 and u_j to infinity puts C in the form
//! c_m y^2 = x (x - a_1)(x - a_2)(x - a_3)(x - a_4). The double cover D_1 is
//! x = d z^2, giving c_1 w^2 = prod (z^2 - alpha_k) with alpha_k = a_k / d and
//! c_1 = c_m d, and D_2 adjoins a square root of e' prod (z - b_k) with
//! b_k^2 = alpha_k. The Prym of D_2 -> D_1 is isogenous to the product of
//!
//!   E+ : e' v^2 = prod (z - b_k)    and    E- : e' c_1 v^2 = prod (z + b_k).
//!
//! The twists d and e' are pinned so that points above W = (u, 0) are
//! rational, which makes every cover a quotient of the pullback of
//! multiplication by 4 along the Abel-Jacobi map based at W.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::curves::{CurveError, EllipticCurve, TraceCache, WeilFactor, WeilPolynomial};
use crate::family::D6Params;
use crate::fields::{ExtField, FiniteField, FqElem, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadCoverError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("oracle mismatch over F_{p}^{k}: counted {counted}, predicted {predicted}")]
    OracleMismatch { p: u64, k: u32, counted: i128, predicted: i128 },
}

/// Construction choices that must not affect the result. The defaults are
/// the canonical ones; the others exist so tests can perturb them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverChoices {
    /// Send u_j to 0 and u_i to infinity instead.
    pub swap_ends: bool,
    /// Represent each sign class by the globally negated root vector.
    pub negate_roots: bool,
    /// Evaluate the pinning rule at the other point of D_1 above W when both
    /// points have distinct z-coordinates.
    pub other_base_point: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FourCoverDescriptor {
    /// Indices (1-based, into the Weierstrass set) of the points sent to 0 and infinity.
    pub zero: u8,
    pub infinity: u8,
    /// Indices of the remaining four points, ascending.
    pub others: [u8; 4],
    pub a: [u64; 4],
    pub c_model: u64,
    pub d: u64,
    pub c1: u64,
    pub alpha: [u64; 4],
    /// Bit k set when b_{k+1} is the negated canonical root. Bit 0 is clear
    /// for canonical representatives.
    pub signs: u8,
    /// Square roots of alpha in the canonical F_{p^2}.
    pub b: [FqElem; 4],
    /// All b_k lie in F_p, so both companion curves are defined over F_p.
    pub rational: bool,
    pub e_prime: FqElem,
}

impl FourCoverDescriptor {
    pub fn pair(&self) -> (u8, u8) {
        (self.zero.min(self.infinity), self.zero.max(self.infinity))
    }
}

/// The two companion curves of a descriptor over F_{p^2}: E+ then E-.
pub fn companion_curves(
    l: &ExtField,
    desc: &FourCoverDescriptor,
) -> Result<[EllipticCurve<ExtField>; 2], QuadCoverError> {
    let minus: [FqElem; 4] = desc.b;
    let plus: [FqElem; 4] = desc.b.map(|b| l.neg(b));
    let e_plus = desc.e_prime;
    let e_minus = l.mul(desc.e_prime, l.embed(desc.c1));
    Ok([quartic_jacobian(l, e_plus, &minus)?, quartic_jacobian(l, e_minus, &plus)?])
}

/// Weierstrass model of gamma v^2 = prod (z - r_k): sending r_1 to infinity
/// with z = r_1 + 1/s gives (gamma L) V^2 = prod_{k>1} (s - 1/(r_k - r_1)) up to
/// squares, where L = prod_{k>1} (r_1 - r_k).
fn quartic_jacobian<F: FiniteField>(
    field: &F,
    gamma: F::Elem,
    roots: &[F::Elem; 4],
) -> Result<EllipticCurve<F>, QuadCoverError> {
    let r1 = roots[0];
    let mut lead = field.one();
    let mut s = [field.zero(); 3];
    for k in 1..4 {
        let diff = field.sub(roots[k], r1);
        lead = field.mul(lead, field.neg(diff));
        s[k - 1] = field
            .inv(diff)
            .ok_or_else(|| QuadCoverError::InternalInconsistency("repeated root of a quartic".into()))?;
    }
    let e1 = field.add(field.add(s[0], s[1]), s[2]);
    let e2 = field.add(field.add(field.mul(s[0], s[1]), field.mul(s[0], s[2])), field.mul(s[1], s[2]));
    let e3 = field.mul(field.mul(s[0], s[1]), s[2]);
    Ok(EllipticCurve::cubic(field, field.mul(gamma, lead), field.neg(e1), e2, field.neg(e3))?)
}

/// Builds the 120 descriptors in a fixed order: pairs lexicographically, then
/// sign classes.
pub fn enumerate_four_covers(params: &D6Params) -> Result<Vec<FourCoverDescriptor>, QuadCoverError> {
    enumerate_four_covers_with(params, CoverChoices::default())
}

pub fn enumerate_four_covers_with(
    params: &D6Params,
    choices: CoverChoices,
) -> Result<Vec<FourCoverDescriptor>, QuadCoverError> {
    let f = params.field();
    let l = ExtField::new(*f, 2).map_err(|e| QuadCoverError::InternalInconsistency(e.to_string()))?;
    let w = params.weierstrass().0;
    let c = params.c();
    let u1 = w[0];
    let mut out = Vec::with_capacity(120);
    for i in 0..6 {
        for j in i + 1..6 {
            let (zi, inf) = if choices.swap_ends { (j, i) } else { (i, j) };
            let others: Vec<usize> = (0..6).filter(|&k| k != i && k != j).collect();
            let a: Vec<u64> = others
                .iter()
                .map(|&k| f.div(f.sub(w[zi], w[k]), f.sub(w[inf], w[k])).unwrap())
                .collect();
            let denom = others.iter().fold(1, |acc, &k| f.mul(acc, f.sub(w[inf], w[k])));
            let c_model = f.div(c, denom).unwrap();
            // Pin d so that both points of D_1 above W are rational.
            let h1 = f.mul(f.sub(u1, w[i]), f.sub(u1, w[j]));
            let d = if h1 != 0 {
                h1
            } else {
                others.iter().fold(c, |acc, &k| f.mul(acc, f.sub(u1, w[k])))
            };
            let c1 = f.mul(c_model, d);
            let alpha: Vec<u64> = a.iter().map(|&ak| f.div(ak, d).unwrap()).collect();
            let roots: Vec<FqElem> = alpha.iter().map(|&al| canonical_sqrt(f, &l, al)).collect();
            let rational = roots.iter().all(|r| r.as_base().is_some());
            // Where W sits on the z-line of D_1.
            let base_z = if zi == 0 {
                Some(l.zero())
            } else if inf == 0 {
                None
            } else {
                let m = others.iter().position(|&k| k == 0).unwrap();
                Some(roots[m])
            };
            for class in 0..8u8 {
                let mut signs = class << 1;
                if choices.negate_roots {
                    signs ^= 0b1111;
                }
                let b: [FqElem; 4] =
                    std::array::from_fn(|k| if signs >> k & 1 == 1 { l.neg(roots[k]) } else { roots[k] });
                let e_prime = match base_z {
                    None => l.one(),
                    Some(z0) => {
                        let z0 = if choices.other_base_point { l.neg(z0) } else { z0 };
                        let direct = b.iter().fold(l.one(), |acc, &bk| l.mul(acc, l.sub(z0, bk)));
                        if !l.is_zero(direct) {
                            direct
                        } else {
                            let comp = b.iter().fold(l.embed(c1), |acc, &bk| l.mul(acc, l.add(z0, bk)));
                            if l.is_zero(comp) {
                                return Err(QuadCoverError::InternalInconsistency(
                                    "both pinning functions vanish above W".into(),
                                ));
                            }
                            comp
                        }
                    }
                };
                let idx = |k: usize| k as u8 + 1;
                out.push(FourCoverDescriptor {
                    zero: idx(zi),
                    infinity: idx(inf),
                    others: [idx(others[0]), idx(others[1]), idx(others[2]), idx(others[3])],
                    a: a.clone().try_into().unwrap(),
                    c_model,
                    d,
                    c1,
                    alpha: alpha.clone().try_into().unwrap(),
                    signs,
                    b,
                    rational,
                    e_prime,
                });
            }
        }
    }
    Ok(out)
}

/// sqrt in F_p when possible, else the canonical root in F_{p^2}.
fn canonical_sqrt(f: &PrimeField, l: &ExtField, a: u64) -> FqElem {
    match f.sqrt(a) {
        Some(r) => FqElem::from_base(r),
        None => l.sqrt(l.embed(a)).expect("every element of F_p is a square in F_{p^2}"),
    }
}

/// Factor contributions of one descriptor: two F_p factors when rational,
/// otherwise the two F_{p^2} traces (to be halved over the whole set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverContribution {
    Rational([i128; 2]),
    Quadratic([i128; 2]),
}

pub fn cover_contribution(
    params: &D6Params,
    desc: &FourCoverDescriptor,
    cache: &FourCaches,
) -> Result<CoverContribution, QuadCoverError> {
    let f = params.field();
    let l = &cache.l;
    let curves = companion_curves(l, desc)?;
    if desc.rational {
        let mut t = [0i128; 2];
        for (k, e) in curves.iter().enumerate() {
            let [c, a2, a4, a6] = e.cubic_coefficients().map(|x| x.as_base().expect("rational descriptor"));
            t[k] = cache.base.trace(&EllipticCurve::cubic(f, c, a2, a4, a6)?)?;
        }
        Ok(CoverContribution::Rational(t))
    } else {
        Ok(CoverContribution::Quadratic([cache.ext.trace(&curves[0])?, cache.ext.trace(&curves[1])?]))
    }
}

/// Trace memo tables for one prime.
#[derive(Debug)]
pub struct FourCaches {
    pub l: ExtField,
    pub base: TraceCache<u64>,
    pub ext: TraceCache<FqElem>,
}

impl FourCaches {
    pub fn new(f: &PrimeField) -> Self {
        FourCaches {
            l: ExtField::new(*f, 2).expect("valid base field"),
            base: TraceCache::new(),
            ext: TraceCache::new(),
        }
    }
}

/// Weil polynomial of Prym(C^(4) -> C^(2)), degree 480.
pub fn four_prym_weil(params: &D6Params) -> Result<WeilPolynomial, QuadCoverError> {
    four_prym_weil_with(params, CoverChoices::default(), &FourCaches::new(params.field()))
}

pub fn four_prym_weil_with(
    params: &D6Params,
    choices: CoverChoices,
    cache: &FourCaches,
) -> Result<WeilPolynomial, QuadCoverError> {
    let q = params.p() as u128;
    let mut factors = Vec::with_capacity(240);
    // F_{p^2} traces of non-rational slots; conjugate covers contribute each
    // restriction of scalars twice.
    let mut doubled: BTreeMap<i128, usize> = BTreeMap::new();
    let descs = enumerate_four_covers_with(params, choices)?;
    if descs.len() != 120 {
        return Err(QuadCoverError::InternalInconsistency(format!("{} descriptors", descs.len())));
    }
    for desc in &descs {
        match cover_contribution(params, desc, cache)? {
            CoverContribution::Rational(ts) => factors.extend(ts.map(|t| WeilFactor::Ell { t, q })),
            CoverContribution::Quadratic(ts) => {
                for t in ts {
                    *doubled.entry(t).or_default() += 1;
                }
            }
        }
    }
    for (t, n) in doubled {
        if n % 2 != 0 {
            return Err(QuadCoverError::InternalInconsistency(format!(
                "F_{{p^2}} trace {t} occurs {n} times; conjugate covers do not pair up"
            )));
        }
        for _ in 0..n / 2 {
            factors.push(crate::curves::res_scalars_weil(t, q, 2)?);
        }
    }
    let w = WeilPolynomial::new(factors);
    if w.degree() != 480 {
        return Err(QuadCoverError::InternalInconsistency(format!("Prym degree {}", w.degree())));
    }
    Ok(w)
}

/// Predicted #D_2(F_{p^k}) for a rational descriptor, or #D_2(F_{p^{2k}}) for
/// a quadratic one: Jac(D_2) ~ Jac(C) x Prym(D_1/C) x E+ x E-.
pub fn predicted_d2_count(
    params: &D6Params,
    desc: &FourCoverDescriptor,
    k: u32,
) -> Result<i128, QuadCoverError> {
    use crate::curves::extension_trace;
    let f = params.field();
    let p = f.p() as u128;
    let t_base = params.base_curve().trace()?;
    let pair = desc.pair();
    let entry = params
        .orbit_prym_curves()
        .into_iter()
        .find(|e| e.pair == pair)
        .ok_or_else(|| QuadCoverError::InternalInconsistency("pair missing from the double-cover table".into()))?;
    let t_d1 = EllipticCurve::legendre(f, entry.e, entry.lambda)?.trace()?;
    let l = ExtField::new(*f, 2).expect("valid base field");
    let curves = companion_curves(&l, desc)?;
    let (n, a) = if desc.rational {
        let mut a = 2 * extension_trace(t_base, p, k) + extension_trace(t_d1, p, k);
        for e in &curves {
            let [c, a2, a4, a6] = e.cubic_coefficients().map(|x| x.as_base().unwrap());
            a += extension_trace(EllipticCurve::cubic(f, c, a2, a4, a6)?.trace()?, p, k);
        }
        (p.pow(k), a)
    } else {
        let mut a = 2 * extension_trace(t_base, p, 2 * k) + extension_trace(t_d1, p, 2 * k);
        for e in &curves {
            a += extension_trace(e.trace()?, p * p, k);
        }
        (p.pow(2 * k), a)
    };
    Ok(n as i128 + 1 - a)
}

/// Counts D_2 directly as the normalized fiber product of
/// c_1 w^2 = prod (z^2 - alpha_k) and e' v^2 = prod (z - b_k) over the z-line,
/// in the library's F_{p^k} (rational descriptors, k <= 3) or F_{p^2}
/// (quadratic descriptors, k = 1), and compares with [`predicted_d2_count`].
pub fn d2_direct_count_oracle(params: &D6Params, desc: &FourCoverDescriptor, kmax: u32) -> Result<(), QuadCoverError> {
    let p = params.p();
    let ks: Vec<u32> = if desc.rational { (1..=kmax.min(3)).collect() } else { vec![1] };
    for k in ks {
        let deg = if desc.rational { k } else { 2 };
        let fq = ExtField::prime(p, deg).expect("valid prime");
        // Move coefficients into F_q: base elements embed; F_{p^2} elements
        // only occur when deg = 2, where F_q is the same canonical field.
        let lift = |x: FqElem| -> FqElem {
            match x.as_base() {
                Some(v) => fq.embed(v),
                None => {
                    assert_eq!(deg, 2);
                    x
                }
            }
        };
        let b = desc.b.map(lift);
        let e1 = lift(desc.e_prime);
        let c1 = fq.embed(desc.c1);
        let alpha = desc.alpha.map(|a| fq.embed(a));
        let counted = fiber_product_count(&fq, c1, &alpha, e1, &b);
        let predicted = predicted_d2_count(params, desc, if desc.rational { k } else { 1 })?;
        if counted != predicted {
            return Err(QuadCoverError::OracleMismatch { p, k: deg, counted, predicted });
        }
    }
    Ok(())
}

fn fiber_product_count<F: FiniteField>(
    fq: &F,
    c1: F::Elem,
    alpha: &[F::Elem; 4],
    e1: F::Elem,
    b: &[F::Elem; 4],
) -> i128 {
    let chi = |x: F::Elem| fq.quadratic_character(x) as i128;
    let q = fq.order();
    let mut n: i128 = (1 + chi(c1)) * (1 + chi(e1));
    for i in 0..q {
        let z = fq.element(i);
        if b.contains(&z) {
            // Both double covers ramify here; the two points above z are
            // rational exactly when w / v has a rational value.
            let plus = b.iter().fold(fq.one(), |acc, &bl| fq.mul(acc, fq.add(z, bl)));
            n += 1 + chi(fq.mul(fq.mul(e1, c1), plus));
            continue;
        }
        let big = alpha.iter().fold(fq.one(), |acc, &al| fq.mul(acc, fq.sub(fq.square(z), al)));
        let small = b.iter().fold(fq.one(), |acc, &bl| fq.mul(acc, fq.sub(z, bl)));
        n += (1 + chi(fq.mul(c1, big))) * (1 + chi(fq.mul(e1, small)));
    }
    n
}
