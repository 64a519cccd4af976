//! Elliptic curves over F_q, point counting and Weil polynomials.

mod count;
mod weil;

use std::hash::Hash;

use dashmap::DashMap;

use crate::fields::FiniteField;

pub use count::{exhaustive_order, EXHAUSTIVE_LIMIT};
pub use weil::{extension_trace, res_scalars_weil, WeilFactor, WeilPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("singular curve")]
    SingularCurve,
    #[error("twist constant is zero")]
    ZeroTwist,
    #[error("curves are defined over different fields")]
    FieldMismatch,
    #[error("trace {t} violates the Hasse bound for q = {q}^{e}")]
    HasseViolation { t: i128, q: u128, e: u32 },
    #[error("group order not determined within the point budget (q = {0})")]
    Ambiguous(u128),
    #[error("field of order {0} is too large for baby-step/giant-step")]
    TooLarge(u128),
}

/// Curve models with a twist constant in front of y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model<E> {
    /// c y^2 = x^3 + a2 x^2 + a4 x + a6
    GeneralCubic { c: E, a2: E, a4: E, a6: E },
    /// e y^2 = x (x - 1) (x - lambda)
    Legendre { e: E, lambda: E },
}

#[derive(Debug, Clone)]
pub struct EllipticCurve<F: FiniteField> {
    field: F,
    model: Model<F::Elem>,
}

impl<F: FiniteField> EllipticCurve<F> {
    pub fn cubic(field: &F, c: F::Elem, a2: F::Elem, a4: F::Elem, a6: F::Elem) -> Result<Self, CurveError> {
        let curve = EllipticCurve { field: field.clone(), model: Model::GeneralCubic { c, a2, a4, a6 } };
        curve.validate()?;
        Ok(curve)
    }

    pub fn legendre(field: &F, e: F::Elem, lambda: F::Elem) -> Result<Self, CurveError> {
        let curve = EllipticCurve { field: field.clone(), model: Model::Legendre { e, lambda } };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<(), CurveError> {
        let f = &self.field;
        match self.model {
            Model::Legendre { e, lambda } => {
                if f.is_zero(e) {
                    return Err(CurveError::ZeroTwist);
                }
                if f.is_zero(lambda) || lambda == f.one() {
                    return Err(CurveError::SingularCurve);
                }
            }
            Model::GeneralCubic { c, .. } => {
                if f.is_zero(c) {
                    return Err(CurveError::ZeroTwist);
                }
                if f.is_zero(self.discriminant()) {
                    return Err(CurveError::SingularCurve);
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn model(&self) -> Model<F::Elem> {
        self.model
    }

    /// (c, a2, a4, a6) of the equivalent general cubic model.
    pub fn cubic_coefficients(&self) -> [F::Elem; 4] {
        let f = &self.field;
        match self.model {
            Model::GeneralCubic { c, a2, a4, a6 } => [c, a2, a4, a6],
            Model::Legendre { e, lambda } => [e, f.neg(f.add(f.one(), lambda)), lambda, f.zero()],
        }
    }

    /// Evaluates the right-hand cubic.
    pub fn rhs(&self, x: F::Elem) -> F::Elem {
        let f = &self.field;
        let [_, a2, a4, a6] = self.cubic_coefficients();
        let t = f.add(f.mul(f.add(x, a2), x), a4);
        f.add(f.mul(t, x), a6)
    }

    /// Discriminant of the monic cubic model (the twist constant only scales it).
    pub fn discriminant(&self) -> F::Elem {
        let f = &self.field;
        let [_, a2, a4, a6] = self.cubic_coefficients();
        let k = |v: i64| f.from_int(v);
        let b2 = f.mul(k(4), a2);
        let b4 = f.mul(k(2), a4);
        let b6 = f.mul(k(4), a6);
        let b8 = f.sub(f.mul(k(4), f.mul(a2, a6)), f.square(a4));
        let t1 = f.neg(f.mul(f.square(b2), b8));
        let t2 = f.mul(k(8), f.mul(b4, f.square(b4)));
        let t3 = f.mul(k(27), f.square(b6));
        let t4 = f.mul(k(9), f.mul(b2, f.mul(b4, b6)));
        f.add(f.sub(f.sub(t1, t2), t3), t4)
    }

    pub fn j_invariant(&self) -> F::Elem {
        let f = &self.field;
        let [_, a2, a4, _] = self.cubic_coefficients();
        let b2 = f.mul(f.from_int(4), a2);
        let b4 = f.mul(f.from_int(2), a4);
        let c4 = f.sub(f.square(b2), f.mul(f.from_int(24), b4));
        let num = f.mul(c4, f.square(c4));
        f.div(num, self.discriminant()).expect("validated curves are nonsingular")
    }

    pub fn quadratic_twist(&self, d: F::Elem) -> Result<Self, CurveError> {
        let f = &self.field;
        if f.is_zero(d) {
            return Err(CurveError::ZeroTwist);
        }
        let model = match self.model {
            Model::GeneralCubic { c, a2, a4, a6 } => Model::GeneralCubic { c: f.mul(c, d), a2, a4, a6 },
            Model::Legendre { e, lambda } => Model::Legendre { e: f.mul(e, d), lambda },
        };
        Ok(EllipticCurve { field: self.field.clone(), model })
    }

    /// #E(F_q).
    pub fn group_order(&self) -> Result<u128, CurveError> {
        let q = self.field.order();
        let n = if q <= EXHAUSTIVE_LIMIT {
            exhaustive_order(self)
        } else {
            count::bsgs_order(self)?
        };
        let t = q as i128 + 1 - n as i128;
        check_hasse(t, q, 1)?;
        Ok(n)
    }

    pub fn trace(&self) -> Result<i128, CurveError> {
        Ok(self.field.order() as i128 + 1 - self.group_order()? as i128)
    }

    pub fn is_supersingular(&self) -> Result<bool, CurveError> {
        Ok(self.trace()? == 0)
    }

    /// F_q-isogeny, decided by equality of traces.
    pub fn isogenous(&self, other: &Self) -> Result<bool, CurveError>
    where
        F: PartialEq,
    {
        if self.field != other.field {
            return Err(CurveError::FieldMismatch);
        }
        Ok(self.trace()? == other.trace()?)
    }

    /// Short Weierstrass coefficients (A, B) of a model isomorphic over F_q.
    pub fn short_weierstrass(&self) -> (F::Elem, F::Elem) {
        let f = &self.field;
        let [c, a2, a4, a6] = self.cubic_coefficients();
        // c y^2 = f(x) becomes Y^2 = X^3 + c a2 X^2 + c^2 a4 X + c^3 a6.
        let (b2, b4, b6) = (f.mul(c, a2), f.mul(f.square(c), a4), f.mul(f.mul(c, f.square(c)), a6));
        let third = f.inv(f.from_int(3)).expect("characteristic is not 3");
        let s = f.mul(b2, third);
        let a = f.sub(b4, f.mul(b2, s));
        let b = f.add(f.sub(b6, f.mul(s, b4)), f.mul(f.from_int(2), f.mul(s, f.square(s))));
        (a, b)
    }

    /// F_q-isomorphism class as (j, chi(B/A)), valid when j is neither 0 nor
    /// 1728: twisting by u scales B/A by u^2.
    pub fn isomorphism_key(&self) -> Option<(F::Elem, i8)> {
        let f = &self.field;
        let (a, b) = self.short_weierstrass();
        if f.is_zero(a) || f.is_zero(b) {
            return None;
        }
        Some((self.j_invariant(), f.quadratic_character(f.div(b, a).unwrap())))
    }

    fn cache_key(&self) -> (u64, u32, CacheKey<F::Elem>) {
        let f = &self.field;
        let key = match self.isomorphism_key() {
            Some((j, s)) => CacheKey::Iso(j, s),
            None => {
                let [c, a2, a4, a6] = self.cubic_coefficients();
                CacheKey::Model([a2, a4, a6], f.quadratic_character(c))
            }
        };
        (f.characteristic(), f.degree(), key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CacheKey<E> {
    Iso(E, i8),
    Model([E; 3], i8),
}

pub(crate) fn check_hasse(t: i128, q: u128, e: u32) -> Result<(), CurveError> {
    let qe = q.checked_pow(e).ok_or(CurveError::TooLarge(q))?;
    let t2 = t.unsigned_abs().checked_mul(t.unsigned_abs()).ok_or(CurveError::HasseViolation { t, q, e })?;
    if t2 > qe.saturating_mul(4) {
        return Err(CurveError::HasseViolation { t, q, e });
    }
    Ok(())
}

/// Memo table for traces keyed by isomorphism class where j is not 0 or 1728,
/// and by model otherwise. Entries are deterministic, so concurrent inserts of
/// the same key are harmless.
#[derive(Debug)]
pub struct TraceCache<E: Eq + Hash> {
    map: DashMap<(u64, u32, CacheKey<E>), i128>,
}

impl<E: Copy + Eq + Hash> Default for TraceCache<E> {
    fn default() -> Self {
        TraceCache { map: DashMap::new() }
    }
}

impl<E: Copy + Eq + Hash> TraceCache<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trace<F: FiniteField<Elem = E>>(&self, curve: &EllipticCurve<F>) -> Result<i128, CurveError> {
        let key = curve.cache_key();
        if let Some(t) = self.map.get(&key) {
            return Ok(*t);
        }
        let t = curve.trace()?;
        self.map.insert(key, t);
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
