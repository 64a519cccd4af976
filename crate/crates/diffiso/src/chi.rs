//! The differential invariant chi of a Legendre parameter.

use crate::error::DiffisoError;
use crate::lambda::LambdaChoice;
use crate::poly::{DiffPoly, Var};
use crate::rational::DiffRational;
use crate::scalars::Scalars;

type Rat<K> = DiffRational<<K as Scalars>::C>;

/// chi(y) = (2 y' y''' - 3 y''^2) / (4 y'^2) + y'^2 (y^2 - y + 1) / (4 y^2 (y - 1)^2)
/// for a derivation `d`.
fn chi_with<K: Scalars>(k: &K, y: &Rat<K>, d: impl Fn(&Rat<K>) -> Rat<K>) -> Result<Rat<K>, DiffisoError> {
    let y1 = d(y);
    if y1.is_zero() {
        return Err(DiffisoError::ConstantInput);
    }
    let y2 = d(&y1);
    let y3 = d(&y2);
    let c = |v: i64| k.from_i64(v);
    let first = y1.mul(k, &y3).scale(k, &c(2)).sub(k, &y2.square(k).scale(k, &c(3)));
    let first = first.div(k, &y1.square(k).scale(k, &c(4))).expect("y' nonzero");
    let one = DiffRational::from_poly(k, DiffPoly::one(k));
    let ym1 = y.sub(k, &one);
    let quad = y.square(k).sub(k, y).add(k, &one);
    let den = y.square(k).mul(k, &ym1.square(k)).scale(k, &c(4));
    let second = y1.square(k).mul(k, &quad).div(k, &den).expect("y is neither 0 nor 1");
    Ok(first.add(k, &second))
}

/// chi of a univariate rational function of `var`, with ordinary derivatives.
pub fn chi_plain<K: Scalars>(k: &K, lambda: &Rat<K>, var: Var) -> Result<Rat<K>, DiffisoError> {
    let mut out = chi_with(k, lambda, |r| r.derivative(k, var))?;
    out.reduce(k, &[var]);
    Ok(out)
}

/// chi of lambda(s) where s is an unknown function of t: derivatives follow
/// the chain rule, so s1, s2, s3 appear.
pub fn chi_composed<K: Scalars>(k: &K, lambda: &Rat<K>) -> Result<Rat<K>, DiffisoError> {
    let mut out = chi_with(k, lambda, |r| r.total_derivative(k))?;
    out.reduce(k, &[Var::S, Var::S1]);
    Ok(out)
}

/// chi(lambda(t)) for one of the family's parameters.
pub fn chi_of_t<K: Scalars>(k: &K, l: LambdaChoice) -> Rat<K> {
    chi_plain(k, &l.rational(k, Var::T), Var::T).expect("family parameters are nonconstant")
}

/// chi(lambda(s)) with s a function of t.
pub fn chi_of_s<K: Scalars>(k: &K, l: LambdaChoice) -> Rat<K> {
    chi_composed(k, &l.rational(k, Var::S)).expect("family parameters are nonconstant")
}

