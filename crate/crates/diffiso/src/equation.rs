//! The first-order equation F and the derived equation G.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::chi::{chi_of_s, chi_of_t};
use crate::error::DiffisoError;
use crate::lambda::{LambdaChoice, LAMBDAS};
use crate::poly::{DiffPoly, Var};
use crate::rational::DiffRational;
use crate::scalars::Scalars;

/// lambda1, lambda2 evaluated at s and lambda3, lambda4 at t; a
/// correspondence pairs E(lambda1(s)) with E(lambda3(t)) and E(lambda2(s))
/// with E(lambda4(t)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CorrespondenceCase {
    pub l1: LambdaChoice,
    pub l2: LambdaChoice,
    pub l3: LambdaChoice,
    pub l4: LambdaChoice,
}

impl CorrespondenceCase {
    pub fn new(l1: LambdaChoice, l2: LambdaChoice, l3: LambdaChoice, l4: LambdaChoice) -> Self {
        CorrespondenceCase { l1, l2, l3, l4 }
    }

    /// The case (a, b : a, b).
    pub fn symmetric(a: LambdaChoice, b: LambdaChoice) -> Self {
        Self::new(a, b, a, b)
    }

    /// The fifteen symmetric cases from unordered pairs of parameters,
    /// repeats allowed.
    pub fn symmetric_cases() -> Vec<Self> {
        let mut out = Vec::new();
        for (i, &a) in LAMBDAS.iter().enumerate() {
            for &b in &LAMBDAS[i..] {
                out.push(Self::symmetric(a, b));
            }
        }
        out
    }

    /// All 625 assignments.
    pub fn all_cases() -> Vec<Self> {
        let mut out = Vec::new();
        for &a in &LAMBDAS {
            for &b in &LAMBDAS {
                for &c in &LAMBDAS {
                    for &d in &LAMBDAS {
                        out.push(Self::new(a, b, c, d));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for CorrespondenceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}:{},{}", self.l1, self.l2, self.l3, self.l4)
    }
}

impl FromStr for CorrespondenceCase {
    type Err = DiffisoError;

    /// Parses `L1,L2:L3,L4`.
    fn from_str(s: &str) -> Result<Self, DiffisoError> {
        let bad = |m: String| DiffisoError::BadInput(m);
        let (left, right) = s.split_once(':').ok_or_else(|| bad(format!("expected L1,L2:L3,L4, got {s:?}")))?;
        let pair = |part: &str| -> Result<(LambdaChoice, LambdaChoice), DiffisoError> {
            let (a, b) = part.split_once(',').ok_or_else(|| bad(format!("expected two lambdas in {part:?}")))?;
            Ok((a.parse().map_err(bad)?, b.parse().map_err(bad)?))
        };
        let (l1, l2) = pair(left)?;
        let (l3, l4) = pair(right)?;
        Ok(Self::new(l1, l2, l3, l4))
    }
}

/// Numerator of chi(l1(s)) - chi(l3(t)) - chi(l2(s)) + chi(l4(t)).
///
/// The second and third derivatives cancel; a survivor is a bug and is
/// reported as `CancellationFailure`.
pub fn build_f<K: Scalars>(k: &K, case: &CorrespondenceCase) -> Result<DiffPoly<K::C>, DiffisoError> {
    let mut s_part = chi_of_s(k, case.l1).sub(k, &chi_of_s(k, case.l2));
    s_part.reduce(k, &[Var::S, Var::S1]);
    let mut t_part = chi_of_t(k, case.l3).sub(k, &chi_of_t(k, case.l4));
    t_part.reduce(k, &[Var::T]);
    let mut total = s_part.sub(k, &t_part);
    total.reduce(k, &[Var::S, Var::T, Var::S1]);
    let f = total.num;
    if !f.is_free_of(Var::S2) || !f.is_free_of(Var::S3) {
        return Err(DiffisoError::CancellationFailure { case: case.to_string() });
    }
    Ok(f)
}

/// s'' solved from dF/dt = F_t + F_s s' + F_s1 s'' = 0.
pub fn second_derivative<K: Scalars>(k: &K, f: &DiffPoly<K::C>) -> Result<DiffRational<K::C>, DiffisoError> {
    let fs1 = f.derivative(k, Var::S1);
    if fs1.is_zero() {
        return Err(DiffisoError::DegenerateF);
    }
    let s1 = DiffPoly::var(k, Var::S1);
    let num = f.derivative(k, Var::T).add(k, &f.derivative(k, Var::S).mul(k, &s1)).neg(k);
    Ok(DiffRational::new(k, num, fs1).expect("nonzero"))
}

/// chi(l1(s)) - chi(l3(t)) after eliminating s'' and s''' with the
/// derivatives of F = 0.
pub fn derive_g_rational<K: Scalars>(
    k: &K,
    case: &CorrespondenceCase,
    f: &DiffPoly<K::C>,
) -> Result<DiffRational<K::C>, DiffisoError> {
    let s2 = second_derivative(k, f)?;
    let s3 = s2.total_derivative(k).substitute(k, Var::S2, &s2);
    let mut e = chi_of_s(k, case.l1).sub(k, &chi_of_t(k, case.l3));
    e.reduce(k, &[Var::S, Var::T, Var::S1]);
    let mut g = e.substitute(k, Var::S3, &s3).substitute(k, Var::S2, &s2);
    g.reduce(k, &[Var::S, Var::T, Var::S1]);
    debug_assert!(g.num.is_free_of(Var::S2) && g.num.is_free_of(Var::S3));
    Ok(g)
}

/// The numerator G of `derive_g_rational`.
pub fn derive_g<K: Scalars>(k: &K, case: &CorrespondenceCase, f: &DiffPoly<K::C>) -> Result<DiffPoly<K::C>, DiffisoError> {
    Ok(derive_g_rational(k, case, f)?.num)
}
