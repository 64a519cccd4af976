use num_bigint::BigInt;
use serde::Serialize;

use super::{check_hasse, CurveError};

/// One factor of a Weil polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WeilFactor {
    /// x^2 - t x + q
    Ell { t: i128, q: u128 },
    /// x^{2e} - t x^e + q^e, the restriction of scalars from F_{q^e}.
    ResScalars { t: i128, q: u128, e: u32 },
}

impl WeilFactor {
    pub fn degree(&self) -> u32 {
        match *self {
            WeilFactor::Ell { .. } => 2,
            WeilFactor::ResScalars { e, .. } => 2 * e,
        }
    }

    /// Sum of the k-th powers of the roots; the factor's contribution to
    /// q^k + 1 - #C(F_{q^k}) when it sits in a Jacobian.
    pub fn power_sum(&self, k: u32) -> i128 {
        match *self {
            WeilFactor::Ell { t, q } => extension_trace(t, q, k),
            WeilFactor::ResScalars { t, q, e } => {
                if k % e != 0 {
                    0
                } else {
                    e as i128 * extension_trace(t, q.pow(e), k / e)
                }
            }
        }
    }
}

impl WeilFactor {
    pub fn power_sum_big(&self, k: u32) -> BigInt {
        match *self {
            WeilFactor::Ell { t, q } => lucas_big(t, q, k),
            WeilFactor::ResScalars { t, q, e } => {
                if k % e != 0 {
                    BigInt::from(0)
                } else {
                    BigInt::from(e) * lucas_big(t, q.pow(e), k / e)
                }
            }
        }
    }
}

fn lucas_big(t1: i128, q: u128, k: u32) -> BigInt {
    let (t, q) = (BigInt::from(t1), BigInt::from(q));
    let (mut prev, mut cur) = (BigInt::from(2), t.clone());
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = &t * &cur - &q * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// x^{2e} - t x^e + q^e as a factor, degrading to an elliptic factor for e = 1.
pub fn res_scalars_weil(t: i128, q: u128, e: u32) -> Result<WeilFactor, CurveError> {
    check_hasse(t, q, e)?;
    Ok(match e {
        1 => WeilFactor::Ell { t, q },
        _ => WeilFactor::ResScalars { t, q, e },
    })
}

/// t_k for F_{q^k} from t_1, via t_k = t_1 t_{k-1} - q t_{k-2}, t_0 = 2.
pub fn extension_trace(t1: i128, q: u128, k: u32) -> i128 {
    let q = q as i128;
    let (mut prev, mut cur) = (2i128, t1);
    if k == 0 {
        return 2;
    }
    for _ in 1..k {
        (prev, cur) = (cur, t1 * cur - q * prev);
    }
    cur
}

/// A multiset of factors kept sorted, so equality is multiset equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WeilPolynomial {
    factors: Vec<WeilFactor>,
}

impl WeilPolynomial {
    pub fn new(mut factors: Vec<WeilFactor>) -> Self {
        factors.sort_unstable();
        WeilPolynomial { factors }
    }

    pub fn factors(&self) -> &[WeilFactor] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(WeilFactor::degree).sum()
    }

    pub fn power_sum(&self, k: u32) -> i128 {
        self.factors.iter().map(|f| f.power_sum(k)).sum()
    }

    /// Exact power sum, for degrees where the i128 value would overflow.
    pub fn power_sum_big(&self, k: u32) -> BigInt {
        self.factors.iter().map(|f| f.power_sum_big(k)).sum()
    }

    /// Equality as integer polynomials. Different factor lists can multiply
    /// to the same polynomial (a restriction of scalars may split), so this
    /// compares Newton power sums up to the degree.
    pub fn same_polynomial(&self, other: &Self) -> bool {
        if self == other {
            return true;
        }
        let d = self.degree();
        if d != other.degree() {
            return false;
        }
        // Cheap rejection on the first few sums, exact in i128.
        for k in 1..=d.min(4) {
            if self.power_sum(k) != other.power_sum(k) {
                return false;
            }
        }
        (5..=d).all(|k| self.power_sum_big(k) == other.power_sum_big(k))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v = self.factors.clone();
        v.extend_from_slice(&other.factors);
        Self::new(v)
    }
}

impl FromIterator<WeilFactor> for WeilPolynomial {
    fn from_iter<I: IntoIterator<Item = WeilFactor>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
