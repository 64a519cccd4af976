//! Prime fields, their small extensions, and univariate polynomials over both.

mod ext;
mod poly;
mod prime;

use std::fmt::Debug;
use std::hash::Hash;

pub use ext::{ExtField, FqElem};
pub use poly::{poly_gcd, poly_roots, UniPoly};
pub use prime::{is_prime_u64, PrimeField, MAX_PRIME};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is not supported (need p > 3)")]
    SmallCharacteristic(u64),
    #[error("prime {0} is too large for this field type")]
    TooLarge(u64),
    #[error("extension degree {0} is not in 1..=3")]
    BadDegree(u32),
}

/// Arithmetic shared by F_p and F_{p^e}.
///
/// Elements are plain values; the field object carries the modulus. All
/// operations expect reduced inputs.
pub trait FiniteField: Clone + Debug + Send + Sync {
    type Elem: Copy + Eq + Ord + Hash + Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    fn degree(&self) -> u32;
    /// q = p^e.
    fn order(&self) -> u128;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// The quadratic character of F_q: 0, +1 or -1.
    fn quadratic_character(&self, a: Self::Elem) -> i8;
    /// Canonical square root (the smaller of +-r), if any.
    fn sqrt(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// Enumerates the field: `element(i)` for `i < q` is a bijection, and the
    /// first p indices are the prime subfield in order.
    fn element(&self, index: u128) -> Self::Elem;
    /// Embeds a reduced base-field element.
    fn embed(&self, a: u64) -> Self::Elem;
    fn frobenius(&self, a: Self::Elem) -> Self::Elem;
    fn base(&self) -> PrimeField;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn square(&self, a: Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    fn pow(&self, mut b: Self::Elem, mut e: u128) -> Self::Elem {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
}
