//! Coefficient rings for differential polynomials: F_p and Q.

use std::fmt::Debug;

use d6lab_core::fields::PrimeField;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A field of coefficients. Elements are owned values; the ring object
/// carries any modulus.
pub trait Scalars: Clone + Debug + Send + Sync {
    type C: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::C;
    fn from_i64(&self, v: i64) -> Self::C;
    fn is_zero(&self, a: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn sub(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    fn inv(&self, a: &Self::C) -> Option<Self::C>;

    fn one(&self) -> Self::C {
        self.from_i64(1)
    }
}

impl Scalars for PrimeField {
    type C = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn from_i64(&self, v: i64) -> u64 {
        PrimeField::from_i64(self, v)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::sub(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::mul(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        PrimeField::neg(self, *a)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        PrimeField::inv(self, *a)
    }
}

/// Exact rationals with big-integer numerators and denominators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

impl Scalars for Rationals {
    type C = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| BigRational::one() / a)
    }
}

/// Reduces a rational modulo p; `None` when p divides the denominator.
pub fn rational_mod_p(f: &PrimeField, a: &BigRational) -> Option<u64> {
    let p = BigInt::from(f.p());
    let red = |x: &BigInt| -> u64 {
        let r = ((x % &p) + &p) % &p;
        u64::try_from(r).expect("residue below p")
    };
    f.div(red(a.numer()), red(a.denom()))
}
