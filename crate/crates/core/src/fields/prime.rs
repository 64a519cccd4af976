use std::fmt;

use super::{FieldError, FiniteField};

/// Deterministic Miller-Rabin for 64-bit integers.
///
/// The base set {2, 3, 5, ..., 37} is a proven witness set for all n < 3.3e24.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field F_p for an odd prime 5 <= p < 2^62.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    nonresidue: u64,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

pub const MAX_PRIME: u64 = 1 << 62;

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p == 2 || p == 3 {
            return Err(FieldError::SmallCharacteristic(p));
        }
        if p >= MAX_PRIME {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        let mut field = PrimeField { p, nonresidue: 0 };
        field.nonresidue = (2..p)
            .find(|&a| field.legendre(a) == -1)
            .expect("every odd prime has a quadratic nonresidue");
        Ok(field)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Smallest quadratic nonresidue; the canonical representative of the
    /// nonsquare class.
    #[inline]
    pub fn smallest_nonresidue(&self) -> u64 {
        self.nonresidue
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn from_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.p as i128) as u64
    }

    /// Sum; inputs above p (small constants) are reduced first.
    #[inline]
    pub fn add(&self, mut a: u64, mut b: u64) -> u64 {
        if a >= self.p || b >= self.p {
            a %= self.p;
            b %= self.p;
        }
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, mut a: u64, mut b: u64) -> u64 {
        if a >= self.p || b >= self.p {
            a %= self.p;
            b %= self.p;
        }
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let a = a % self.p;
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p < (1 << 32) && a < (1 << 32) && b < (1 << 32) {
            (a * b) % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut b: u64, mut e: u128) -> u64 {
        let mut acc = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.from_i128(s0))
    }

    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Legendre symbol (a | p) via Euler's criterion.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.pow(a, ((self.p - 1) / 2) as u128) == 1 {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, a: u64) -> bool {
        self.legendre(a) >= 0
    }

    /// Canonical square root: the smaller of {r, p - r}. Tonelli-Shanks with
    /// the smallest nonresidue.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            return Some(0);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let p = self.p;
        let r = if p % 4 == 3 {
            self.pow(a, ((p + 1) / 4) as u128)
        } else {
            let mut q = p - 1;
            let mut s = 0u32;
            while q % 2 == 0 {
                q /= 2;
                s += 1;
            }
            let mut m = s;
            let mut c = self.pow(self.nonresidue, q as u128);
            let mut t = self.pow(a, q as u128);
            let mut r = self.pow(a, q.div_ceil(2) as u128);
            while t != 1 {
                let mut i = 0;
                let mut t2 = t;
                while t2 != 1 {
                    t2 = self.mul(t2, t2);
                    i += 1;
                }
                let mut b = c;
                for _ in 0..(m - i - 1) {
                    b = self.mul(b, b);
                }
                m = i;
                c = self.mul(b, b);
                t = self.mul(t, c);
                r = self.mul(r, b);
            }
            r
        };
        debug_assert_eq!(self.mul(r, r), a);
        Some(r.min(p - r))
    }

    /// Signed representative in (-p/2, p/2].
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn order(&self) -> u128 {
        self.p as u128
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_int(&self, v: i64) -> u64 {
        self.from_i64(v)
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        PrimeField::add(self, a, b)
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        PrimeField::sub(self, a, b)
    }
    fn neg(&self, a: u64) -> u64 {
        PrimeField::neg(self, a)
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        PrimeField::mul(self, a, b)
    }
    fn inv(&self, a: u64) -> Option<u64> {
        PrimeField::inv(self, a)
    }
    fn quadratic_character(&self, a: u64) -> i8 {
        self.legendre(a)
    }
    fn sqrt(&self, a: u64) -> Option<u64> {
        PrimeField::sqrt(self, a)
    }
    fn element(&self, index: u128) -> u64 {
        (index % self.p as u128) as u64
    }
    fn embed(&self, a: u64) -> u64 {
        a % self.p
    }
    fn frobenius(&self, a: u64) -> u64 {
        a
    }
    fn base(&self) -> PrimeField {
        *self
    }
}
