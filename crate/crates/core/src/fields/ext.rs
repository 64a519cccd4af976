use std::cmp::Ordering;
use std::fmt;

use super::{FieldError, FiniteField, PrimeField};

/// An element of F_{p^e}: coefficients of 1, x, x^2 in the power basis.
///
/// Unused coefficients are zero. Ordering compares the highest coefficient
/// first, which is the lexicographic order on coefficient vectors written
/// from the top degree down.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub struct FqElem(pub [u64; 3]);

impl Ord for FqElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0[2], self.0[1], self.0[0]).cmp(&(other.0[2], other.0[1], other.0[0]))
    }
}

impl PartialOrd for FqElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.0[0], self.0[1], self.0[2])
    }
}

impl FqElem {
    pub fn from_base(a: u64) -> Self {
        FqElem([a, 0, 0])
    }

    /// The base-field value if the element lies in F_p.
    pub fn as_base(&self) -> Option<u64> {
        (self.0[1] == 0 && self.0[2] == 0).then_some(self.0[0])
    }
}

/// F_{p^e} for e in {1, 2, 3}, built on the lexicographically least monic
/// irreducible polynomial of degree e.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtField {
    base: PrimeField,
    e: u32,
    /// Low coefficients m_0..m_{e-1} of the monic modulus.
    modulus: [u64; 3],
    /// Row k holds x^{k p} reduced, so Frobenius is a matrix product.
    frob: [[u64; 3]; 3],
    nonresidue: FqElem,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.base.p(), self.e)
    }
}

/// Largest prime admitted for cubic extensions so that q = p^3 fits in u128
/// with room for exponent arithmetic.
pub const MAX_PRIME_CUBIC: u64 = 1 << 42;

impl ExtField {
    pub fn new(base: PrimeField, e: u32) -> Result<Self, FieldError> {
        if !(1..=3).contains(&e) {
            return Err(FieldError::BadDegree(e));
        }
        if e == 3 && base.p() >= MAX_PRIME_CUBIC {
            return Err(FieldError::TooLarge(base.p()));
        }
        let modulus = least_irreducible(&base, e);
        let mut f = ExtField {
            base,
            e,
            modulus,
            frob: [[0; 3]; 3],
            nonresidue: FqElem::default(),
        };
        let xp = if e == 1 {
            FqElem::from_base(1)
        } else {
            f.pow(FqElem([0, 1, 0]), base.p() as u128)
        };
        let mut row = f.one();
        for k in 0..e as usize {
            f.frob[k] = row.0;
            row = f.mul(row, xp);
        }
        f.nonresidue = (0..f.order())
            .map(|i| f.element(i))
            .find(|&a| f.quadratic_character(a) == -1)
            .expect("odd order field has nonsquares");
        Ok(f)
    }

    pub fn prime(p: u64, e: u32) -> Result<Self, FieldError> {
        Self::new(PrimeField::new(p)?, e)
    }

    /// Monic modulus coefficients, constant term first, leading 1 included.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus[..self.e as usize].to_vec();
        if self.e == 1 {
            m[0] = 0;
        }
        m.push(1);
        m
    }

    /// The norm to F_p.
    pub fn norm(&self, a: FqElem) -> u64 {
        let mut acc = a;
        let mut conj = a;
        for _ in 1..self.e {
            conj = self.frobenius(conj);
            acc = self.mul(acc, conj);
        }
        debug_assert!(acc.as_base().is_some());
        acc.0[0]
    }

    /// The trace to F_p.
    pub fn trace_to_base(&self, a: FqElem) -> u64 {
        let mut acc = a;
        let mut conj = a;
        for _ in 1..self.e {
            conj = self.frobenius(conj);
            acc = self.add(acc, conj);
        }
        acc.0[0]
    }

    fn reduce_wide(&self, w: [u128; 5]) -> FqElem {
        let p = self.base.p() as u128;
        let e = self.e as usize;
        let mut c = [0u64; 5];
        for k in 0..5 {
            c[k] = (w[k] % p) as u64;
        }
        let fp = &self.base;
        for k in (e..2 * e - 1).rev() {
            let top = c[k];
            if top == 0 {
                continue;
            }
            c[k] = 0;
            for j in 0..e {
                let t = fp.mul(top, self.modulus[j]);
                c[k - e + j] = fp.sub(c[k - e + j], t);
            }
        }
        FqElem([c[0], c[1], c[2]])
    }
}

fn least_irreducible(fp: &PrimeField, e: u32) -> [u64; 3] {
    if e == 1 {
        return [0; 3];
    }
    let p = fp.p();
    // Degrees 2 and 3 are irreducible exactly when rootless.
    let has_root = |m: &[u64; 3]| {
        (0..p).any(|x| {
            let mut v = 1u64;
            for k in (0..e as usize).rev() {
                v = fp.add(fp.mul(v, x), m[k]);
            }
            v == 0
        })
    };
    // Lexicographic order with the highest non-leading coefficient first.
    let total = (p as u128).pow(e);
    for idx in 0..total {
        let mut m = [0u64; 3];
        let mut rest = idx;
        for k in 0..e as usize {
            m[k] = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        // idx enumerates m_0 fastest, so the top coefficient varies slowest.
        if m[0] != 0 && !has_root(&m) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of degree 2 and 3 exist over every F_p")
}

impl FiniteField for ExtField {
    type Elem = FqElem;

    fn characteristic(&self) -> u64 {
        self.base.p()
    }
    fn degree(&self) -> u32 {
        self.e
    }
    fn order(&self) -> u128 {
        (self.base.p() as u128).pow(self.e)
    }
    fn zero(&self) -> FqElem {
        FqElem::default()
    }
    fn one(&self) -> FqElem {
        FqElem::from_base(1)
    }
    fn from_int(&self, v: i64) -> FqElem {
        FqElem::from_base(self.base.from_i64(v))
    }
    fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let f = &self.base;
        FqElem([f.add(a.0[0], b.0[0]), f.add(a.0[1], b.0[1]), f.add(a.0[2], b.0[2])])
    }
    fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        let f = &self.base;
        FqElem([f.sub(a.0[0], b.0[0]), f.sub(a.0[1], b.0[1]), f.sub(a.0[2], b.0[2])])
    }
    fn neg(&self, a: FqElem) -> FqElem {
        let f = &self.base;
        FqElem([f.neg(a.0[0]), f.neg(a.0[1]), f.neg(a.0[2])])
    }
    fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        match self.e {
            1 => FqElem::from_base(self.base.mul(a.0[0], b.0[0])),
            _ => {
                let p = self.base.p() as u128;
                let e = self.e as usize;
                let mut w = [0u128; 5];
                for i in 0..e {
                    if a.0[i] == 0 {
                        continue;
                    }
                    for j in 0..e {
                        // Each product is below 2^124; reduce to keep sums safe.
                        w[i + j] = (w[i + j] + a.0[i] as u128 * b.0[j] as u128) % p;
                    }
                }
                self.reduce_wide(w)
            }
        }
    }
    fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a == self.zero() {
            return None;
        }
        let mut conj = self.one();
        let mut c = a;
        for _ in 1..self.e {
            c = self.frobenius(c);
            conj = self.mul(conj, c);
        }
        let n = self.mul(a, conj).0[0];
        let ni = self.base.inv(n)?;
        Some(self.mul(conj, FqElem::from_base(ni)))
    }
    fn quadratic_character(&self, a: FqElem) -> i8 {
        if a == self.zero() {
            return 0;
        }
        self.base.legendre(self.norm(a))
    }
    fn sqrt(&self, a: FqElem) -> Option<FqElem> {
        if self.e == 1 {
            return self.base.sqrt(a.0[0]).map(FqElem::from_base);
        }
        if a == self.zero() {
            return Some(a);
        }
        if self.quadratic_character(a) != 1 {
            return None;
        }
        let q = self.order();
        let mut m = q - 1;
        let mut s = 0u32;
        while m % 2 == 0 {
            m /= 2;
            s += 1;
        }
        let mut mm = s;
        let mut c = self.pow(self.nonresidue, m);
        let mut t = self.pow(a, m);
        let mut r = self.pow(a, m.div_ceil(2));
        let one = self.one();
        while t != one {
            let mut i = 0;
            let mut t2 = t;
            while t2 != one {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(mm - i - 1) {
                b = self.mul(b, b);
            }
            mm = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        debug_assert_eq!(self.mul(r, r), a);
        Some(r.min(self.neg(r)))
    }
    fn element(&self, index: u128) -> FqElem {
        let p = self.base.p() as u128;
        let mut rest = index;
        let mut c = [0u64; 3];
        for k in 0..self.e as usize {
            c[k] = (rest % p) as u64;
            rest /= p;
        }
        FqElem(c)
    }
    fn embed(&self, a: u64) -> FqElem {
        FqElem::from_base(a % self.base.p())
    }
    fn frobenius(&self, a: FqElem) -> FqElem {
        let f = &self.base;
        let mut out = [0u64; 3];
        for k in 0..self.e as usize {
            if a.0[k] == 0 {
                continue;
            }
            for j in 0..self.e as usize {
                out[j] = f.add(out[j], f.mul(a.0[k], self.frob[k][j]));
            }
        }
        FqElem(out)
    }
    fn base(&self) -> PrimeField {
        self.base
    }
}
