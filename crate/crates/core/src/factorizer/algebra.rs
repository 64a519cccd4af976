//! The étale algebra F_p[v]/(f) for a totally split squarefree f.

use crate::fields::{poly_gcd, PrimeField, UniPoly};

/// A monic factor g of the modulus with 0 < deg g < deg f, found as the gcd
/// of a zero divisor with f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroDivisorSignal {
    pub factor: UniPoly<u64>,
}

/// Residue of degree below `d`, stored densely with exactly `d` coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EtaleElem(pub Vec<u64>);

impl EtaleElem {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// Outcome of an inversion attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inverse {
    Unit(EtaleElem),
    Signal(ZeroDivisorSignal),
    /// The element vanishes in every component.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleAlgebra {
    field: PrimeField,
    modulus: UniPoly<u64>,
    d: usize,
}

impl EtaleAlgebra {
    /// `None` unless the modulus is monic of degree at least one.
    pub fn new(field: PrimeField, modulus: UniPoly<u64>) -> Option<Self> {
        let d = modulus.degree().filter(|&d| d >= 1)?;
        if !modulus.is_monic(&field) {
            return None;
        }
        Some(EtaleAlgebra { field, modulus, d })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn modulus(&self) -> &UniPoly<u64> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn zero(&self) -> EtaleElem {
        EtaleElem(vec![0; self.d])
    }

    pub fn constant(&self, c: u64) -> EtaleElem {
        let mut out = self.zero();
        out.0[0] = self.field.reduce(c);
        out
    }

    pub fn from_i64(&self, c: i64) -> EtaleElem {
        self.constant(self.field.from_i64(c))
    }

    pub fn one(&self) -> EtaleElem {
        self.constant(1)
    }

    /// The class of v.
    pub fn generator(&self) -> EtaleElem {
        self.from_poly(&UniPoly::x(&self.field))
    }

    pub fn from_poly(&self, a: &UniPoly<u64>) -> EtaleElem {
        let r = a.rem(&self.field, &self.modulus);
        let mut out = self.zero();
        out.0[..r.coeffs().len()].copy_from_slice(r.coeffs());
        out
    }

    pub fn lift(&self, a: &EtaleElem) -> UniPoly<u64> {
        UniPoly::new(&self.field, a.0.clone())
    }

    pub fn add(&self, a: &EtaleElem, b: &EtaleElem) -> EtaleElem {
        EtaleElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.field.add(x, y)).collect())
    }

    pub fn sub(&self, a: &EtaleElem, b: &EtaleElem) -> EtaleElem {
        EtaleElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.field.sub(x, y)).collect())
    }

    pub fn neg(&self, a: &EtaleElem) -> EtaleElem {
        EtaleElem(a.0.iter().map(|&x| self.field.neg(x)).collect())
    }

    pub fn scale(&self, a: &EtaleElem, s: u64) -> EtaleElem {
        EtaleElem(a.0.iter().map(|&x| self.field.mul(x, s)).collect())
    }

    pub fn mul(&self, a: &EtaleElem, b: &EtaleElem) -> EtaleElem {
        let mut acc = vec![0u128; 2 * self.d - 1];
        mac_into(&self.field, &mut acc, &a.0, &b.0);
        EtaleElem(self.reduce_wide(&acc))
    }

    pub fn square(&self, a: &EtaleElem) -> EtaleElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &EtaleElem, mut e: u128) -> EtaleElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.square(&b);
            e >>= 1;
        }
        acc
    }

    /// Evaluates the residue at a root of the modulus.
    pub fn component(&self, a: &EtaleElem, root: u64) -> u64 {
        self.lift(a).eval(&self.field, root)
    }

    /// Reduces a product of two residues (length at most 2d - 1, entries
    /// unreduced) modulo p and f.
    pub(crate) fn reduce_wide(&self, acc: &[u128]) -> Vec<u64> {
        let pu = self.field.p();
        let p = pu as u128;
        let small = pu < (1 << 32);
        let mut t: Vec<u128> = acc.to_vec();
        // Adding c * (p - m_j) subtracts c * m_j without leaving u128.
        let m = self.modulus.coeffs();
        for k in (self.d..t.len()).rev() {
            let c = (t[k] % p) as u64;
            if c == 0 {
                continue;
            }
            for j in 0..self.d {
                let neg = if m[j] == 0 { 0 } else { pu - m[j] };
                let term = c as u128 * neg as u128;
                t[k - self.d + j] += if small { term } else { term % p };
            }
        }
        let mut out: Vec<u64> = t.iter().take(self.d).map(|&x| (x % p) as u64).collect();
        out.resize(self.d, 0);
        out
    }

    /// gcd(a, f) as a signal when it is proper.
    pub fn zero_divisor(&self, a: &EtaleElem) -> Option<ZeroDivisorSignal> {
        if a.is_zero() {
            return None;
        }
        let g = poly_gcd(&self.field, &self.lift(a), &self.modulus);
        (g.degree() != Some(0)).then(|| self.signal(g))
    }

    pub(crate) fn signal(&self, g: UniPoly<u64>) -> ZeroDivisorSignal {
        let deg = g.degree().unwrap_or(0);
        assert!(deg > 0 && deg < self.d, "signal must be a proper factor");
        assert!(self.modulus.rem(&self.field, &g).is_zero(), "signal must divide the modulus");
        ZeroDivisorSignal { factor: g }
    }
}

/// acc[i + j] += a[i] b[j], with products reduced first when p is large.
#[inline]
pub(crate) fn mac_into(f: &PrimeField, acc: &mut [u128], a: &[u64], b: &[u64]) {
    let small = f.p() < (1 << 32);
    let p = f.p() as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let row = &mut acc[i..i + b.len()];
        if small {
            for (slot, &y) in row.iter_mut().zip(b) {
                *slot += (x * y) as u128;
            }
        } else {
            for (slot, &y) in row.iter_mut().zip(b) {
                *slot += (x as u128 * y as u128) % p;
            }
        }
    }
}

/// Inverse by the extended Euclidean algorithm in F_p[v], or the proper gcd
/// with the modulus.
pub fn algebra_invert(a: &EtaleElem, alg: &EtaleAlgebra) -> Inverse {
    let f = alg.field();
    if a.is_zero() {
        return Inverse::Zero;
    }
    // Invariant: s * a = r (mod modulus).
    let (mut r0, mut r1) = (alg.modulus().clone(), alg.lift(a));
    let (mut s0, mut s1) = (UniPoly::zero(), UniPoly::constant(f, 1));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(f, &r1);
        let s = s0.sub(f, &q.mul(f, &s1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
    }
    if r0.degree() != Some(0) {
        return Inverse::Signal(alg.signal(r0.monic(f)));
    }
    let c = f.inv(r0.coeffs()[0]).expect("nonzero constant");
    Inverse::Unit(alg.from_poly(&s0.scale(f, c)))
}
