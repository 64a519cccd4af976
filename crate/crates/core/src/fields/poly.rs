use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FiniteField;

/// Dense univariate polynomial, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<E> {
    coeffs: Vec<E>,
}

impl<E: Copy + Eq> UniPoly<E> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    /// Builds from coefficients (constant first), trimming zeros.
    pub fn new<F: FiniteField<Elem = E>>(field: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|&c| field.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints<F: FiniteField<Elem = E>>(field: &F, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn constant<F: FiniteField<Elem = E>>(field: &F, c: E) -> Self {
        Self::new(field, vec![c])
    }

    /// The monic linear polynomial x - a.
    pub fn linear<F: FiniteField<Elem = E>>(field: &F, a: E) -> Self {
        UniPoly { coeffs: vec![field.neg(a), field.one()] }
    }

    pub fn x<F: FiniteField<Elem = E>>(field: &F) -> Self {
        UniPoly { coeffs: vec![field.zero(), field.one()] }
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<E> {
        self.coeffs.last().copied()
    }

    pub fn coeff(&self, k: usize) -> Option<E> {
        self.coeffs.get(k).copied()
    }

    pub fn is_monic<F: FiniteField<Elem = E>>(&self, field: &F) -> bool {
        self.lead() == Some(field.one())
    }

    pub fn eval<F: FiniteField<Elem = E>>(&self, field: &F, x: E) -> E {
        self.coeffs
            .iter()
            .rev()
            .fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add<F: FiniteField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = field.zero();
        let c = (0..n)
            .map(|k| {
                field.add(
                    self.coeffs.get(k).copied().unwrap_or(z),
                    other.coeffs.get(k).copied().unwrap_or(z),
                )
            })
            .collect();
        Self::new(field, c)
    }

    pub fn sub<F: FiniteField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.scale(field, field.neg(field.one())))
    }

    pub fn scale<F: FiniteField<Elem = E>>(&self, field: &F, s: E) -> Self {
        Self::new(field, self.coeffs.iter().map(|&c| field.mul(c, s)).collect())
    }

    pub fn mul<F: FiniteField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::new(field, out)
    }

    pub fn monic<F: FiniteField<Elem = E>>(&self, field: &F) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => self.scale(field, field.inv(l).expect("nonzero leading coefficient")),
        }
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem<F: FiniteField<Elem = E>>(&self, field: &F, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let linv = field.inv(d.lead().unwrap()).unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![field.zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = field.mul(r[k], linv);
            if field.is_zero(c) {
                continue;
            }
            q[k - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[k - dd + j] = field.sub(r[k - dd + j], field.mul(c, dj));
            }
        }
        r.truncate(dd);
        (Self::new(field, q), Self::new(field, r))
    }

    pub fn rem<F: FiniteField<Elem = E>>(&self, field: &F, d: &Self) -> Self {
        self.divrem(field, d).1
    }

    /// base^e mod m, square-and-multiply.
    pub fn powmod<F: FiniteField<Elem = E>>(&self, field: &F, mut e: u128, m: &Self) -> Self {
        let mut acc = Self::constant(field, field.one()).rem(field, m);
        let mut b = self.rem(field, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &b).rem(field, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(field, &b).rem(field, m);
            }
        }
        acc
    }

    pub fn derivative<F: FiniteField<Elem = E>>(&self, field: &F) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| field.mul(c, field.from_int(k as i64)))
            .collect();
        Self::new(field, c)
    }

    /// Maps coefficients through an embedding into another field.
    pub fn map<G: FiniteField>(&self, target: &G, f: impl Fn(E) -> G::Elem) -> UniPoly<G::Elem> {
        UniPoly::new(target, self.coeffs.iter().map(|&c| f(c)).collect())
    }
}

/// Monic greatest common divisor; gcd(0, 0) = 0.
pub fn poly_gcd<F: FiniteField>(field: &F, a: &UniPoly<F::Elem>, b: &UniPoly<F::Elem>) -> UniPoly<F::Elem> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(field, &b);
        a = b;
        b = r;
    }
    a.monic(field)
}

/// All roots of `f` in the field, with multiplicity, in ascending order.
///
/// Splits the product of distinct linear factors gcd(f, x^q - x) by random
/// gcds with (x + a)^((q-1)/2) - 1. The generator is seeded so results are
/// reproducible; the roots themselves do not depend on the seed.
pub fn poly_roots<F: FiniteField>(field: &F, f: &UniPoly<F::Elem>, seed: u64) -> Vec<F::Elem> {
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let q = field.order();
    let x = UniPoly::x(field);
    let xq = x.powmod(field, q, f);
    let g = poly_gcd(field, f, &xq.sub(field, &x));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut distinct = Vec::new();
    split_linear(field, &g, &mut rng, &mut distinct);
    let mut roots = Vec::new();
    for r in distinct {
        let lin = UniPoly::linear(field, r);
        let mut rest = f.clone();
        loop {
            let (quo, rem) = rest.divrem(field, &lin);
            if !rem.is_zero() {
                break;
            }
            roots.push(r);
            rest = quo;
        }
    }
    roots.sort();
    roots
}

fn split_linear<F: FiniteField>(
    field: &F,
    g: &UniPoly<F::Elem>,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<F::Elem>,
) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let m = g.monic(field);
            out.push(field.neg(m.coeffs()[0]));
        }
        Some(_) => loop {
            let a = field.element(rng.gen_range(0..field.order()));
            let shifted = UniPoly::new(field, vec![a, field.one()]);
            let h = shifted.powmod(field, (field.order() - 1) / 2, g);
            let h = h.sub(field, &UniPoly::constant(field, field.one()));
            let d = poly_gcd(field, g, &h);
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && dd < g.degree().unwrap() {
                let (other, _) = g.divrem(field, &d);
                split_linear(field, &d, rng, out);
                split_linear(field, &other, rng, out);
                return;
            }
        },
    }
}
