//! Quotients of differential polynomials.

use crate::poly::{DiffPoly, Mono, Var};
use crate::scalars::Scalars;
use crate::upoly;

#[derive(Debug, Clone, PartialEq)]
pub struct DiffRational<C> {
    pub num: DiffPoly<C>,
    pub den: DiffPoly<C>,
}

impl<C: Clone + PartialEq> DiffRational<C> {
    /// `None` when the denominator is zero. The result carries no common
    /// monomial factor and has a denominator with leading coefficient one.
    pub fn new<K: Scalars<C = C>>(k: &K, num: DiffPoly<C>, den: DiffPoly<C>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let mut r = DiffRational { num, den };
        r.normalize(k);
        Some(r)
    }

    pub fn from_poly<K: Scalars<C = C>>(k: &K, num: DiffPoly<C>) -> Self {
        DiffRational { num, den: DiffPoly::one(k) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize<K: Scalars<C = C>>(&mut self, k: &K) {
        if self.num.is_zero() {
            self.den = DiffPoly::one(k);
            return;
        }
        let m = self.num.monomial_content().meet(self.den.monomial_content());
        if m != Mono::ONE {
            self.num = self.num.div_mono(m);
            self.den = self.den.div_mono(m);
        }
        let li = k.inv(self.den.lead().expect("nonzero")).expect("field");
        self.num = self.num.scale(k, &li);
        self.den = self.den.scale(k, &li);
    }

    /// Cancels every common factor that is a polynomial in one of `vars`
    /// alone. Complete when all denominators are products of such factors
    /// and monomials.
    pub fn reduce<K: Scalars<C = C>>(&mut self, k: &K, vars: &[Var]) {
        for &v in vars {
            loop {
                if self.num.is_zero() {
                    break;
                }
                let cd = self.den.content_in(k, v);
                if cd.len() <= 1 {
                    break;
                }
                let g = upoly::gcd(k, &self.num.content_in(k, v), &cd);
                if g.len() <= 1 {
                    break;
                }
                self.num = self.num.div_univariate(k, v, &g).expect("content divides");
                self.den = self.den.div_univariate(k, v, &g).expect("content divides");
            }
        }
        self.normalize(k);
    }

    pub fn add<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(k, self.num.add(k, &o.num), self.den.clone()).expect("nonzero");
        }
        let num = self.num.mul(k, &o.den).add(k, &o.num.mul(k, &self.den));
        Self::new(k, num, self.den.mul(k, &o.den)).expect("nonzero")
    }

    pub fn neg<K: Scalars<C = C>>(&self, k: &K) -> Self {
        DiffRational { num: self.num.neg(k), den: self.den.clone() }
    }

    pub fn sub<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Self {
        self.add(k, &o.neg(k))
    }

    pub fn mul<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Self {
        Self::new(k, self.num.mul(k, &o.num), self.den.mul(k, &o.den)).expect("nonzero")
    }

    pub fn mul_poly<K: Scalars<C = C>>(&self, k: &K, o: &DiffPoly<C>) -> Self {
        Self::new(k, self.num.mul(k, o), self.den.clone()).expect("nonzero")
    }

    pub fn scale<K: Scalars<C = C>>(&self, k: &K, c: &C) -> Self {
        Self::new(k, self.num.scale(k, c), self.den.clone()).expect("nonzero")
    }

    /// `None` when dividing by zero.
    pub fn div<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Option<Self> {
        Self::new(k, self.num.mul(k, &o.den), self.den.mul(k, &o.num))
    }

    pub fn square<K: Scalars<C = C>>(&self, k: &K) -> Self {
        self.mul(k, self)
    }

    /// Quotient rule for a partial derivative.
    pub fn derivative<K: Scalars<C = C>>(&self, k: &K, v: Var) -> Self {
        let num = self.num.derivative(k, v).mul(k, &self.den).sub(k, &self.num.mul(k, &self.den.derivative(k, v)));
        Self::new(k, num, self.den.mul(k, &self.den)).expect("nonzero")
    }

    /// Quotient rule for the total derivative in t.
    pub fn total_derivative<K: Scalars<C = C>>(&self, k: &K) -> Self {
        let num = self.num.total_derivative(k).mul(k, &self.den).sub(k, &self.num.mul(k, &self.den.total_derivative(k)));
        Self::new(k, num, self.den.mul(k, &self.den)).expect("nonzero")
    }

    /// Substitutes a quotient for `v`: with v = a/b and numerator of degree
    /// n in v, the numerator becomes sum c_i a^i b^(n-i) over b^n.
    pub fn substitute<K: Scalars<C = C>>(&self, k: &K, v: Var, q: &Self) -> Self {
        let homogenize = |p: &DiffPoly<C>, n: usize| -> DiffPoly<C> {
            let parts = p.coeffs_in(k, v);
            let mut a_pows = vec![DiffPoly::one(k)];
            let mut b_pows = vec![DiffPoly::one(k)];
            for i in 0..n {
                a_pows.push(a_pows[i].mul(k, &q.num));
                b_pows.push(b_pows[i].mul(k, &q.den));
            }
            let mut out = DiffPoly::zero();
            for (i, c) in parts.iter().enumerate() {
                if !c.is_zero() {
                    out = out.add(k, &c.mul(k, &a_pows[i]).mul(k, &b_pows[n - i]));
                }
            }
            out
        };
        let dn = self.num.degree_in(v).unwrap_or(0) as usize;
        let dd = self.den.degree_in(v).unwrap_or(0) as usize;
        let n = dn.max(dd);
        Self::new(k, homogenize(&self.num, n), homogenize(&self.den, n)).expect("substituted denominator nonzero")
    }

    pub fn map<K2: Scalars>(&self, k2: &K2, f: impl Fn(&C) -> K2::C) -> Option<DiffRational<K2::C>> {
        DiffRational::new(k2, self.num.map(k2, &f), self.den.map(k2, &f))
    }

    /// Value at a point in `VARS` order; `None` at a pole.
    pub fn eval_all<K: Scalars<C = C>>(&self, k: &K, point: &[C; 5]) -> Option<C> {
        let d = self.den.eval_all(k, point);
        k.inv(&d).map(|di| k.mul(&self.num.eval_all(k, point), &di))
    }
}
