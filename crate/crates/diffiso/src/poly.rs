//! Sparse polynomials in t, s and the derivatives s1 = s', s2 = s'', s3 = s'''.

use std::collections::HashMap;
use std::fmt;

use crate::scalars::Scalars;
use crate::upoly::{self, Dense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    S,
    S1,
    S2,
    S3,
}

pub const VARS: [Var; 5] = [Var::T, Var::S, Var::S1, Var::S2, Var::S3];

const BITS: u32 = 12;
const MASK: u64 = (1 << BITS) - 1;

impl Var {
    fn shift(self) -> u32 {
        BITS * self as u32
    }

    fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
            Var::S1 => "s1",
            Var::S2 => "s2",
            Var::S3 => "s3",
        }
    }
}

/// Exponent vector packed twelve bits per variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn of(v: Var, e: u32) -> Mono {
        assert!((e as u64) <= MASK, "exponent overflow");
        Mono((e as u64) << v.shift())
    }

    pub fn exp(self, v: Var) -> u32 {
        ((self.0 >> v.shift()) & MASK) as u32
    }

    pub fn with(self, v: Var, e: u32) -> Mono {
        assert!((e as u64) <= MASK, "exponent overflow");
        Mono((self.0 & !(MASK << v.shift())) | ((e as u64) << v.shift()))
    }

    pub fn mul(self, o: Mono) -> Mono {
        for v in VARS {
            assert!(self.exp(v) + o.exp(v) <= MASK as u32, "exponent overflow");
        }
        Mono(self.0 + o.0)
    }

    /// Componentwise minimum.
    pub fn meet(self, o: Mono) -> Mono {
        VARS.iter().fold(Mono::ONE, |m, &v| m.with(v, self.exp(v).min(o.exp(v))))
    }

    pub fn div(self, o: Mono) -> Option<Mono> {
        VARS.iter().all(|&v| self.exp(v) >= o.exp(v)).then(|| Mono(self.0 - o.0))
    }
}

/// Canonical sparse polynomial: terms sorted by packed monomial, no zeros.
#[derive(Clone, PartialEq)]
pub struct DiffPoly<C> {
    terms: Vec<(Mono, C)>,
}

impl<C: fmt::Debug> fmt::Debug for DiffPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:?}")?;
            for v in VARS {
                match m.exp(v) {
                    0 => {}
                    1 => write!(f, "*{}", v.name())?,
                    e => write!(f, "*{}^{e}", v.name())?,
                }
            }
        }
        Ok(())
    }
}

impl<C: Clone + PartialEq> DiffPoly<C> {
    pub fn zero() -> Self {
        DiffPoly { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(Mono, C)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest exponent of `v`; `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.exp(v)).max()
    }

    pub fn total_degree_in(&self, vars: &[Var]) -> Option<u32> {
        self.terms.iter().map(|(m, _)| vars.iter().map(|&v| m.exp(v)).sum()).max()
    }

    pub fn is_free_of(&self, v: Var) -> bool {
        self.degree_in(v).unwrap_or(0) == 0
    }

    /// Smallest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter().map(|(m, _)| *m);
        match it.next() {
            None => Mono::ONE,
            Some(first) => it.fold(first, Mono::meet),
        }
    }

    pub fn div_mono(&self, m: Mono) -> Self {
        let terms = self.terms.iter().map(|(t, c)| (t.div(m).expect("monomial divides"), c.clone())).collect();
        DiffPoly { terms }
    }

    /// Leading coefficient in the packed monomial order.
    pub fn lead(&self) -> Option<&C> {
        self.terms.last().map(|(_, c)| c)
    }
}

impl<C: Clone + PartialEq> DiffPoly<C> {
    pub fn from_terms<K: Scalars<C = C>>(k: &K, terms: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut acc: HashMap<Mono, C> = HashMap::new();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(slot) => *slot = k.add(slot, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<(Mono, C)> = acc.into_iter().filter(|(_, c)| !k.is_zero(c)).collect();
        terms.sort_unstable_by_key(|(m, _)| *m);
        DiffPoly { terms }
    }

    pub fn constant<K: Scalars<C = C>>(k: &K, c: C) -> Self {
        Self::from_terms(k, [(Mono::ONE, c)])
    }

    pub fn from_i64<K: Scalars<C = C>>(k: &K, c: i64) -> Self {
        Self::constant(k, k.from_i64(c))
    }

    pub fn one<K: Scalars<C = C>>(k: &K) -> Self {
        Self::constant(k, k.one())
    }

    pub fn var<K: Scalars<C = C>>(k: &K, v: Var) -> Self {
        DiffPoly { terms: vec![(Mono::of(v, 1), k.one())] }
    }

    /// Dense univariate coefficients (lowest first) in `v`.
    pub fn univariate<K: Scalars<C = C>>(k: &K, v: Var, coeffs: &[C]) -> Self {
        Self::from_terms(k, coeffs.iter().enumerate().map(|(e, c)| (Mono::of(v, e as u32), c.clone())))
    }

    pub fn from_ints<K: Scalars<C = C>>(k: &K, v: Var, coeffs: &[i64]) -> Self {
        let cs: Vec<C> = coeffs.iter().map(|&c| k.from_i64(c)).collect();
        Self::univariate(k, v, &cs)
    }

    /// Dense coefficients when the polynomial involves only `v`.
    pub fn as_univariate<K: Scalars<C = C>>(&self, k: &K, v: Var) -> Option<Dense<C>> {
        let mut out = vec![k.zero(); self.degree_in(v).map_or(0, |d| d as usize + 1)];
        for (m, c) in &self.terms {
            if m.with(v, 0) != Mono::ONE {
                return None;
            }
            out[m.exp(v) as usize] = c.clone();
        }
        Some(out)
    }

    fn merge<K: Scalars<C = C>>(&self, k: &K, o: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &C| if negate { k.neg(c) } else { c.clone() };
        while i < self.terms.len() || j < o.terms.len() {
            let take_left = j == o.terms.len() || (i < self.terms.len() && self.terms[i].0 < o.terms[j].0);
            let take_right = i == self.terms.len() || (j < o.terms.len() && o.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                out.push((o.terms[j].0, sign(&o.terms[j].1)));
                j += 1;
            } else {
                let c = if negate {
                    k.sub(&self.terms[i].1, &o.terms[j].1)
                } else {
                    k.add(&self.terms[i].1, &o.terms[j].1)
                };
                if !k.is_zero(&c) {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        DiffPoly { terms: out }
    }

    pub fn add<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Self {
        self.merge(k, o, false)
    }

    pub fn sub<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Self {
        self.merge(k, o, true)
    }

    pub fn neg<K: Scalars<C = C>>(&self, k: &K) -> Self {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (*m, k.neg(c))).collect() }
    }

    pub fn scale<K: Scalars<C = C>>(&self, k: &K, s: &C) -> Self {
        if k.is_zero(s) {
            return Self::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (*m, k.mul(c, s))).collect() }
    }

    pub fn mul_mono(&self, m: Mono) -> Self {
        DiffPoly { terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect() }
    }

    pub fn mul<K: Scalars<C = C>>(&self, k: &K, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if o.terms.len() == 1 && o.terms[0].0 == Mono::ONE {
            return self.scale(k, &o.terms[0].1);
        }
        let mut acc: HashMap<Mono, C> = HashMap::with_capacity(self.len() * o.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(*mb);
                let c = k.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(slot) => *slot = k.add(slot, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<(Mono, C)> = acc.into_iter().filter(|(_, c)| !k.is_zero(c)).collect();
        terms.sort_unstable_by_key(|(m, _)| *m);
        DiffPoly { terms }
    }

    pub fn pow<K: Scalars<C = C>>(&self, k: &K, e: u32) -> Self {
        let mut acc = Self::one(k);
        for _ in 0..e {
            acc = acc.mul(k, self);
        }
        acc
    }

    pub fn derivative<K: Scalars<C = C>>(&self, k: &K, v: Var) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.exp(v) > 0).map(|(m, c)| {
            let e = m.exp(v);
            (m.with(v, e - 1), k.mul(c, &k.from_i64(e as i64)))
        });
        Self::from_terms(k, terms)
    }

    /// d/dt with s a function of t: the operator t + s1 d/ds + s2 d/ds1 + s3 d/ds2.
    ///
    /// Panics when s3 occurs, since its derivative is not representable.
    pub fn total_derivative<K: Scalars<C = C>>(&self, k: &K) -> Self {
        assert!(self.is_free_of(Var::S3), "total derivative would need s4");
        let mut out = self.derivative(k, Var::T);
        for (v, next) in [(Var::S, Var::S1), (Var::S1, Var::S2), (Var::S2, Var::S3)] {
            out = out.add(k, &self.derivative(k, v).mul_mono(Mono::of(next, 1)));
        }
        out
    }

    /// Coefficients as a polynomial in `v`: entry e multiplies v^e.
    pub fn coeffs_in<K: Scalars<C = C>>(&self, k: &K, v: Var) -> Vec<Self> {
        let n = self.degree_in(v).map_or(0, |d| d as usize + 1);
        let mut parts: Vec<Vec<(Mono, C)>> = vec![Vec::new(); n];
        for (m, c) in &self.terms {
            parts[m.exp(v) as usize].push((m.with(v, 0), c.clone()));
        }
        parts.into_iter().map(|t| Self::from_terms(k, t)).collect()
    }

    /// Substitutes a scalar for `v`.
    pub fn eval_var<K: Scalars<C = C>>(&self, k: &K, v: Var, x: &C) -> Self {
        let mut powers = vec![k.one()];
        let deg = self.degree_in(v).unwrap_or(0) as usize;
        for i in 0..deg {
            let next = k.mul(&powers[i], x);
            powers.push(next);
        }
        Self::from_terms(k, self.terms.iter().map(|(m, c)| (m.with(v, 0), k.mul(c, &powers[m.exp(v) as usize]))))
    }

    /// Substitutes a polynomial for `v` by Horner's rule.
    pub fn substitute<K: Scalars<C = C>>(&self, k: &K, v: Var, q: &Self) -> Self {
        let parts = self.coeffs_in(k, v);
        parts.iter().rev().fold(Self::zero(), |acc, c| acc.mul(k, q).add(k, c))
    }

    /// Value at a point given in `VARS` order.
    pub fn eval_all<K: Scalars<C = C>>(&self, k: &K, point: &[C; 5]) -> C {
        let mut cache: Vec<Vec<C>> = VARS.iter().map(|_| vec![k.one()]).collect();
        let mut out = k.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &v) in VARS.iter().enumerate() {
                let e = m.exp(v) as usize;
                while cache[i].len() <= e {
                    let next = k.mul(cache[i].last().unwrap(), &point[i]);
                    cache[i].push(next);
                }
                if e > 0 {
                    term = k.mul(&term, &cache[i][e]);
                }
            }
            out = k.add(&out, &term);
        }
        out
    }

    pub fn map<K2: Scalars>(&self, k2: &K2, f: impl Fn(&C) -> K2::C) -> DiffPoly<K2::C> {
        DiffPoly::from_terms(k2, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Exchanges the roles of two variables.
    pub fn swap<K: Scalars<C = C>>(&self, k: &K, a: Var, b: Var) -> Self {
        Self::from_terms(
            k,
            self.terms.iter().map(|(m, c)| (m.with(a, m.exp(b)).with(b, m.exp(a)), c.clone())),
        )
    }

    /// Groups the terms by their monomial with `v` removed; each group is a
    /// dense univariate polynomial in `v`.
    pub fn groups_in<K: Scalars<C = C>>(&self, k: &K, v: Var) -> Vec<(Mono, Dense<C>)> {
        let mut map: HashMap<Mono, Dense<C>> = HashMap::new();
        for (m, c) in &self.terms {
            let key = m.with(v, 0);
            let e = m.exp(v) as usize;
            let slot = map.entry(key).or_default();
            if slot.len() <= e {
                slot.resize(e + 1, k.zero());
            }
            slot[e] = c.clone();
        }
        let mut out: Vec<(Mono, Dense<C>)> = map.into_iter().collect();
        out.sort_unstable_by_key(|(m, _)| *m);
        out
    }

    /// gcd over all groups of `groups_in(v)`: the content as a polynomial in
    /// the other variables.
    pub fn content_in<K: Scalars<C = C>>(&self, k: &K, v: Var) -> Dense<C> {
        let mut g: Dense<C> = Vec::new();
        for (_, d) in self.groups_in(k, v) {
            g = upoly::gcd(k, &g, &d);
            if g.len() == 1 {
                break;
            }
        }
        g
    }

    /// Exact division by a univariate polynomial in `v`.
    pub fn div_univariate<K: Scalars<C = C>>(&self, k: &K, v: Var, d: &[C]) -> Option<Self> {
        let mut terms = Vec::with_capacity(self.len());
        for (key, g) in self.groups_in(k, v) {
            let q = upoly::exact_div(k, &g, d)?;
            for (e, c) in q.into_iter().enumerate() {
                terms.push((key.with(v, e as u32), c));
            }
        }
        Some(Self::from_terms(k, terms))
    }
}
