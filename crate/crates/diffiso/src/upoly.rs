//! Dense univariate polynomials over a `Scalars` ring, lowest degree first.

use crate::scalars::Scalars;

pub type Dense<C> = Vec<C>;

pub fn trim<K: Scalars>(k: &K, mut a: Dense<K::C>) -> Dense<K::C> {
    while a.last().is_some_and(|c| k.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn degree<C>(a: &[C]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn mul<K: Scalars>(k: &K, a: &[K::C], b: &[K::C]) -> Dense<K::C> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    trim(k, out)
}

/// Quotient and remainder; `b` must be nonzero and trimmed.
pub fn divrem<K: Scalars>(k: &K, a: &[K::C], b: &[K::C]) -> (Dense<K::C>, Dense<K::C>) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = k.inv(&b[db]).expect("trimmed divisor");
    let mut r: Dense<K::C> = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(k, r));
    }
    let mut q = vec![k.zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = k.mul(&r[i + db], &lead_inv);
        if k.is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] = k.sub(&r[i + j], &k.mul(&c, bj));
        }
        q[i] = c;
    }
    r.truncate(db);
    (trim(k, q), trim(k, r))
}

pub fn monic<K: Scalars>(k: &K, a: &[K::C]) -> Dense<K::C> {
    match a.last() {
        None => Vec::new(),
        Some(l) => {
            let li = k.inv(l).expect("trimmed");
            a.iter().map(|c| k.mul(c, &li)).collect()
        }
    }
}

/// Monic gcd; gcd(0, 0) = 0.
pub fn gcd<K: Scalars>(k: &K, a: &[K::C], b: &[K::C]) -> Dense<K::C> {
    let (mut a, mut b) = (trim(k, a.to_vec()), trim(k, b.to_vec()));
    while !b.is_empty() {
        let (_, r) = divrem(k, &a, &b);
        a = b;
        b = r;
    }
    monic(k, &a)
}

/// `a / b` when the division is exact.
pub fn exact_div<K: Scalars>(k: &K, a: &[K::C], b: &[K::C]) -> Option<Dense<K::C>> {
    let (q, r) = divrem(k, a, b);
    r.is_empty().then_some(q)
}

pub fn eval<K: Scalars>(k: &K, a: &[K::C], x: &K::C) -> K::C {
    a.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
}

pub fn derivative<K: Scalars>(k: &K, a: &[K::C]) -> Dense<K::C> {
    let out = a.iter().enumerate().skip(1).map(|(i, c)| k.mul(c, &k.from_i64(i as i64))).collect();
    trim(k, out)
}

/// Yun's squarefree decomposition of a nonzero polynomial whose degree is
/// below the characteristic: monic pieces with their multiplicities.
pub fn squarefree_factors<K: Scalars>(k: &K, f: &[K::C]) -> Vec<(Dense<K::C>, usize)> {
    let f = monic(k, &trim(k, f.to_vec()));
    let mut out = Vec::new();
    if f.len() <= 1 {
        return out;
    }
    let df = derivative(k, &f);
    let a0 = gcd(k, &f, &df);
    let mut b = exact_div(k, &f, &a0).expect("gcd divides");
    let c = exact_div(k, &df, &a0).expect("gcd divides");
    let mut d: Dense<K::C> = sub(k, &c, &derivative(k, &b));
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(k, &b, &d);
        b = exact_div(k, &b, &a).expect("gcd divides");
        let c = exact_div(k, &d, &a).expect("gcd divides");
        d = sub(k, &c, &derivative(k, &b));
        if a.len() > 1 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

pub fn sub<K: Scalars>(k: &K, a: &[K::C], b: &[K::C]) -> Dense<K::C> {
    let n = a.len().max(b.len());
    let z = k.zero();
    trim(k, (0..n).map(|i| k.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect())
}
