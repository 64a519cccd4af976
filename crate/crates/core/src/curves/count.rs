use std::collections::HashMap;

use super::{CurveError, EllipticCurve};
use crate::arith::{factor_u64, isqrt, lcm};
use crate::fields::FiniteField;

/// Fields up to this size are counted by a full character sum.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 12;
/// Largest field for which BSGS falls back to a character sum when the point
/// budget leaves the order ambiguous.
const FALLBACK_LIMIT: u128 = 1 << 26;
/// BSGS group orders must fit a u64 for factoring.
const BSGS_LIMIT: u128 = 1 << 62;
const POINTS_PER_SIDE: usize = 8;

/// #E(F_q) = q + 1 + sum_x chi(c f(x)).
pub fn exhaustive_order<F: FiniteField>(curve: &EllipticCurve<F>) -> u128 {
    let f = curve.field();
    let c = curve.cubic_coefficients()[0];
    let q = f.order();
    let mut s: i128 = 0;
    for i in 0..q {
        let x = f.element(i);
        s += f.quadratic_character(f.mul(c, curve.rhs(x))) as i128;
    }
    (q as i128 + 1 + s) as u128
}

/// Short Weierstrass curve y^2 = x^3 + a x + b with affine points.
struct Short<'a, F: FiniteField> {
    f: &'a F,
    a: F::Elem,
}

type Pt<E> = Option<(E, E)>;

impl<F: FiniteField> Short<'_, F> {
    fn add(&self, p: Pt<F::Elem>, q: Pt<F::Elem>) -> Pt<F::Elem> {
        let f = self.f;
        let (x1, y1) = match p {
            None => return q,
            Some(v) => v,
        };
        let (x2, y2) = match q {
            None => return p,
            Some(v) => v,
        };
        let m = if x1 == x2 {
            if f.add(y1, y2) == f.zero() {
                return None;
            }
            let num = f.add(f.mul(f.from_int(3), f.square(x1)), self.a);
            f.div(num, f.add(y1, y1)).unwrap()
        } else {
            f.div(f.sub(y2, y1), f.sub(x2, x1)).unwrap()
        };
        let x3 = f.sub(f.sub(f.square(m), x1), x2);
        let y3 = f.sub(f.mul(m, f.sub(x1, x3)), y1);
        Some((x3, y3))
    }

    fn mul(&self, p: Pt<F::Elem>, mut k: u128) -> Pt<F::Elem> {
        let mut acc = None;
        let mut b = p;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, b);
            }
            k >>= 1;
            if k > 0 {
                b = self.add(b, b);
            }
        }
        acc
    }

    /// Exact order of `p` given a multiple `m` of it.
    fn order_from_multiple(&self, p: Pt<F::Elem>, m: u128) -> u128 {
        let mut ord = m;
        for (l, k) in factor_u64(m as u64) {
            let l = l as u128;
            for _ in 0..k {
                if ord % l == 0 && self.mul(p, ord / l).is_none() {
                    ord /= l;
                } else {
                    break;
                }
            }
        }
        ord
    }

    /// Some multiple of the order of `p` in [lo, lo + width].
    fn multiple_in_interval(&self, p: Pt<F::Elem>, lo: u128, width: u128) -> u128 {
        let m = isqrt(width) + 1;
        let mut table: HashMap<F::Elem, (u128, F::Elem)> = HashMap::with_capacity(m as usize + 1);
        let mut jp = p;
        for j in 1..=m {
            let (x, y) = match jp {
                None => return j,
                Some(v) => v,
            };
            if let Some(&(j0, y0)) = table.get(&x) {
                // jP = +-j0 P.
                return if y == y0 { j - j0 } else { j + j0 };
            }
            table.insert(x, (j, y));
            jp = self.add(jp, p);
        }
        let step = self.mul(p, 2 * m + 1);
        let mut centre = lo + m;
        let mut g = self.mul(p, centre);
        loop {
            match g {
                None => return centre,
                Some((x, y)) => {
                    if let Some(&(j, y0)) = table.get(&x) {
                        // centre P = +-j P.
                        return if y == y0 { centre - j } else { centre + j };
                    }
                }
            }
            assert!(centre <= lo + width + m, "no multiple of the point order in the Hasse interval");
            centre += 2 * m + 1;
            g = self.add(g, step);
        }
    }
}

/// Order of E by baby-step/giant-step on E and its quadratic twist.
///
/// For each x0 = element(0), element(1), ... with g = f(x0) nonzero, the curve
/// g y^2 = f(x) carries the point (x0, 1); it is E when c g is a square and
/// the twist otherwise. Point orders constrain #E and 2q + 2 - #E until one
/// candidate remains in the Hasse interval.
pub(super) fn bsgs_order<F: FiniteField>(curve: &EllipticCurve<F>) -> Result<u128, CurveError> {
    let f = curve.field();
    let q = f.order();
    if q >= BSGS_LIMIT {
        return Err(CurveError::TooLarge(q));
    }
    let [c, a2, a4, _] = curve.cubic_coefficients();
    let w = isqrt(4 * q);
    let lo = q + 1 - w;
    let hi = q + 1 + w;
    let (mut l_e, mut l_t) = (1u128, 1u128);
    let (mut n_e, mut n_t) = (0usize, 0usize);
    let three_inv = f.inv(f.from_int(3)).unwrap();
    let mut index = 0u128;
    while index < q && (n_e < POINTS_PER_SIDE || n_t < POINTS_PER_SIDE) {
        let x0 = f.element(index);
        index += 1;
        let g = curve.rhs(x0);
        if f.is_zero(g) {
            continue;
        }
        let on_e = f.quadratic_character(f.mul(c, g)) == 1;
        if (on_e && n_e >= POINTS_PER_SIDE) || (!on_e && n_t >= POINTS_PER_SIDE) {
            continue;
        }
        // g y^2 = f(x)  ->  Y^2 = X^3 + a2 g X^2 + a4 g^2 X + a6 g^3 with X = g x, Y = g^2 y,
        // then X = X' - a2 g / 3 removes the quadratic term.
        let g2 = f.square(g);
        let b2 = f.mul(a2, g);
        let b4 = f.mul(a4, g2);
        let s = f.mul(b2, three_inv);
        let a = f.sub(b4, f.mul(b2, s));
        let xx = f.add(f.mul(g, x0), s);
        let short = Short { f, a };
        let pt = Some((xx, g2));
        let m = short.multiple_in_interval(pt, lo, hi - lo);
        let ord = short.order_from_multiple(pt, m);
        if on_e {
            l_e = lcm(l_e, ord);
            n_e += 1;
        } else {
            l_t = lcm(l_t, ord);
            n_t += 1;
        }
        if let Some(n) = unique_candidate(lo, hi, q, l_e, l_t) {
            return Ok(n);
        }
    }
    if q <= FALLBACK_LIMIT {
        return Ok(exhaustive_order(curve));
    }
    Err(CurveError::Ambiguous(q))
}

/// The unique N in [lo, hi] with l_e | N and l_t | 2q + 2 - N, if exactly one.
fn unique_candidate(lo: u128, hi: u128, q: u128, l_e: u128, l_t: u128) -> Option<u128> {
    // Walk the multiples of the larger modulus; N' = 2q + 2 - N on the twist side.
    let s = 2 * q + 2;
    let (step, other, a, b, flip) = if l_e >= l_t {
        (l_e, l_t, lo, hi, false)
    } else {
        (l_t, l_e, s - hi, s - lo, true)
    };
    let mut found = None;
    let mut n = a.div_ceil(step) * step;
    while n <= b {
        if (s - n) % other == 0 {
            if found.is_some() {
                return None;
            }
            found = Some(if flip { s - n } else { n });
        }
        n += step;
    }
    found
}
