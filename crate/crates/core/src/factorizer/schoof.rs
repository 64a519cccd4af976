//! Schoof's trace computation modulo an odd prime l, run over an étale
//! algebra A instead of a field.
//!
//! The generic l-torsion point P = (x, y) lives in S = R[y]/(y^2 - g(x)) with
//! R = A[x]/(psi_l). Points are kept in projective coordinates and added with
//! a complete addition law whose only exceptional pairs differ by a point of
//! order two, so no inversion is ever needed on odd-order torsion. The test
//! pi^2(P) + [p]P = [c] pi(P) then reduces to checking that three cross
//! products vanish, and a cross product that vanishes on some components of
//! A but not others exposes a factor of the modulus.

use super::algebra::{mac_into, EtaleAlgebra, EtaleElem, ZeroDivisorSignal};

/// y^2 = x^3 + a x + b over the algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortCurve {
    pub a: EtaleElem,
    pub b: EtaleElem,
}

/// Polynomials in x over A, stored as `rows` consecutive residues of width d.
type Flat = Vec<u64>;

fn rows(v: &Flat, d: usize) -> usize {
    v.len() / d
}

fn flat_mul(alg: &EtaleAlgebra, a: &Flat, b: &Flat) -> Flat {
    let d = alg.degree();
    let w = 2 * d - 1;
    let (ra, rb) = (rows(a, d), rows(b, d));
    if ra == 0 || rb == 0 {
        return Vec::new();
    }
    let mut acc = vec![0u128; (ra + rb - 1) * w];
    for i in 0..ra {
        for j in 0..rb {
            let off = (i + j) * w;
            mac_into(alg.field(), &mut acc[off..off + w], &a[i * d..(i + 1) * d], &b[j * d..(j + 1) * d]);
        }
    }
    acc.chunks(w).flat_map(|row| alg.reduce_wide(row)).collect()
}

fn flat_add(alg: &EtaleAlgebra, a: &Flat, b: &Flat) -> Flat {
    let f = alg.field();
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect()
}

fn flat_sub(alg: &EtaleAlgebra, a: &Flat, b: &Flat) -> Flat {
    let f = alg.field();
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| f.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect()
}

fn flat_scale(alg: &EtaleAlgebra, a: &Flat, s: u64) -> Flat {
    a.iter().map(|&c| alg.field().mul(c, s)).collect()
}

/// Drops zero leading rows.
fn trim(mut v: Flat, d: usize) -> Flat {
    while v.len() >= d && v[v.len() - d..].iter().all(|&c| c == 0) {
        v.truncate(v.len() - d);
    }
    v
}

fn from_rows(rows: &[EtaleElem]) -> Flat {
    rows.iter().flat_map(|r| r.0.iter().copied()).collect()
}

fn to_rows(v: &Flat, d: usize) -> Vec<EtaleElem> {
    v.chunks(d).map(|c| EtaleElem(c.to_vec())).collect()
}

/// The division polynomial f_n in x alone: psi_n for odd n and psi_n / y for
/// even n (so f_2 = 2). Coefficients constant first, zero rows trimmed.
pub fn division_polynomial(alg: &EtaleAlgebra, curve: &ShortCurve, n: usize) -> Vec<EtaleElem> {
    to_rows(&division_flat(alg, curve, n).pop().expect("at least f_0"), alg.degree())
}

/// f_0 ..= f_n.
fn division_flat(alg: &EtaleAlgebra, curve: &ShortCurve, n: usize) -> Vec<Flat> {
    let d = alg.degree();
    let k = |c: i64| alg.from_i64(c);
    let (a, b) = (&curve.a, &curve.b);
    let a2 = alg.square(a);
    let ab = alg.mul(a, b);
    let b2 = alg.square(b);
    let a3 = alg.mul(&a2, a);
    let sc = |c: i64, e: &EtaleElem| alg.mul(&k(c), e);
    let f3 = from_rows(&[alg.neg(&a2), sc(12, b), sc(6, a), k(0), k(3)]);
    let f4_inner = [
        alg.sub(&alg.neg(&sc(8, &b2)), &a3),
        alg.neg(&sc(4, &ab)),
        alg.neg(&sc(5, &a2)),
        sc(20, b),
        sc(5, a),
        k(0),
        k(1),
    ];
    let f4 = flat_scale(alg, &from_rows(&f4_inner), 4);
    let g = from_rows(&[b.clone(), a.clone(), k(0), k(1)]);
    let r2 = flat_mul(alg, &g, &g);
    let mut fs: Vec<Flat> = vec![Vec::new(), k(1).0, k(2).0, f3, f4];
    let half = alg.field().inv(2).expect("odd characteristic");
    let cube = |v: &Flat| flat_mul(alg, &flat_mul(alg, v, v), v);
    let sq = |v: &Flat| flat_mul(alg, v, v);
    for i in 5..=n {
        let m = i / 2;
        let next = if i % 2 == 1 {
            let left = flat_mul(alg, &fs[m + 2], &cube(&fs[m]));
            let right = flat_mul(alg, &fs[m - 1], &cube(&fs[m + 1]));
            if m % 2 == 0 {
                flat_sub(alg, &flat_mul(alg, &r2, &left), &right)
            } else {
                flat_sub(alg, &left, &flat_mul(alg, &r2, &right))
            }
        } else {
            let inner = flat_sub(
                alg,
                &flat_mul(alg, &fs[m + 2], &sq(&fs[m - 1])),
                &flat_mul(alg, &fs[m - 2], &sq(&fs[m + 1])),
            );
            flat_scale(alg, &flat_mul(alg, &fs[m], &inner), half)
        };
        fs.push(trim(next, d));
    }
    fs.truncate(n + 1);
    fs
}

/// R = A[x]/(psi) for a monic psi of degree m.
struct TorsionRing<'a> {
    alg: &'a EtaleAlgebra,
    d: usize,
    m: usize,
    /// Low coefficients of -psi.
    neg_psi: Flat,
    /// x^3 + a x + b.
    g: Flat,
}

impl<'a> TorsionRing<'a> {
    fn new(alg: &'a EtaleAlgebra, psi_monic: &Flat, curve: &ShortCurve) -> Self {
        let d = alg.degree();
        let m = rows(psi_monic, d) - 1;
        let neg_psi = psi_monic[..m * d].iter().map(|&c| alg.field().neg(c)).collect();
        let mut ring = TorsionRing { alg, d, m, neg_psi, g: Vec::new() };
        let mut g = ring.zero();
        g[..d].copy_from_slice(&curve.b.0);
        g[d..2 * d].copy_from_slice(&curve.a.0);
        let one = alg.one();
        ring.row_mut(&mut g, 3).copy_from_slice(&one.0);
        ring.g = g;
        ring
    }

    fn zero(&self) -> Flat {
        vec![0; self.m * self.d]
    }

    fn row_mut<'b>(&self, v: &'b mut Flat, i: usize) -> &'b mut [u64] {
        &mut v[i * self.d..(i + 1) * self.d]
    }

    fn x(&self) -> Flat {
        let mut v = self.zero();
        v[self.d] = 1;
        v
    }

    fn one(&self) -> Flat {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    fn mul(&self, a: &Flat, b: &Flat) -> Flat {
        let (d, m) = (self.d, self.m);
        let w = 2 * d - 1;
        let f = self.alg.field();
        let mut acc = vec![0u128; (2 * m - 1) * w];
        for i in 0..m {
            let ai = &a[i * d..(i + 1) * d];
            if ai.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..m {
                let off = (i + j) * w;
                mac_into(f, &mut acc[off..off + w], ai, &b[j * d..(j + 1) * d]);
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = self.alg.reduce_wide(&acc[k * w..(k + 1) * w]);
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            for j in 0..m {
                let off = (k - m + j) * w;
                mac_into(f, &mut acc[off..off + w], &c, &self.neg_psi[j * d..(j + 1) * d]);
            }
        }
        acc[..m * w].chunks(w).flat_map(|row| self.alg.reduce_wide(row)).collect()
    }

    fn pow(&self, a: &Flat, mut e: u128) -> Flat {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    fn scale(&self, a: &Flat, k: &EtaleElem) -> Flat {
        a.chunks(self.d).flat_map(|row| self.alg.mul(&EtaleElem(row.to_vec()), k).0).collect()
    }
}

fn is_zero(v: &Flat) -> bool {
    v.iter().all(|&c| c == 0)
}

/// e + o y in S.
#[derive(Clone)]
struct SElem {
    e: Flat,
    o: Flat,
}

impl TorsionRing<'_> {
    fn s_zero(&self) -> SElem {
        SElem { e: self.zero(), o: self.zero() }
    }

    fn s_add(&self, a: &SElem, b: &SElem) -> SElem {
        SElem { e: flat_add(self.alg, &a.e, &b.e), o: flat_add(self.alg, &a.o, &b.o) }
    }

    fn s_sub(&self, a: &SElem, b: &SElem) -> SElem {
        SElem { e: flat_sub(self.alg, &a.e, &b.e), o: flat_sub(self.alg, &a.o, &b.o) }
    }

    fn s_mul(&self, a: &SElem, b: &SElem) -> SElem {
        let prod = |x: &Flat, y: &Flat| if is_zero(x) || is_zero(y) { None } else { Some(self.mul(x, y)) };
        let plus = |x: Option<Flat>, y: Option<Flat>| match (x, y) {
            (Some(x), Some(y)) => flat_add(self.alg, &x, &y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => self.zero(),
        };
        let oo = prod(&a.o, &b.o).map(|v| self.mul(&v, &self.g));
        SElem { e: plus(prod(&a.e, &b.e), oo), o: plus(prod(&a.e, &b.o), prod(&a.o, &b.e)) }
    }

    fn s_scale(&self, a: &SElem, k: &EtaleElem) -> SElem {
        SElem { e: self.scale(&a.e, k), o: self.scale(&a.o, k) }
    }

    fn s_int(&self, a: &SElem, k: u64) -> SElem {
        SElem { e: flat_scale(self.alg, &a.e, k), o: flat_scale(self.alg, &a.o, k) }
    }
}

#[derive(Clone)]
struct Point {
    x: SElem,
    y: SElem,
    z: SElem,
}

struct Arith<'a> {
    ring: TorsionRing<'a>,
    a: EtaleElem,
    b3: EtaleElem,
    a_sq: EtaleElem,
}

impl Arith<'_> {
    fn identity(&self) -> Point {
        let r = &self.ring;
        Point { x: r.s_zero(), y: SElem { e: r.one(), o: r.zero() }, z: r.s_zero() }
    }

    /// Complete projective addition on y^2 = x^3 + a x + b. The law fails
    /// only when P - Q has order two.
    fn add(&self, p: &Point, q: &Point) -> Point {
        let r = &self.ring;
        let m = |u: &SElem, v: &SElem| r.s_mul(u, v);
        let t = r.s_add(&m(&p.x, &q.z), &m(&q.x, &p.z));
        let u = r.s_add(&m(&p.x, &q.y), &m(&q.x, &p.y));
        let w = r.s_add(&m(&p.y, &q.z), &m(&q.y, &p.z));
        let xx = m(&p.x, &q.x);
        let yy = m(&p.y, &q.y);
        let zz = m(&p.z, &q.z);
        let at = r.s_scale(&t, &self.a);
        let bzz = r.s_scale(&zz, &self.b3);
        let k1 = r.s_sub(&r.s_sub(&yy, &at), &bzz);
        let k2 = r.s_add(&r.s_add(&yy, &at), &bzz);
        let k3 = r.s_sub(&r.s_add(&r.s_scale(&xx, &self.a), &r.s_scale(&t, &self.b3)), &r.s_scale(&zz, &self.a_sq));
        let k4 = r.s_add(&r.s_int(&xx, 3), &r.s_scale(&zz, &self.a));
        Point {
            x: r.s_sub(&m(&u, &k1), &m(&w, &k3)),
            y: r.s_add(&m(&k2, &k1), &m(&k4, &k3)),
            z: r.s_add(&m(&w, &k2), &m(&u, &k4)),
        }
    }

    fn multiple(&self, p: &Point, mut k: u64) -> Point {
        let mut acc = self.identity();
        let mut base = p.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// The three cross products whose vanishing means P = Q projectively.
    fn cross(&self, p: &Point, q: &Point) -> [SElem; 3] {
        let r = &self.ring;
        let d = |a: &SElem, b: &SElem, c: &SElem, e: &SElem| r.s_sub(&r.s_mul(a, b), &r.s_mul(c, e));
        [d(&p.x, &q.y, &q.x, &p.y), d(&p.x, &q.z, &q.x, &p.z), d(&p.y, &q.z, &q.y, &p.z)]
    }
}

/// What a cross-product test says about the components of A.
enum Agreement {
    Everywhere,
    Split(ZeroDivisorSignal),
    Nowhere,
}

fn agreement(alg: &EtaleAlgebra, diffs: &[SElem]) -> Agreement {
    let d = alg.degree();
    let mut all_zero = true;
    for s in diffs {
        for part in [&s.e, &s.o] {
            for row in part.chunks(d) {
                if row.iter().all(|&c| c == 0) {
                    continue;
                }
                all_zero = false;
                if let Some(sig) = alg.zero_divisor(&EtaleElem(row.to_vec())) {
                    return Agreement::Split(sig);
                }
            }
        }
    }
    if all_zero {
        Agreement::Everywhere
    } else {
        Agreement::Nowhere
    }
}

/// The trace of `curve` modulo `ell` when it is the same in every component
/// of the algebra; otherwise a factor of the modulus.
///
/// Panics if `ell` is even or divisible by p.
pub fn schoof_trace_mod_l(alg: &EtaleAlgebra, curve: &ShortCurve, ell: u64) -> Result<u64, ZeroDivisorSignal> {
    let f = alg.field();
    let p = f.p();
    assert!(ell % 2 == 1 && ell >= 3 && ell % p != 0, "l must be an odd prime other than p");
    let d = alg.degree();
    let psi = division_flat(alg, curve, ell as usize).pop().expect("f_l");
    let m = ((ell * ell - 1) / 2) as usize;
    assert_eq!(rows(&psi, d), m + 1, "psi_l has degree (l^2 - 1)/2");
    let lead = &psi[m * d..];
    assert!(lead[0] == ell % p && lead[1..].iter().all(|&c| c == 0), "psi_l has leading coefficient l");
    let psi_monic = flat_scale(alg, &psi, f.inv(ell % p).expect("l is prime to p"));
    let ring = TorsionRing::new(alg, &psi_monic, curve);
    let arith = Arith {
        a: curve.a.clone(),
        b3: alg.scale(&curve.b, 3),
        a_sq: alg.square(&curve.a),
        ring,
    };
    let r = &arith.ring;
    let point = |x: Flat, ycoef: Flat| Point {
        x: SElem { e: x, o: r.zero() },
        y: SElem { e: r.zero(), o: ycoef },
        z: SElem { e: r.one(), o: r.zero() },
    };
    let p128 = p as u128;
    let xp = r.pow(&r.x(), p128);
    let gp = r.pow(&r.g, (p128 - 1) / 2);
    let xp2 = r.pow(&xp, p128);
    let gp2 = r.mul(&r.pow(&gp, p128), &gp);
    let generic = point(r.x(), r.one());
    let frob = point(xp, gp);
    let frob2 = point(xp2, gp2);
    let lhs = arith.add(&frob2, &arith.multiple(&generic, p % ell));
    // c = 0 needs the full comparison because the identity has X = Z = 0.
    match agreement(alg, &arith.cross(&lhs, &arith.identity())) {
        Agreement::Everywhere => return Ok(0),
        Agreement::Split(sig) => return Err(sig),
        Agreement::Nowhere => {}
    }
    // Now lhs is nowhere the identity, so equal x-coordinates mean lhs is
    // [c] pi(P) or its negative, and the y-coordinates decide which.
    let mut rhs = frob.clone();
    for c in 1..=ell / 2 {
        let x_diff = r.s_sub(&r.s_mul(&lhs.x, &rhs.z), &r.s_mul(&rhs.x, &lhs.z));
        match agreement(alg, std::slice::from_ref(&x_diff)) {
            Agreement::Everywhere => {
                let (yl, yr) = (r.s_mul(&lhs.y, &rhs.z), r.s_mul(&rhs.y, &lhs.z));
                for (diff, value) in [(r.s_sub(&yl, &yr), c), (r.s_add(&yl, &yr), ell - c)] {
                    match agreement(alg, std::slice::from_ref(&diff)) {
                        Agreement::Everywhere => return Ok(value),
                        Agreement::Split(sig) => return Err(sig),
                        Agreement::Nowhere => {}
                    }
                }
                unreachable!("equal x-coordinates force lhs = +-[c] pi(P)")
            }
            Agreement::Split(sig) => return Err(sig),
            Agreement::Nowhere => {}
        }
        rhs = arith.add(&rhs, &frob);
    }
    unreachable!("every component satisfies the characteristic equation for exactly one c")
}
