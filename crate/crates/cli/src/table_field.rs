//! A tiny F_{p^k} with exp/log tables, independent of the library's
//! extension fields. Only used as a counting oracle for small q.

use d6lab_core::fields::FqElem;

pub struct TableField {
    p: u64,
    k: u32,
    q: usize,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl TableField {
    /// Builds the field from the first primitive monic polynomial found by
    /// scanning tails in index order.
    pub fn new(p: u64, k: u32) -> Self {
        let q = p.pow(k) as usize;
        let kk = k as usize;
        for tail in 0..q {
            let m: Vec<u64> = (0..k).map(|i| (tail as u64 / p.pow(i)) % p).collect();
            if m[0] == 0 {
                continue;
            }
            let mut exp = Vec::with_capacity(q - 1);
            let mut log = vec![u32::MAX; q];
            let mut cur = vec![0u64; kk];
            cur[0] = 1;
            let mut primitive = true;
            for i in 0..q - 1 {
                let idx = pack(p, &cur);
                if log[idx] != u32::MAX {
                    primitive = false;
                    break;
                }
                log[idx] = i as u32;
                exp.push(idx as u32);
                let top = cur[kk - 1];
                for j in (1..kk).rev() {
                    cur[j] = cur[j - 1];
                }
                cur[0] = 0;
                for j in 0..kk {
                    cur[j] = (cur[j] + (p - m[j]) * top) % p;
                }
            }
            if primitive {
                return TableField { p, k, q, exp, log };
            }
        }
        unreachable!("primitive polynomials exist in every degree")
    }

    pub fn size(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let p = self.p as usize;
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..self.k {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        let p = self.p as usize;
        let (mut a, mut out, mut place) = (a, 0, 1);
        for _ in 0..self.k {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a] as usize + self.log[b] as usize) % (self.q - 1)] as usize
    }

    pub fn chi(&self, a: usize) -> i128 {
        match a {
            0 => 0,
            _ if self.log[a] % 2 == 0 => 1,
            _ => -1,
        }
    }

    /// Some root of a monic polynomial with base-field coefficients.
    pub fn root_of(&self, poly: &[u64]) -> Option<usize> {
        (0..self.q).find(|&z| poly.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, z), c as usize)) == 0)
    }

    /// Image of an element of the library's F_{p^2}, given the image theta
    /// of its generator (needed only for elements outside F_p).
    pub fn embed(&self, x: FqElem, theta: Option<usize>) -> usize {
        match x.as_base() {
            Some(v) => v as usize,
            None => {
                let th = theta.expect("quadratic elements need an even degree");
                self.add(x.0[0] as usize, self.mul(x.0[1] as usize, th))
            }
        }
    }
}

fn pack(p: u64, digits: &[u64]) -> usize {
    digits.iter().rev().fold(0u64, |acc, &d| acc * p + d) as usize
}
