use thiserror::Error;

use crate::fields::PrimeField;

/// Largest prime for which a full table is built.
pub const TABLE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a lambda table for p = {0} exceeds the memory bound")]
pub struct ResourceLimit(pub u64);

/// T(lambda) = -sum_x chi(x (x - 1)(x - lambda)) for every lambda in F_p.
///
/// Entries at lambda = 0 and 1 are the (singular) character sums and are
/// never used as curve traces.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    p: u64,
    traces: Vec<i16>,
    chi: Vec<i8>,
}

impl LambdaTable {
    pub fn build(f: &PrimeField) -> Result<Self, ResourceLimit> {
        let p = f.p();
        if p > TABLE_LIMIT {
            return Err(ResourceLimit(p));
        }
        let n = p as usize;
        let mut chi = vec![-1i8; n];
        chi[0] = 0;
        for x in 1..n.div_ceil(2) {
            chi[(x as u64 * x as u64 % p) as usize] = 1;
        }
        // g(x) = chi(x (x - 1)); chi2 is chi repeated twice so that
        // chi(x - lambda) = chi2[x + p - lambda] without a reduction.
        let g: Vec<i8> = (0..n).map(|x| chi[x] * chi[(x + n - 1) % n]).collect();
        let mut chi2 = Vec::with_capacity(2 * n);
        chi2.extend_from_slice(&chi);
        chi2.extend_from_slice(&chi);
        let traces = (0..n)
            .map(|lambda| {
                let off = n - lambda;
                let window = &chi2[off..off + n];
                let s: i32 = dot(&g, window);
                -(s as i16)
            })
            .collect();
        Ok(LambdaTable { p, traces, chi })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The trace of y^2 = x (x - 1)(x - lambda).
    #[inline]
    pub fn trace(&self, lambda: u64) -> i64 {
        self.traces[lambda as usize] as i64
    }

    /// The quadratic character from the precomputed square table.
    #[inline]
    pub fn chi(&self, a: u64) -> i8 {
        self.chi[a as usize]
    }
}

/// Dot product of two +-1/0 vectors, in blocks narrow enough to vectorize.
fn dot(a: &[i8], b: &[i8]) -> i32 {
    let mut total = 0i32;
    for (ca, cb) in a.chunks(4096).zip(b.chunks(4096)) {
        let s: i16 = ca.iter().zip(cb).map(|(&x, &y)| (x * y) as i16).sum();
        total += s as i32;
    }
    total
}
