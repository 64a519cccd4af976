//! Dense polynomials in s and t over F_p.

use d6lab_core::fields::PrimeField;

use crate::poly::{DiffPoly, Var};
use crate::upoly::{self, Dense};

/// `rows[j]` is the coefficient of t^j, a dense polynomial in s. Trailing
/// zero rows and trailing zeros within rows are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bivariate {
    rows: Vec<Dense<u64>>,
}

impl Bivariate {
    pub fn new(f: &PrimeField, rows: Vec<Dense<u64>>) -> Self {
        let mut rows: Vec<Dense<u64>> = rows.into_iter().map(|r| upoly::trim(f, r)).collect();
        while rows.last().is_some_and(|r| r.is_empty()) {
            rows.pop();
        }
        Bivariate { rows }
    }

    /// From a polynomial in t and s only.
    pub fn from_diff(f: &PrimeField, p: &DiffPoly<u64>) -> Self {
        let mut rows: Vec<Dense<u64>> = vec![Vec::new(); p.degree_in(Var::T).map_or(0, |d| d as usize + 1)];
        for (m, c) in p.terms() {
            assert!(m.exp(Var::S1) == 0 && m.exp(Var::S2) == 0 && m.exp(Var::S3) == 0, "not bivariate");
            let row = &mut rows[m.exp(Var::T) as usize];
            let e = m.exp(Var::S) as usize;
            if row.len() <= e {
                row.resize(e + 1, 0);
            }
            row[e] = *c;
        }
        Self::new(f, rows)
    }

    pub fn rows(&self) -> &[Dense<u64>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coeff(&self, i_s: usize, j_t: usize) -> u64 {
        self.rows.get(j_t).and_then(|r| r.get(i_s)).copied().unwrap_or(0)
    }

    pub fn deg_t(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn deg_s(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| upoly::degree(r)).max()
    }

    /// Exchanges s and t.
    pub fn transpose(&self, f: &PrimeField) -> Self {
        let ns = self.deg_s().map_or(0, |d| d + 1);
        let rows = (0..ns).map(|i| self.rows.iter().map(|r| r.get(i).copied().unwrap_or(0)).collect()).collect();
        Self::new(f, rows)
    }

    /// The polynomial in t at s = s0.
    pub fn eval_s(&self, f: &PrimeField, s0: u64) -> Dense<u64> {
        upoly::trim(f, self.rows.iter().map(|r| upoly::eval(f, r, &s0)).collect())
    }

    /// The polynomial in s at t = t0.
    pub fn eval_t(&self, f: &PrimeField, t0: u64) -> Dense<u64> {
        self.transpose(f).eval_s(f, t0)
    }

    pub fn eval(&self, f: &PrimeField, s0: u64, t0: u64) -> u64 {
        upoly::eval(f, &self.eval_s(f, s0), &t0)
    }

    pub fn derivative_s(&self, f: &PrimeField) -> Self {
        Self::new(f, self.rows.iter().map(|r| upoly::derivative(f, r)).collect())
    }

    pub fn derivative_t(&self, f: &PrimeField) -> Self {
        let rows =
            self.rows.iter().enumerate().skip(1).map(|(j, r)| r.iter().map(|&c| f.mul(c, j as u64 % f.p())).collect()).collect();
        Self::new(f, rows)
    }

    pub fn mul(&self, f: &PrimeField, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut rows: Vec<Dense<u64>> = vec![Vec::new(); self.rows.len() + o.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in o.rows.iter().enumerate() {
                let prod = upoly::mul(f, a, b);
                rows[i + j] = add_dense(f, &rows[i + j], &prod);
            }
        }
        Self::new(f, rows)
    }

    /// gcd of the row polynomials: the factor depending on s alone.
    pub fn content_s(&self, f: &PrimeField) -> Dense<u64> {
        let mut g: Dense<u64> = Vec::new();
        for r in &self.rows {
            g = upoly::gcd(f, &g, r);
            if g.len() == 1 {
                break;
            }
        }
        g
    }

    /// The factor depending on t alone.
    pub fn content_t(&self, f: &PrimeField) -> Dense<u64> {
        self.transpose(f).content_s(f)
    }

    pub fn div_s_poly(&self, f: &PrimeField, d: &[u64]) -> Option<Self> {
        let rows = self.rows.iter().map(|r| upoly::exact_div(f, r, d)).collect::<Option<Vec<_>>>()?;
        Some(Self::new(f, rows))
    }

    pub fn div_t_poly(&self, f: &PrimeField, d: &[u64]) -> Option<Self> {
        Some(self.transpose(f).div_s_poly(f, d)?.transpose(f))
    }

    /// Exact quotient as polynomials in t over F_p[s].
    pub fn exact_div(&self, f: &PrimeField, d: &Self) -> Option<Self> {
        let dt = d.deg_t().expect("nonzero divisor");
        let lead = &d.rows[dt];
        let mut r = self.rows.clone();
        if r.len() <= dt {
            return self.is_zero().then(Self::default);
        }
        let mut q: Vec<Dense<u64>> = vec![Vec::new(); r.len() - dt];
        for i in (0..q.len()).rev() {
            let top = std::mem::take(&mut r[i + dt]);
            if top.is_empty() {
                continue;
            }
            let c = upoly::exact_div(f, &top, lead)?;
            for (j, dj) in d.rows.iter().enumerate().take(dt) {
                let prod = upoly::mul(f, &c, dj);
                r[i + j] = sub_dense(f, &r[i + j], &prod);
            }
            q[i] = c;
        }
        r.iter().all(|row| row.is_empty()).then(|| Self::new(f, q))
    }
}

pub fn add_dense(f: &PrimeField, a: &[u64], b: &[u64]) -> Dense<u64> {
    let n = a.len().max(b.len());
    let out = (0..n).map(|i| f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))).collect();
    upoly::trim(f, out)
}

pub fn sub_dense(f: &PrimeField, a: &[u64], b: &[u64]) -> Dense<u64> {
    let n = a.len().max(b.len());
    let out = (0..n).map(|i| f.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))).collect();
    upoly::trim(f, out)
}

/// Coefficients (lowest first) of the polynomial of degree below
/// `xs.len()` through the points, by Newton divided differences.
pub fn interpolate(f: &PrimeField, xs: &[u64], ys: &[u64]) -> Dense<u64> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = f.sub(xs[i], xs[i - j]);
            dd[i] = f.div(f.sub(dd[i], dd[i - 1]), den).expect("distinct nodes");
        }
    }
    // Horner on the Newton form.
    let mut out: Dense<u64> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        // out = out * (x - xs[i]) + dd[i]
        out.push(0);
        for k in (1..out.len()).rev() {
            out[k] = f.sub(out[k - 1], f.mul(out[k], xs[i]));
        }
        out[0] = f.sub(dd[i], f.mul(out[0], xs[i]));
    }
    upoly::trim(f, out)
}
