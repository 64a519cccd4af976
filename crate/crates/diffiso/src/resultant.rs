//! Res_{s'}(F, G) over F_p by evaluation and interpolation.

use d6lab_core::fields::PrimeField;
use rayon::prelude::*;

use crate::bivariate::{interpolate, Bivariate};
use crate::error::DiffisoError;
use crate::poly::{DiffPoly, Var};
use crate::upoly::{self, Dense};

/// Determinant of an n x n matrix over F_p, consuming it.
pub fn determinant(f: &PrimeField, mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            det = f.neg(det);
        }
        det = f.mul(det, a[col][col]);
        let inv = f.inv(a[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            if a[r][col] == 0 {
                continue;
            }
            let factor = f.mul(a[r][col], inv);
            for c in col..n {
                a[r][c] = f.sub(a[r][c], f.mul(factor, a[col][c]));
            }
        }
    }
    det
}

/// Resultant of a (formal degree a.len()-1) and b (formal degree
/// b.len()-1), coefficients lowest first, via the Sylvester matrix. Formal
/// degrees keep specializations consistent when leading terms vanish.
pub fn sylvester_resultant(f: &PrimeField, a: &[u64], b: &[u64]) -> u64 {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![0u64; size];
        for (k, &c) in a.iter().rev().enumerate() {
            row[i + k] = c;
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![0u64; size];
        for (k, &c) in b.iter().rev().enumerate() {
            row[i + k] = c;
        }
        rows.push(row);
    }
    determinant(f, rows)
}

/// Coefficients in s' as polynomials in (s, t).
fn s1_coefficients(f: &PrimeField, p: &DiffPoly<u64>) -> Vec<Bivariate> {
    p.coeffs_in(f, Var::S1).iter().map(|c| Bivariate::from_diff(f, c)).collect()
}

fn degree_bound(fc: &[Bivariate], gc: &[Bivariate], deg: impl Fn(&Bivariate) -> Option<usize>) -> usize {
    let d = |cs: &[Bivariate]| cs.iter().filter_map(&deg).max().unwrap_or(0);
    (gc.len() - 1) * d(fc) + (fc.len() - 1) * d(gc)
}

#[derive(Debug, Clone)]
pub struct ResultantInput {
    f_coeffs: Vec<Bivariate>,
    g_coeffs: Vec<Bivariate>,
}

impl ResultantInput {
    pub fn new(field: &PrimeField, f: &DiffPoly<u64>, g: &DiffPoly<u64>) -> Result<Self, DiffisoError> {
        if f == g {
            return Err(DiffisoError::BadInput("the resultant of F with itself vanishes".into()));
        }
        for (name, p) in [("F", f), ("G", g)] {
            if p.degree_in(Var::S1).unwrap_or(0) == 0 {
                return Err(DiffisoError::BadInput(format!("{name} does not involve s'")));
            }
            if !p.is_free_of(Var::S2) || !p.is_free_of(Var::S3) {
                return Err(DiffisoError::BadInput(format!("{name} is not first order")));
            }
        }
        Ok(ResultantInput { f_coeffs: s1_coefficients(field, f), g_coeffs: s1_coefficients(field, g) })
    }

    /// Sylvester bounds on (deg_s R, deg_t R).
    pub fn degree_bounds(&self) -> (usize, usize) {
        (
            degree_bound(&self.f_coeffs, &self.g_coeffs, Bivariate::deg_s),
            degree_bound(&self.f_coeffs, &self.g_coeffs, Bivariate::deg_t),
        )
    }

    fn specialize_s(&self, f: &PrimeField, s0: u64) -> (Vec<Dense<u64>>, Vec<Dense<u64>>) {
        let ev = |cs: &[Bivariate]| cs.iter().map(|c| c.eval_s(f, s0)).collect();
        (ev(&self.f_coeffs), ev(&self.g_coeffs))
    }

    /// Res_{s'} at a point.
    pub fn value(&self, f: &PrimeField, s0: u64, t0: u64) -> u64 {
        let (fs, gs) = self.specialize_s(f, s0);
        row_value(f, &fs, &gs, t0)
    }
}

fn row_value(f: &PrimeField, fs: &[Dense<u64>], gs: &[Dense<u64>], t0: u64) -> u64 {
    let a: Vec<u64> = fs.iter().map(|c| upoly::eval(f, c, &t0)).collect();
    let b: Vec<u64> = gs.iter().map(|c| upoly::eval(f, c, &t0)).collect();
    sylvester_resultant(f, &a, &b)
}

/// Res_{s'}(F, G) as a polynomial in s and t.
///
/// The grid is sized from the Sylvester degree bounds, so the interpolant
/// is exact; two further points off the grid are checked anyway.
pub fn resultant_r(field: &PrimeField, f: &DiffPoly<u64>, g: &DiffPoly<u64>) -> Result<Bivariate, DiffisoError> {
    let input = ResultantInput::new(field, f, g)?;
    let (bs, bt) = input.degree_bounds();
    let p = field.p();
    if (p as u128) <= 2 * (bs.max(bt) as u128 + 4) {
        return Err(DiffisoError::UnluckyPrime { p, reason: format!("too small for degree bounds {bs}, {bt}") });
    }
    let s_nodes: Vec<u64> = (1..=bs as u64 + 1).collect();
    let t_nodes: Vec<u64> = (1..=bt as u64 + 1).collect();
    // Row k: R(s_k, t) as a polynomial in t.
    let rows: Vec<Dense<u64>> = s_nodes
        .par_iter()
        .map(|&s0| {
            let (fs, gs) = input.specialize_s(field, s0);
            let vals: Vec<u64> = t_nodes.iter().map(|&t0| row_value(field, &fs, &gs, t0)).collect();
            interpolate(field, &t_nodes, &vals)
        })
        .collect();
    let coeff_s_major: Vec<Dense<u64>> = (0..=bt)
        .into_par_iter()
        .map(|j| {
            let vals: Vec<u64> = rows.iter().map(|r| r.get(j).copied().unwrap_or(0)).collect();
            interpolate(field, &s_nodes, &vals)
        })
        .collect();
    // coeff_s_major[j] is the coefficient of t^j as a polynomial in s.
    let r = Bivariate::new(field, coeff_s_major);
    for (s0, t0) in [(p - 7, p - 11), (p / 3 + 1, p / 5 + 2)] {
        if r.eval(field, s0, t0) != input.value(field, s0, t0) {
            return Err(DiffisoError::UnluckyPrime { p, reason: "interpolation check failed".into() });
        }
    }
    Ok(r)
}
