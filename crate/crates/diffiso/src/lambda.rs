//! The five Legendre parameters of the D6 family as rational functions.

use std::fmt;
use std::str::FromStr;

use d6lab_core::fields::FiniteField;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::poly::{DiffPoly, Var};
use crate::rational::DiffRational;
use crate::scalars::{Rationals, Scalars};
use crate::upoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LambdaChoice {
    /// The Legendre parameter of the base curve, normalized by sending the
    /// roots x^2 and ((x+3)/(x-1))^2 to 0 and 1.
    Base,
    Six,
    ThreeA,
    ThreeB,
    ThreeC,
}

pub const LAMBDAS: [LambdaChoice; 5] =
    [LambdaChoice::Base, LambdaChoice::Six, LambdaChoice::ThreeA, LambdaChoice::ThreeB, LambdaChoice::ThreeC];

impl LambdaChoice {
    pub fn label(self) -> &'static str {
        match self {
            LambdaChoice::Base => "base",
            LambdaChoice::Six => "6",
            LambdaChoice::ThreeA => "3a",
            LambdaChoice::ThreeB => "3b",
            LambdaChoice::ThreeC => "3c",
        }
    }

    /// Coprime numerator and denominator as dense polynomials, lowest
    /// degree first, with integer coefficients.
    pub fn int_coeffs(self) -> (Vec<i64>, Vec<i64>) {
        let mul = |a: &[i64], b: &[i64]| {
            let mut out = vec![0i64; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let prod = |fs: &[&[i64]]| fs.iter().fold(vec![1i64], |acc, f| mul(&acc, f));
        let q: &[i64] = &[3, 0, 1];
        let (um3, um1, up1, up3): (&[i64], &[i64], &[i64], &[i64]) = (&[-3, 1], &[-1, 1], &[1, 1], &[3, 1]);
        match self {
            LambdaChoice::Six => (vec![0, 4], prod(&[um1, up3])),
            LambdaChoice::ThreeA => (vec![0, 0, 16], prod(&[q, q])),
            LambdaChoice::ThreeB => (prod(&[um3, um3, up1, up1]), prod(&[q, q])),
            LambdaChoice::ThreeC => (prod(&[um1, um1, up3, up3]), prod(&[q, q])),
            LambdaChoice::Base => {
                // Clear (x+1)^2 (x-1)^2 from both difference quotients.
                let x2: &[i64] = &[0, 0, 1];
                let a = prod(&[um3, um3, um1, um1]);
                let b = prod(&[x2, up1, up1, um1, um1]);
                let c = prod(&[up3, up3, up1, up1]);
                let d = prod(&[x2, um1, um1, up1, up1]);
                let sub = |a: &[i64], b: &[i64]| -> Vec<i64> {
                    let n = a.len().max(b.len());
                    (0..n).map(|i| a.get(i).unwrap_or(&0) - b.get(i).unwrap_or(&0)).collect()
                };
                base_reduced(&sub(&a, &b), &sub(&c, &d))
            }
        }
    }

    /// The rational function in variable `v`.
    pub fn rational<K: Scalars>(self, k: &K, v: Var) -> DiffRational<K::C> {
        let (n, d) = self.int_coeffs();
        DiffRational::new(k, DiffPoly::from_ints(k, v, &n), DiffPoly::from_ints(k, v, &d)).expect("nonzero denominator")
    }

    /// Evaluates over a finite field; `None` at a pole.
    pub fn eval_in<F: FiniteField>(self, f: &F, x: F::Elem) -> Option<F::Elem> {
        let (n, d) = self.int_coeffs();
        let ev = |c: &[i64]| c.iter().rev().fold(f.zero(), |acc, &ci| f.add(f.mul(acc, x), f.from_int(ci)));
        f.div(ev(&n), ev(&d))
    }
}

/// Divides out the polynomial gcd and scales to coprime integers with a
/// positive leading denominator coefficient.
fn base_reduced(num: &[i64], den: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let k = Rationals;
    let to_q = |c: &[i64]| upoly::trim(&k, c.iter().map(|&x| k.from_i64(x)).collect());
    let (nq, dq) = (to_q(num), to_q(den));
    let g = upoly::gcd(&k, &nq, &dq);
    let n2 = upoly::exact_div(&k, &nq, &g).expect("gcd divides");
    let d2 = upoly::exact_div(&k, &dq, &g).expect("gcd divides");
    let l = n2.iter().chain(&d2).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = |v: &[BigRational]| -> Vec<BigInt> { v.iter().map(|c| (c * &l).to_integer()).collect() };
    let (ni, di) = (ints(&n2), ints(&d2));
    let mut g = ni.iter().chain(&di).fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if di.last().expect("nonzero").is_negative() {
        g = -g;
    }
    let to_i = |v: Vec<BigInt>| v.into_iter().map(|c| (c / &g).to_i64().expect("small coefficients")).collect();
    (to_i(ni), to_i(di))
}

impl fmt::Display for LambdaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for LambdaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "base" | "b" | "1" => Ok(LambdaChoice::Base),
            "6" => Ok(LambdaChoice::Six),
            "3a" => Ok(LambdaChoice::ThreeA),
            "3b" => Ok(LambdaChoice::ThreeB),
            "3c" => Ok(LambdaChoice::ThreeC),
            other => Err(format!("unknown lambda {other:?}; expected base, 6, 3a, 3b or 3c")),
        }
    }
}
