//! From F and G to verified correspondences: resultant, stripping,
//! specialization and point-counting checks.

use d6lab_core::curves::EllipticCurve;
use d6lab_core::fields::{poly_roots, ExtField, FiniteField, PrimeField, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bivariate::Bivariate;
use crate::equation::{build_f, derive_g, CorrespondenceCase};
use crate::error::DiffisoError;
use crate::lambda::LambdaChoice;
use crate::poly::{DiffPoly, Var};
use crate::resultant::{resultant_r, ResultantInput};
use crate::upoly::{self, Dense};

/// Largest prime below 2^20 and its predecessor: small enough that curves
/// over F_{p^3} stay within baby-step/giant-step range.
pub const DEFAULT_PRIMES: [u64; 2] = [1_048_573, 1_048_571];

/// The family symmetries u -> -u, 3/u, -3/u and the identity, each giving a
/// curve t = sigma(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Symmetry {
    Identity,
    Negate,
    Inverse3,
    NegInverse3,
}

pub const SYMMETRIES: [Symmetry; 4] = [Symmetry::Identity, Symmetry::Negate, Symmetry::Inverse3, Symmetry::NegInverse3];

impl Symmetry {
    pub fn label(self) -> &'static str {
        match self {
            Symmetry::Identity => "s-t",
            Symmetry::Negate => "s+t",
            Symmetry::Inverse3 => "st-3",
            Symmetry::NegInverse3 => "st+3",
        }
    }

    /// The defining polynomial in s and t.
    pub fn polynomial(self, f: &PrimeField) -> Bivariate {
        let rows: Vec<Vec<i64>> = match self {
            Symmetry::Identity => vec![vec![0, 1], vec![-1]],
            Symmetry::Negate => vec![vec![0, 1], vec![1]],
            Symmetry::Inverse3 => vec![vec![-3], vec![0, 1]],
            Symmetry::NegInverse3 => vec![vec![3], vec![0, 1]],
        };
        Bivariate::new(f, rows.into_iter().map(|r| r.into_iter().map(|c| f.from_i64(c)).collect()).collect())
    }

    /// sigma(x); each symmetry is an involution.
    pub fn apply<F: FiniteField>(self, f: &F, x: F::Elem) -> Option<F::Elem> {
        match self {
            Symmetry::Identity => Some(x),
            Symmetry::Negate => Some(f.neg(x)),
            Symmetry::Inverse3 => f.div(f.from_int(3), x),
            Symmetry::NegInverse3 => f.div(f.from_int(-3), x),
        }
    }

    /// Whether t = sigma(s) makes both pairs of curves geometrically
    /// isomorphic, tested by j-invariants at random points.
    pub fn predicted(self, case: &CorrespondenceCase, f: &PrimeField) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut checked = 0;
        while checked < 8 {
            let x = rng.gen_range(2..f.p());
            let Some(y) = self.apply(f, x) else { continue };
            let js = [(case.l1, x), (case.l3, y), (case.l2, x), (case.l4, y)].map(|(l, v)| l.eval_in(f, v).and_then(|lam| j_invariant(f, lam)));
            let [Some(j1), Some(j3), Some(j2), Some(j4)] = js else { continue };
            if j1 != j3 || j2 != j4 {
                return false;
            }
            checked += 1;
        }
        true
    }
}

/// j(lambda) = 256 (lambda^2 - lambda + 1)^3 / (lambda^2 (lambda - 1)^2).
pub fn j_invariant<F: FiniteField>(f: &F, lam: F::Elem) -> Option<F::Elem> {
    let q = f.add(f.sub(f.square(lam), lam), f.one());
    let num = f.mul(f.from_int(256), f.mul(q, f.square(q)));
    let lm1 = f.sub(lam, f.one());
    f.div(num, f.mul(f.square(lam), f.square(lm1)))
}

/// Everything computed for one case modulo one prime.
#[derive(Debug, Clone)]
pub struct PrimeArtifacts {
    pub field: PrimeField,
    pub case: CorrespondenceCase,
    pub f: DiffPoly<u64>,
    pub g: DiffPoly<u64>,
    pub r: Bivariate,
    pub r_bounds: (usize, usize),
    pub content_s: Dense<u64>,
    pub content_t: Dense<u64>,
    /// R with both one-variable contents removed.
    pub core: Bivariate,
    /// Multiplicity in R of each symmetry predicted for the case.
    pub known: Vec<(Symmetry, usize)>,
    pub r_tilde: Bivariate,
    f_coeffs: Vec<Bivariate>,
    r_s: Bivariate,
    r_t: Bivariate,
}

/// Builds F, G and R modulo p and strips known and one-variable factors.
pub fn prepare(case: &CorrespondenceCase, p: u64) -> Result<PrimeArtifacts, DiffisoError> {
    let field = PrimeField::new(p).map_err(|e| DiffisoError::BadInput(e.to_string()))?;
    let f = build_f(&field, case)?;
    let g = derive_g(&field, case, &f)?;
    let r_bounds = ResultantInput::new(&field, &f, &g)?.degree_bounds();
    let r = resultant_r(&field, &f, &g)?;
    if r.is_zero() {
        return Err(DiffisoError::BadInput(format!("case {case}: F and G share a factor, so R vanishes")));
    }
    let (r_tilde, content_s, content_t, core, known) = strip_known(&field, case, &r);
    let f_coeffs = f.coeffs_in(&field, Var::S1).iter().map(|c| Bivariate::from_diff(&field, c)).collect();
    let (r_s, r_t) = (r.derivative_s(&field), r.derivative_t(&field));
    Ok(PrimeArtifacts { field, case: *case, f, g, r, r_bounds, content_s, content_t, core, known, r_tilde, f_coeffs, r_s, r_t })
}

type Stripped = (Bivariate, Dense<u64>, Dense<u64>, Bivariate, Vec<(Symmetry, usize)>);

/// Removes the one-variable contents and every predicted symmetry factor,
/// with multiplicity.
pub fn strip_known(field: &PrimeField, case: &CorrespondenceCase, r: &Bivariate) -> Stripped {
    let cs = r.content_s(field);
    let core = r.div_s_poly(field, &cs).expect("content divides");
    let ct = core.content_t(field);
    let core = core.div_t_poly(field, &ct).expect("content divides");
    let mut rest = core.clone();
    let mut known = Vec::new();
    for sym in SYMMETRIES.into_iter().filter(|s| s.predicted(case, field)) {
        let phi = sym.polynomial(field);
        let mut mult = 0;
        while let Some(q) = rest.exact_div(field, &phi) {
            rest = q;
            mult += 1;
        }
        known.push((sym, mult));
    }
    (rest, cs, ct, core, known)
}

/// H and R-tilde restricted to one line s = x0 or t = x0, and their gcd.
#[derive(Debug, Clone)]
pub struct Specialization {
    pub var: Var,
    pub value: u64,
    pub h: Dense<u64>,
    pub r_tilde: Dense<u64>,
    pub common: Dense<u64>,
}

impl PrimeArtifacts {
    fn restrict(&self, b: &Bivariate, var: Var, x0: u64) -> Dense<u64> {
        match var {
            Var::S => b.eval_s(&self.field, x0),
            Var::T => b.eval_t(&self.field, x0),
            _ => unreachable!("only s or t are specialized"),
        }
    }

    /// Numerator of F with s' = -R_t / R_s, on the line var = x0:
    /// sum_i F_i (-R_t)^i R_s^(m - i).
    pub fn h_on_line(&self, var: Var, x0: u64) -> Dense<u64> {
        let f = &self.field;
        let rt: Dense<u64> = self.restrict(&self.r_t, var, x0).iter().map(|&c| f.neg(c)).collect();
        let rs = self.restrict(&self.r_s, var, x0);
        let m = self.f_coeffs.len() - 1;
        let mut out: Dense<u64> = Vec::new();
        for (i, fi) in self.f_coeffs.iter().enumerate() {
            let mut term = self.restrict(fi, var, x0);
            for _ in 0..i {
                term = upoly::mul(f, &term, &rt);
            }
            for _ in 0..m - i {
                term = upoly::mul(f, &term, &rs);
            }
            out = crate::bivariate::add_dense(f, &out, &term);
        }
        out
    }

    /// deg H in the free variable, taken as the maximum over random lines.
    pub fn generic_h_degree(&self, var: Var) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(0xdeadbeef ^ self.field.p());
        (0..3).map(|_| upoly::degree(&self.h_on_line(var, rng.gen_range(2..self.field.p()))).unwrap_or(0)).max().unwrap_or(0)
    }

    fn r_tilde_degree(&self, var: Var) -> usize {
        match var {
            Var::S => self.r_tilde.deg_t(),
            _ => self.r_tilde.deg_s(),
        }
        .unwrap_or(0)
    }

    /// Whether x0 gives nonsingular curves for the two parameters on its side.
    fn line_is_regular(&self, var: Var, x0: u64) -> bool {
        let f = &self.field;
        let (a, b) = match var {
            Var::S => (self.case.l1, self.case.l2),
            _ => (self.case.l3, self.case.l4),
        };
        [a, b].iter().all(|l| l.eval_in(f, x0).is_some_and(|lam| lam != 0 && lam != 1))
    }

    /// Lines var = 2, 3, ... that keep the degrees of H and R-tilde and give
    /// nonsingular curves, in ascending order.
    pub fn specializations(&self, var: Var, count: usize) -> Vec<Specialization> {
        let f = &self.field;
        let (dh, dr) = (self.generic_h_degree(var), self.r_tilde_degree(var));
        let mut out = Vec::new();
        let mut x0 = 2u64;
        while out.len() < count && x0 < f.p() {
            if self.line_is_regular(var, x0) {
                let h = self.h_on_line(var, x0);
                let r_tilde = self.restrict(&self.r_tilde, var, x0);
                if upoly::degree(&h) == Some(dh) && upoly::degree(&r_tilde).unwrap_or(0) == dr {
                    let common = upoly::gcd(f, &h, &r_tilde);
                    out.push(Specialization { var, value: x0, h, r_tilde, common });
                }
            }
            x0 += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Spurious,
    /// No usable root in F_{p^k} for k <= 3.
    Inconclusive,
}

const MAX_ROOTS: usize = 3;

/// Checks a factor of the restriction to var = x0 by point counting:
/// for roots y0 over the smallest extension that has any, the curves at
/// lambda_1, lambda_3 and at lambda_2, lambda_4 must have traces equal up to
/// sign. Spurious if any root fails.
pub fn verify_candidate(case: &CorrespondenceCase, p: u64, var: Var, x0: u64, factor: &[u64]) -> Verdict {
    if upoly::degree(factor).unwrap_or(0) == 0 {
        return Verdict::Inconclusive;
    }
    for k in 1..=3 {
        let e = ExtField::prime(p, k).expect("valid prime");
        match verify_over(&e, case, var, x0, factor) {
            Some(v) => return v,
            None => continue,
        }
    }
    Verdict::Inconclusive
}

fn verify_over(e: &ExtField, case: &CorrespondenceCase, var: Var, x0: u64, factor: &[u64]) -> Option<Verdict> {
    let poly = UniPoly::new(e, factor.iter().map(|&c| e.embed(c)).collect());
    let mut roots = poly_roots(e, &poly, 7);
    roots.dedup();
    let x = e.embed(x0);
    let mut checked = 0;
    for y in roots {
        if checked == MAX_ROOTS {
            break;
        }
        let (s, t) = if var == Var::S { (x, y) } else { (y, x) };
        let pairs = [(case.l1, s, case.l3, t), (case.l2, s, case.l4, t)];
        let mut traces = Vec::new();
        for (la, a, lb, b) in pairs {
            let ta = legendre_trace(e, la, a);
            let tb = legendre_trace(e, lb, b);
            traces.push(ta.zip(tb));
        }
        if traces.iter().any(Option::is_none) {
            continue;
        }
        checked += 1;
        if traces.iter().flatten().any(|(ta, tb)| ta.abs() != tb.abs()) {
            return Some(Verdict::Spurious);
        }
    }
    (checked > 0).then_some(Verdict::Confirmed)
}

fn legendre_trace(e: &ExtField, l: LambdaChoice, x: <ExtField as FiniteField>::Elem) -> Option<i128> {
    let lam = l.eval_in(e, x)?;
    EllipticCurve::legendre(e, e.one(), lam).ok()?.trace().ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineCheck {
    pub p: u64,
    pub var: String,
    pub value: u64,
    pub degree: usize,
    pub multiplicity: usize,
    pub verdict: Verdict,
}

/// A squarefree piece of gcd(H, R-tilde) on the chosen lines, grouped by
/// degree and multiplicity across primes and variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    pub degree: usize,
    pub multiplicity: usize,
    pub verdict: Verdict,
    pub checks: Vec<LineCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnownReport {
    pub factor: String,
    pub multiplicity: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeDegrees {
    pub p: u64,
    /// (t, s, s') degrees.
    pub f: [u32; 3],
    pub g: [u32; 3],
    /// (s, t) degrees of R and the Sylvester bounds used for the grid.
    pub r: [usize; 2],
    pub r_bounds: [usize; 2],
    pub one_variable_s: usize,
    pub one_variable_t: usize,
    /// R without its one-variable factors.
    pub two_variable: [usize; 2],
    pub r_tilde: [usize; 2],
    /// Generic degree of H in t (lines s = s0) and in s (lines t = t0).
    pub h: [usize; 2],
    pub s0: Option<u64>,
    pub t0: Option<u64>,
    /// Degrees of gcd(H, R-tilde) on those two lines.
    pub common: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub degrees: Vec<PrimeDegrees>,
    pub known_factors_found: Vec<String>,
    pub known: Vec<KnownReport>,
    pub candidates: Vec<CandidateReport>,
}

impl CaseReport {
    /// Every known factor confirmed and every other candidate spurious.
    pub fn only_known(&self) -> bool {
        self.known.iter().all(|k| k.verdict == Verdict::Confirmed)
            && self.candidates.iter().all(|c| c.verdict == Verdict::Spurious)
    }
}

fn degrees_of(d: &DiffPoly<u64>) -> [u32; 3] {
    [Var::T, Var::S, Var::S1].map(|v| d.degree_in(v).unwrap_or(0))
}

fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let vs: Vec<Verdict> = verdicts.into_iter().collect();
    if vs.contains(&Verdict::Spurious) {
        Verdict::Spurious
    } else if !vs.is_empty() && vs.iter().all(|&v| v == Verdict::Confirmed) {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    }
}

/// Lines tried per variable before a candidate is left inconclusive.
const MAX_LINES: usize = 6;

/// Runs the case modulo each prime, specializing in s and in t.
pub fn run_case(case: &CorrespondenceCase, primes: &[u64]) -> Result<CaseReport, DiffisoError> {
    if primes.is_empty() {
        return Err(DiffisoError::BadInput("at least one prime is needed".into()));
    }
    let mut degrees = Vec::new();
    let mut known_checks: Vec<(Symmetry, usize, Vec<Verdict>)> = Vec::new();
    let mut candidate_checks: Vec<LineCheck> = Vec::new();
    for &p in primes {
        let art = prepare(case, p)?;
        let mut line_values = [None, None];
        let mut common = [0usize; 2];
        for (idx, var) in [Var::S, Var::T].into_iter().enumerate() {
            let lines = art.specializations(var, MAX_LINES);
            let Some(first) = lines.first() else {
                return Err(DiffisoError::UnluckyPrime { p, reason: format!("no line {var:?} = x0 keeps the degrees") });
            };
            line_values[idx] = Some(first.value);
            common[idx] = upoly::degree(&first.common).unwrap_or(0);
            // Each squarefree piece of the common factor is a candidate; the
            // first line where every piece has a usable root decides.
            for (n, line) in lines.iter().enumerate() {
                let checks: Vec<LineCheck> = upoly::squarefree_factors(&art.field, &line.common)
                    .into_iter()
                    .map(|(piece, mult)| LineCheck {
                        p,
                        var: format!("{var:?}").to_lowercase(),
                        value: line.value,
                        degree: upoly::degree(&piece).unwrap_or(0),
                        multiplicity: mult,
                        verdict: verify_candidate(case, p, var, line.value, &piece),
                    })
                    .collect();
                if n + 1 == lines.len() || checks.iter().all(|c| c.verdict != Verdict::Inconclusive) {
                    candidate_checks.extend(checks);
                    break;
                }
            }
            for &(sym, mult) in &art.known {
                if mult == 0 {
                    continue;
                }
                let phi = art.restrict(&sym.polynomial(&art.field), var, first.value);
                let v = verify_candidate(case, p, var, first.value, &phi);
                match known_checks.iter_mut().find(|(s, _, _)| *s == sym) {
                    Some(entry) => entry.2.push(v),
                    None => known_checks.push((sym, mult, vec![v])),
                }
            }
        }
        degrees.push(PrimeDegrees {
            p,
            f: degrees_of(&art.f),
            g: degrees_of(&art.g),
            r: [art.r.deg_s().unwrap_or(0), art.r.deg_t().unwrap_or(0)],
            r_bounds: [art.r_bounds.0, art.r_bounds.1],
            one_variable_s: upoly::degree(&art.content_s).unwrap_or(0),
            one_variable_t: upoly::degree(&art.content_t).unwrap_or(0),
            two_variable: [art.core.deg_s().unwrap_or(0), art.core.deg_t().unwrap_or(0)],
            r_tilde: [art.r_tilde.deg_s().unwrap_or(0), art.r_tilde.deg_t().unwrap_or(0)],
            h: [art.generic_h_degree(Var::S), art.generic_h_degree(Var::T)],
            s0: line_values[0],
            t0: line_values[1],
            common,
        });
    }
    let mut by_degree: Vec<CandidateReport> = Vec::new();
    for check in candidate_checks {
        match by_degree.iter_mut().find(|c| c.degree == check.degree && c.multiplicity == check.multiplicity) {
            Some(c) => c.checks.push(check),
            None => by_degree.push(CandidateReport {
                degree: check.degree,
                multiplicity: check.multiplicity,
                verdict: Verdict::Inconclusive,
                checks: vec![check],
            }),
        }
    }
    for c in &mut by_degree {
        c.verdict = combine(c.checks.iter().map(|l| l.verdict));
    }
    let known: Vec<KnownReport> = known_checks
        .into_iter()
        .map(|(sym, mult, vs)| KnownReport { factor: sym.label().into(), multiplicity: mult, verdict: combine(vs) })
        .collect();
    Ok(CaseReport {
        case: case.to_string(),
        degrees,
        known_factors_found: known.iter().map(|k| k.factor.clone()).collect(),
        known,
        candidates: by_degree,
    })
}

/// Checks that F is first order for every symmetric case, over Q.
pub fn cancellation_sweep() -> Vec<(CorrespondenceCase, Result<(), DiffisoError>)> {
    use rayon::prelude::*;
    CorrespondenceCase::symmetric_cases()
        .into_par_iter()
        .map(|c| (c, build_f(&crate::scalars::Rationals, &c).map(|_| ())))
        .collect()
}
