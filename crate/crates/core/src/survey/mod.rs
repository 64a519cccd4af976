//! Survey engine: doubly isogenous pairs over windows of primes, their
//! refinements and the two explanations for them.

mod report;

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{EllipticCurve, WeilPolynomial};
use crate::family::{enumerate_class_params, excluded_u_set, CurveClass, D6Params, LambdaTable, TraceSignature};
use crate::fields::{is_prime_u64, poly_roots, PrimeField, UniPoly};
use crate::quadcover::{four_prym_weil_with, FourCaches, QuadCoverError};
use crate::tricover::{mult3_signature_with, special_prym, Mult3Signature, SpecialPrym, TriCoverError};

pub use crate::family::{ResourceLimit, TABLE_LIMIT};
pub use report::{emit_report, Counts, PairJson, PrimeRow, SurveyReport, AGGREGATE_HEADER, PRIME_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum SurveyError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("p = {} exceeds the trace-table limit", .0 .0)]
    Resource(#[from] ResourceLimit),
    #[error(transparent)]
    TriCover(#[from] TriCoverError),
    #[error(transparent)]
    QuadCover(#[from] QuadCoverError),
    #[error(transparent)]
    Curve(#[from] crate::curves::CurveError),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The `count` primes p > 3 closest to 2^n, ascending. When the last
/// admitted distance d is attained by both 2^n - d and 2^n + d, both enter.
pub fn primes_near(n: u32, count: usize) -> Vec<u64> {
    assert!((4..62).contains(&n) && count >= 1);
    let centre = 1u64 << n;
    let mut out = Vec::new();
    let mut d = 0u64;
    while out.len() < count {
        let mut hits: Vec<u64> = [centre.checked_sub(d), centre.checked_add(d)]
            .into_iter()
            .flatten()
            .filter(|&p| p > 3 && is_prime_u64(p))
            .collect();
        hits.dedup();
        out.extend(hits);
        d += 1;
        assert!(d <= centre + (1 << 20), "window exhausted the primes below 2^n");
    }
    out.sort_unstable();
    out
}

pub fn build_trace_table(p: u64) -> Result<LambdaTable, ResourceLimit> {
    let f = PrimeField::new(p).map_err(|_| ResourceLimit(p))?;
    LambdaTable::build(&f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    pub class: CurveClass,
    pub orbit_size: usize,
    pub signature: TraceSignature,
}

/// One record per isomorphism class over F_p, in canonical order.
pub fn enumerate_classes(f: &PrimeField, table: &LambdaTable) -> Vec<ClassRecord> {
    enumerate_class_params(f)
        .into_iter()
        .map(|(class, orbit_size)| {
            let params = class.params(*f);
            ClassRecord { class, orbit_size, signature: params.trace_signature_with(|l| table.trace(l)) }
        })
        .collect()
}

/// Which refinements to compute. Unrequested ones stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RefineSet {
    pub special3: bool,
    pub mult3: bool,
    pub four: bool,
}

impl RefineSet {
    pub const ALL: RefineSet = RefineSet { special3: true, mult3: true, four: true };
    pub const NONE: RefineSet = RefineSet { special3: false, mult3: false, four: false };

    /// Parses a comma list of `special3`, `mult3`, `four` (also `3a`, `3b`, `4`, `all`).
    pub fn parse(s: &str) -> Result<Self, SurveyError> {
        let mut out = RefineSet::NONE;
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item {
                "special3" | "3a" => out.special3 = true,
                "mult3" | "3b" => out.mult3 = true,
                "four" | "4" => out.four = true,
                "all" => out = RefineSet::ALL,
                other => return Err(SurveyError::BadParameter(format!("unknown refinement {other:?}"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Refinements {
    pub special3: Option<bool>,
    pub mult3: Option<bool>,
    pub four: Option<bool>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub easy_twist_theorem: bool,
    pub extraordinary: bool,
}

/// A doubly isogenous pair of classes over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub p: u64,
    pub first: CurveClass,
    pub second: CurveClass,
    pub is_twist: bool,
    pub refinements: Refinements,
    pub flags: Flags,
}

impl PairRecord {
    pub fn params(&self) -> (D6Params, D6Params) {
        let f = PrimeField::new(self.p).expect("survey primes are valid");
        (self.first.params(f), self.second.params(f))
    }
}

/// All unordered pairs of distinct classes sharing the base trace and the
/// fifteen-trace multiset.
pub fn find_pairs(p: u64, classes: &[ClassRecord]) -> Vec<PairRecord> {
    let mut groups: HashMap<(i64, [i64; 15]), Vec<usize>> = HashMap::new();
    for (i, rec) in classes.iter().enumerate() {
        groups.entry(rec.signature.key()).or_default().push(i);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let (x, y) = (classes[i].class, classes[j].class);
                let (first, second) = if x < y { (x, y) } else { (y, x) };
                out.push(PairRecord {
                    p,
                    first,
                    second,
                    is_twist: first.coarse == second.coarse,
                    refinements: Refinements::default(),
                    flags: Flags::default(),
                });
            }
        }
    }
    out.sort_unstable_by_key(|r| (r.first, r.second));
    out
}

/// Per-prime memo of the expensive invariants, keyed by canonical class.
pub struct RefineContext {
    field: PrimeField,
    caches: FourCaches,
    special: HashMap<CurveClass, SpecialPrym>,
    mult3: HashMap<CurveClass, Mult3Signature>,
    four: HashMap<CurveClass, WeilPolynomial>,
}

impl RefineContext {
    pub fn new(field: PrimeField) -> Self {
        RefineContext {
            field,
            caches: FourCaches::new(&field),
            special: HashMap::new(),
            mult3: HashMap::new(),
            four: HashMap::new(),
        }
    }

    fn special(&mut self, class: CurveClass) -> Result<SpecialPrym, SurveyError> {
        if let Some(s) = self.special.get(&class) {
            return Ok(*s);
        }
        let s = special_prym(&class.params(self.field))?;
        self.special.insert(class, s);
        Ok(s)
    }

    fn mult3(&mut self, class: CurveClass) -> Result<&Mult3Signature, SurveyError> {
        if !self.mult3.contains_key(&class) {
            let special = self.special(class)?;
            let m = mult3_signature_with(&class.params(self.field), &special)?;
            self.mult3.insert(class, m);
        }
        Ok(&self.mult3[&class])
    }

    fn four(&mut self, class: CurveClass) -> Result<&WeilPolynomial, SurveyError> {
        if !self.four.contains_key(&class) {
            let w = four_prym_weil_with(&class.params(self.field), Default::default(), &self.caches)?;
            self.four.insert(class, w);
        }
        Ok(&self.four[&class])
    }
}

/// Fills in the requested refinements of a pair.
pub fn refine_pair(rec: &mut PairRecord, which: RefineSet, ctx: &mut RefineContext) -> Result<(), SurveyError> {
    let (a, b) = (rec.first, rec.second);
    if which.special3 {
        rec.refinements.special3 = Some(ctx.special(a)?.matches(&ctx.special(b)?));
    }
    if which.mult3 {
        let ma = ctx.mult3(a)?.clone();
        rec.refinements.mult3 = Some(ma.matches(ctx.mult3(b)?));
    }
    if which.four {
        let wa = ctx.four(a)?.clone();
        rec.refinements.four = Some(wa.same_polynomial(ctx.four(b)?));
    }
    Ok(())
}

/// The hypotheses of the easy-twist theorem at u: p = 3 mod 4, the Legendre
/// curves at the two lambdas below are supersingular, and u(u-1)(u+3) and
/// -u(u+1)(u-3) are nonsquares.
pub fn easytwist_predicate(f: &PrimeField, u: u64) -> Result<bool, SurveyError> {
    if f.p() % 4 != 3 {
        return Err(SurveyError::BadParameter(format!("p = {} is not 3 mod 4", f.p())));
    }
    if excluded_u_set(f).contains(&(u % f.p())) {
        return Err(SurveyError::BadParameter(format!("u = {u} is excluded over F_{}", f.p())));
    }
    Ok(easytwist_with(f, u % f.p(), |l| match EllipticCurve::legendre(f, 1, l) {
        Ok(e) => e.trace().map(|t| t as i64).unwrap_or(1),
        Err(_) => 1,
    }))
}

/// The two supersingularity lambdas; None where a denominator vanishes.
pub fn easytwist_lambdas(f: &PrimeField, u: u64) -> [Option<u64>; 2] {
    let (um1, up1, up3, um3) = (f.sub(u, 1), f.add(u, 1), f.add(u, 3), f.sub(u, 3));
    let cube = |x: u64| f.mul(x, f.mul(x, x));
    let l1 = f.div(f.mul(cube(um1), up3), f.mul(cube(up1), um3));
    let l2 = f.div(f.mul(4, u), f.mul(um1, up3));
    [l1, l2]
}

fn easytwist_with(f: &PrimeField, u: u64, trace: impl Fn(u64) -> i64) -> bool {
    let supersingular = |l: Option<u64>| matches!(l, Some(l) if l > 1 && trace(l) == 0);
    let [l1, l2] = easytwist_lambdas(f, u);
    let n1 = f.mul(u, f.mul(f.sub(u, 1), f.add(u, 3)));
    let n2 = f.neg(f.mul(u, f.mul(f.add(u, 1), f.sub(u, 3))));
    supersingular(l1) && supersingular(l2) && f.legendre(n1) == -1 && f.legendre(n2) == -1
}

/// A twist pair is explained by the easy-twist theorem when some u in the
/// union of the two equivalence orbits satisfies its hypotheses.
pub fn easytwist_flag(rec: &PairRecord, table: &LambdaTable) -> bool {
    if !rec.is_twist || rec.p % 4 != 3 {
        return false;
    }
    let f = PrimeField::new(rec.p).expect("survey primes are valid");
    let (a, b) = rec.params();
    let us: BTreeSet<u64> = a.equivalence_orbit().into_iter().chain(b.equivalence_orbit()).map(|(u, _)| u).collect();
    us.into_iter().any(|u| easytwist_with(&f, u, |l| table.trace(l)))
}

/// The two roots of x^2 - 27x + 1 in F_p, when distinct and rational.
pub fn extraordinary_roots(f: &PrimeField) -> Option<(u64, u64)> {
    // Discriminant 725 = 25 * 29.
    let s = f.sqrt(725 % f.p())?;
    if s == 0 {
        return None;
    }
    let half = f.inv(2)?;
    let (a, b) = (f.mul(f.add(27, s), half), f.mul(f.sub(27, s), half));
    Some((a.min(b), a.max(b)))
}

/// Nontwist pairs that reduce (up to twist) from the extraordinary pair:
/// the sets {r, 729/r} of the two classes meet the two roots one each.
pub fn extraordinary_detect(rec: &PairRecord) -> bool {
    if rec.is_twist {
        return false;
    }
    let f = PrimeField::new(rec.p).expect("survey primes are valid");
    let Some((r1, r2)) = extraordinary_roots(&f) else { return false };
    let (a, b) = rec.params();
    let set = |r: u64| [r, f.div(729 % f.p(), r).unwrap()];
    let (sa, sb) = (set(a.r()), set(b.r()));
    (sa.contains(&r1) && sb.contains(&r2)) || (sa.contains(&r2) && sb.contains(&r1))
}

/// Whether p splits completely in the field generated by sqrt(29), i and a
/// root of x^3 + x^2 + 2.
pub fn split_completely_in_l(p: u64) -> bool {
    let Ok(f) = PrimeField::new(p) else { return false };
    if p <= 3 || p == 29 {
        return false;
    }
    let cubic = UniPoly::from_ints(&f, &[2, 0, 1, 1]);
    let cubic_splits = {
        let roots = poly_roots(&f, &cubic, 0);
        roots.len() == 3 && roots.windows(2).all(|w| w[0] != w[1])
    };
    f.legendre(29) == 1 && f.legendre(f.neg(1)) == 1 && cubic_splits
}

/// The same test through the degree-12 polynomial
/// x^12 + 5x^10 - 6x^8 + 29x^6 - 6x^4 + 5x^2 + 1.
pub fn degree12_splits(p: u64) -> bool {
    let Ok(f) = PrimeField::new(p) else { return false };
    let g = UniPoly::from_ints(&f, &[1, 0, 5, 0, -6, 0, 29, 0, -6, 0, 5, 0, 1]);
    let roots = poly_roots(&f, &g, 0);
    roots.len() == 12 && roots.windows(2).all(|w| w[0] != w[1])
}

/// Everything the survey learns at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeSurvey {
    pub p: u64,
    pub classes: usize,
    pub refined: RefineSet,
    pub pairs: Vec<PairRecord>,
}

pub fn survey_prime(p: u64, which: RefineSet) -> Result<PrimeSurvey, SurveyError> {
    let f = PrimeField::new(p).map_err(|e| SurveyError::BadParameter(e.to_string()))?;
    if p <= 3 {
        return Err(SurveyError::BadParameter(format!("p = {p} is too small")));
    }
    let table = LambdaTable::build(&f)?;
    let classes = enumerate_classes(&f, &table);
    let mut pairs = find_pairs(p, &classes);
    let mut ctx = RefineContext::new(f);
    for rec in &mut pairs {
        refine_pair(rec, which, &mut ctx)?;
        rec.flags = Flags { easy_twist_theorem: easytwist_flag(rec, &table), extraordinary: extraordinary_detect(rec) };
    }
    Ok(PrimeSurvey { p, classes: classes.len(), refined: which, pairs })
}

/// Worker count: `D6LAB_THREADS` wins over the requested value, which wins
/// over the machine's parallelism.
pub fn resolve_jobs(requested: Option<usize>) -> usize {
    std::env::var("D6LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .or(requested.filter(|&n| n > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Surveys every prime of the window on a pool of `jobs` workers. Results
/// come back in window order, so the output does not depend on `jobs`.
pub fn run_survey(primes: &[u64], which: RefineSet, jobs: usize) -> Result<Vec<PrimeSurvey>, SurveyError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SurveyError::Pool(e.to_string()))?;
    pool.install(|| primes.par_iter().map(|&p| survey_prime(p, which)).collect())
}
