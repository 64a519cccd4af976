//! The `d6lab` command line: argument types and the command runners.

pub mod oracles;
pub mod table_field;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use d6lab_core::factorizer::{distinct_tuples_check, factor_totally_split, FactorError, TuplesReport};
use d6lab_core::family::{excluded_u_set, r_from_u, D6Params};
use d6lab_core::fields::{is_prime_u64, PrimeField, UniPoly};
use d6lab_core::survey::{
    easytwist_lambdas, easytwist_predicate, emit_report, extraordinary_roots, primes_near, resolve_jobs, run_survey,
    split_completely_in_l, survey_prime, RefineSet, SurveyError, SurveyReport,
};
use d6lab_core::tricover::special_prym;
use d6lab_diffiso::{run_case, CaseReport, CorrespondenceCase, DiffisoError, DEFAULT_PRIMES};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("conjecture counterexample: {0}")]
    Counterexample(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::OracleMismatch(_) => 3,
            CliError::Counterexample(_) => 4,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<SurveyError> for CliError {
    fn from(e: SurveyError) -> Self {
        match e {
            SurveyError::BadParameter(m) => CliError::Invalid(m),
            SurveyError::Resource(_) => CliError::Invalid(e.to_string()),
            SurveyError::Io(io) => CliError::Io(io),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<DiffisoError> for CliError {
    fn from(e: DiffisoError) -> Self {
        match e {
            DiffisoError::BadInput(_) | DiffisoError::ConstantInput | DiffisoError::DegenerateF => CliError::Invalid(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<FactorError> for CliError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::ConjectureViolation { .. } => CliError::Counterexample(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "d6lab", version, about = "Doubly isogenous genus-2 curves with D6 action")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Doubly isogenous pairs over the primes nearest 2^n.
    Survey(SurveyArgs),
    /// The pairs at one prime.
    Pairs(PairsArgs),
    /// Base and Prym traces of one curve.
    Signature(SignatureArgs),
    /// The easy-twist hypotheses at a parameter or at the corollary parameters.
    Easytwist(EasytwistArgs),
    /// The reduction of the extraordinary pair at one prime.
    Extraordinary(PrimeArg),
    /// Every point-count oracle.
    OracleSuite(OracleArgs),
    /// Roots of a totally split polynomial, without randomness.
    Factor(FactorArgs),
    /// Checks that generic parameters have distinct fifteen-trace tuples.
    Tuples(TuplesArgs),
    /// The differential pipeline for one correspondence case.
    ChiCase(ChiCaseArgs),
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub count: usize,
    /// Comma list of special3, mult3, four.
    #[arg(long, default_value = "")]
    pub refine: String,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value = "")]
    pub refine: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub u: u64,
    /// `1` or `ns` (the smallest nonresidue).
    #[arg(long)]
    pub c: String,
}

#[derive(Debug, Args)]
pub struct EasytwistArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, conflicts_with = "corollary")]
    pub u: Option<u64>,
    #[arg(long)]
    pub corollary: bool,
}

#[derive(Debug, Args)]
pub struct PrimeArg {
    #[arg(long)]
    pub p: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[arg(long)]
    pub p: u64,
    /// Constant term first; the last coefficient must be 1.
    #[arg(long)]
    pub coeffs: String,
}

#[derive(Debug, Args)]
pub struct TuplesArgs {
    #[arg(long)]
    pub pmax: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChiCaseArgs {
    /// `L1,L2:L3,L4` with labels base, 6, 3a, 3b, 3c.
    #[arg(long, required_unless_present = "full")]
    pub orbits: Option<String>,
    /// A prime, or AUTO for the two default primes.
    #[arg(long, default_value = "AUTO")]
    pub modp: String,
    /// Every assignment of the five parameters instead of one case.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Survey(a) => survey(a, out),
        Command::Pairs(a) => pairs(a, out),
        Command::Signature(a) => signature(a, out),
        Command::Easytwist(a) => easytwist(a, out),
        Command::Extraordinary(a) => extraordinary(a.p, out),
        Command::OracleSuite(a) => oracle_suite(a.seed, out),
        Command::Factor(a) => factor(a, out),
        Command::Tuples(a) => tuples(a, out),
        Command::ChiCase(a) => chi_case(a, out),
    }
}

fn field(p: u64) -> Result<PrimeField, CliError> {
    if p <= 3 || !is_prime_u64(p) {
        return Err(CliError::Invalid(format!("{p} is not a prime above 3")));
    }
    PrimeField::new(p).map_err(|e| CliError::Invalid(e.to_string()))
}

fn survey(a: SurveyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(4..=30).contains(&a.n) || a.count == 0 {
        return Err(CliError::Invalid("need 4 <= n <= 30 and count >= 1".into()));
    }
    let which = RefineSet::parse(&a.refine)?;
    let primes = primes_near(a.n, a.count);
    let surveys = run_survey(&primes, which, resolve_jobs(a.jobs))?;
    let report = SurveyReport::new(&surveys);
    if let Some(dir) = &a.out {
        emit_report(&report, dir)?;
    }
    out.write_all(report.aggregate_csv().as_bytes())?;
    Ok(())
}

fn pairs(a: PairsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    field(a.p)?;
    let which = RefineSet::parse(&a.refine)?;
    let report = SurveyReport::new(&[survey_prime(a.p, which)?]);
    if a.json {
        writeln!(out, "{}", report.pairs_json())?;
        return Ok(());
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let opt = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
    w.write_record(["p", "u1", "c1", "u2", "c2", "isTwist", "special3", "mult3", "four", "easyTwistTheorem", "extraordinary"])
        .map_err(|e| CliError::Failed(e.to_string()))?;
    for r in &report.pairs {
        let rec = [
            r.p.to_string(),
            r.u1.to_string(),
            r.c1.to_string(),
            r.u2.to_string(),
            r.c2.to_string(),
            r.is_twist.to_string(),
            opt(r.special3),
            opt(r.mult3),
            opt(r.four),
            r.easy_twist_theorem.to_string(),
            r.extraordinary.to_string(),
        ];
        w.write_record(&rec).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    out.write_all(&w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?)?;
    Ok(())
}

fn params(f: PrimeField, u: u64, nonsquare: bool) -> Result<D6Params, CliError> {
    D6Params::new(f, u, nonsquare).map_err(|e| CliError::Invalid(e.to_string()))
}

fn signature(a: SignatureArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let f = field(a.p)?;
    let nonsquare = match a.c.as_str() {
        "1" => false,
        "ns" => true,
        other => return Err(CliError::Invalid(format!("--c must be 1 or ns, got {other:?}"))),
    };
    let d = params(f, a.u, nonsquare)?;
    let sig = d.trace_signature().map_err(|e| CliError::Failed(e.to_string()))?;
    let body = json!({
        "p": a.p,
        "u": d.u(),
        "c": d.c(),
        "r": d.r(),
        "coarse": d.coarse_invariant(),
        "signature": sig,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&body).expect("serializable"))?;
    Ok(())
}

/// Roots of u^4 - 9u^2 + 9 in F_p outside the excluded set, ascending.
pub fn corollary_parameters(f: &PrimeField) -> Vec<u64> {
    let bad = excluded_u_set(f);
    (1..f.p())
        .filter(|&u| {
            let u2 = f.mul(u, u);
            f.add(f.sub(f.mul(u2, u2), f.mul(9, u2)), 9) == 0 && !bad.contains(&u)
        })
        .collect()
}

fn easytwist(a: EasytwistArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let f = field(a.p)?;
    let us = match (a.u, a.corollary) {
        (Some(u), false) => vec![u % a.p],
        (None, true) => corollary_parameters(&f),
        _ => return Err(CliError::Invalid("give exactly one of --u or --corollary".into())),
    };
    let mut rows = Vec::new();
    for u in us {
        let holds = easytwist_predicate(&f, u)?;
        rows.push(json!({ "u": u, "holds": holds, "lambdas": easytwist_lambdas(&f, u) }));
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "p": a.p, "parameters": rows })).expect("serializable"))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtraordinaryReport {
    pub p: u64,
    pub roots: Option<(u64, u64)>,
    pub splits_completely: bool,
    /// Parameters with the two r-values, when both are attained.
    pub parameters: Option<(u64, u64)>,
    pub doubly_isogenous: Option<bool>,
    pub nontwist: Option<bool>,
    pub special_pryms_match: Option<bool>,
}

/// Looks for the reduction of the extraordinary pair at p.
pub fn extraordinary_report(p: u64) -> Result<ExtraordinaryReport, CliError> {
    let f = field(p)?;
    let roots = extraordinary_roots(&f);
    let mut rep = ExtraordinaryReport {
        p,
        roots,
        splits_completely: split_completely_in_l(p),
        parameters: None,
        doubly_isogenous: None,
        nontwist: None,
        special_pryms_match: None,
    };
    let Some((r1, r2)) = roots else { return Ok(rep) };
    let bad = excluded_u_set(&f);
    let find = |r: u64| (1..p).find(|&u| !bad.contains(&u) && r_from_u(&f, u).ok() == Some(r));
    let (Some(u1), Some(u2)) = (find(r1), find(r2)) else { return Ok(rep) };
    rep.parameters = Some((u1, u2));
    let a = params(f, u1, false)?;
    let key = a.trace_signature().map_err(|e| CliError::Failed(e.to_string()))?.key();
    let b = params(f, u2, false)?;
    let twin = [b, b.with_class(true)]
        .into_iter()
        .find(|x| x.trace_signature().map(|s| s.key() == key).unwrap_or(false));
    rep.doubly_isogenous = Some(twin.is_some());
    rep.nontwist = Some(a.coarse_invariant() != b.coarse_invariant());
    if let Some(t) = twin {
        let sa = special_prym(&a).map_err(|e| CliError::Failed(e.to_string()))?;
        let sb = special_prym(&t).map_err(|e| CliError::Failed(e.to_string()))?;
        rep.special_pryms_match = Some(sa.matches(&sb));
    }
    Ok(rep)
}

fn extraordinary(p: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let rep = extraordinary_report(p)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("serializable"))?;
    Ok(())
}

fn oracle_suite(seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let results = oracles::run_suite(seed);
    let mut bad = Vec::new();
    for (tag, r) in ["a", "b", "c", "d", "e"].iter().zip(&results) {
        let status = if r.passed() { "ok" } else { "MISMATCH" };
        writeln!(out, "({tag}) {}: {} cases, {status}", r.name, r.cases)?;
        for f in &r.failures {
            writeln!(out, "    {f}")?;
        }
        if !r.passed() {
            bad.push(format!("({tag}) {}", r.name));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::OracleMismatch(bad.join(", ")))
    }
}

/// Parses `c0,c1,...,1` over F_p, enforcing a monic leading 1.
pub fn parse_coeffs(p: u64, s: &str) -> Result<Vec<u64>, CliError> {
    let coeffs = s
        .split(',')
        .map(|c| c.trim().parse::<u64>().map_err(|_| CliError::Invalid(format!("bad coefficient {c:?}"))))
        .collect::<Result<Vec<u64>, _>>()?;
    if coeffs.len() < 2 {
        return Err(CliError::Invalid("the polynomial must have degree at least 1".into()));
    }
    if coeffs.last() != Some(&1) {
        return Err(CliError::Invalid("the polynomial must be monic (last coefficient 1)".into()));
    }
    Ok(coeffs.into_iter().map(|c| c % p).collect())
}

fn factor(a: FactorArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let f = field(a.p)?;
    let coeffs = parse_coeffs(a.p, &a.coeffs)?;
    let poly = UniPoly::new(&f, coeffs);
    let mut roots = factor_totally_split(&f, &poly)?;
    roots.sort_unstable();
    for r in roots {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

/// Tuple checks for every prime 5 <= p <= pmax, in ascending order.
pub fn tuples_reports(pmax: u64, jobs: usize) -> Result<Vec<TuplesReport>, CliError> {
    let primes: Vec<u64> = (5..=pmax).filter(|&p| is_prime_u64(p)).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| CliError::Failed(e.to_string()))?;
    let reports = pool.install(|| primes.par_iter().map(|&p| distinct_tuples_check(p)).collect::<Result<Vec<_>, _>>())?;
    Ok(reports)
}

fn tuples(a: TuplesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.pmax < 5 {
        return Err(CliError::Invalid("--pmax must be at least 5".into()));
    }
    let reports = tuples_reports(a.pmax, resolve_jobs(a.jobs))?;
    let mut collisions = 0;
    for r in &reports {
        if r.ok() {
            writeln!(out, "{} OK generic={}", r.p, r.generic)?;
        } else {
            for (u1, u2) in &r.collisions {
                writeln!(out, "{} COLLISION u1={u1} u2={u2}", r.p)?;
            }
            collisions += r.collisions.len();
        }
    }
    if collisions > 0 {
        return Err(CliError::Counterexample(format!("{collisions} colliding tuples")));
    }
    Ok(())
}

fn chi_primes(modp: &str) -> Result<Vec<u64>, CliError> {
    if modp.eq_ignore_ascii_case("auto") {
        return Ok(DEFAULT_PRIMES.to_vec());
    }
    let p: u64 = modp.parse().map_err(|_| CliError::Invalid(format!("--modp must be a prime or AUTO, got {modp:?}")))?;
    field(p)?;
    Ok(vec![p])
}

#[derive(Debug, Serialize)]
struct SweepEntry {
    case: String,
    report: Option<CaseReport>,
    error: Option<String>,
}

fn chi_case(a: ChiCaseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let primes = chi_primes(&a.modp)?;
    let (name, body) = if a.full {
        // Cases with identical parameters on a side have F = 0 and are skipped.
        let cases: Vec<CorrespondenceCase> =
            CorrespondenceCase::all_cases().into_iter().filter(|c| c.l1 != c.l2 && c.l3 != c.l4).collect();
        let entries: Vec<SweepEntry> = cases
            .par_iter()
            .map(|c| match run_case(c, &primes) {
                Ok(r) => SweepEntry { case: c.to_string(), report: Some(r), error: None },
                Err(e) => SweepEntry { case: c.to_string(), report: None, error: Some(e.to_string()) },
            })
            .collect();
        ("chi-sweep".to_string(), serde_json::to_string_pretty(&entries).expect("serializable"))
    } else {
        let case: CorrespondenceCase = a.orbits.as_deref().unwrap_or_default().parse()?;
        let report = run_case(&case, &primes)?;
        (format!("chi-case-{}", case.to_string().replace([',', ':'], "_")), serde_json::to_string_pretty(&report).expect("serializable"))
    };
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{name}.json")), format!("{body}\n"))?;
    }
    writeln!(out, "{body}")?;
    Ok(())
}
