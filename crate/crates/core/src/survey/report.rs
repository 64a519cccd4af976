//! Per-prime rows, window totals and the files written from them.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{PairRecord, PrimeSurvey, SurveyError};
use crate::fields::PrimeField;

pub const PRIME_HEADER: &str = "p,classes,twist_pairs,nontwist_pairs,twist_3a,twist_3b,twist_4,nontwist_3a,nontwist_3b,nontwist_4,easytwist_yes,easytwist_no,extraordinary_yes,extraordinary_no";

pub const AGGREGATE_HEADER: &str = "primes,p_min,p_max,classes,twist_pairs,nontwist_pairs,twist_3a,twist_3b,twist_4,nontwist_3a,nontwist_3b,nontwist_4,easytwist_yes,easytwist_no,extraordinary_yes,extraordinary_no,nontwist_3a_extraordinary_yes,nontwist_3a_extraordinary_no,sum_inv_sqrt_p";

/// Counts over a set of pairs. A refinement column is `None` when it was
/// not computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub classes: usize,
    pub twist_pairs: usize,
    pub nontwist_pairs: usize,
    pub twist_3a: Option<usize>,
    pub twist_3b: Option<usize>,
    pub twist_4: Option<usize>,
    pub nontwist_3a: Option<usize>,
    pub nontwist_3b: Option<usize>,
    pub nontwist_4: Option<usize>,
    pub easytwist_yes: usize,
    pub easytwist_no: usize,
    pub extraordinary_yes: usize,
    pub extraordinary_no: usize,
    /// Extraordinary split among nontwists that also pass 3a.
    pub nontwist_3a_extraordinary_yes: Option<usize>,
    pub nontwist_3a_extraordinary_no: Option<usize>,
}

fn add_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        (x, None) | (None, x) => x,
    }
}

impl Counts {
    pub fn of_prime(s: &PrimeSurvey) -> Self {
        let zero = |on: bool| on.then_some(0);
        let (a, b, f) = (zero(s.refined.special3), zero(s.refined.mult3), zero(s.refined.four));
        let mut c = Counts {
            classes: s.classes,
            twist_3a: a,
            twist_3b: b,
            twist_4: f,
            nontwist_3a: a,
            nontwist_3b: b,
            nontwist_4: f,
            nontwist_3a_extraordinary_yes: a,
            nontwist_3a_extraordinary_no: a,
            ..Default::default()
        };
        let tally = |slot: &mut Option<usize>, v: Option<bool>| {
            if let Some(v) = v {
                *slot = Some(slot.unwrap_or(0) + v as usize);
            }
        };
        for rec in &s.pairs {
            let r = rec.refinements;
            if rec.is_twist {
                c.twist_pairs += 1;
                tally(&mut c.twist_3a, r.special3);
                tally(&mut c.twist_3b, r.mult3);
                tally(&mut c.twist_4, r.four);
                if rec.flags.easy_twist_theorem {
                    c.easytwist_yes += 1;
                } else {
                    c.easytwist_no += 1;
                }
            } else {
                c.nontwist_pairs += 1;
                tally(&mut c.nontwist_3a, r.special3);
                tally(&mut c.nontwist_3b, r.mult3);
                tally(&mut c.nontwist_4, r.four);
                let ex = rec.flags.extraordinary;
                if ex {
                    c.extraordinary_yes += 1;
                } else {
                    c.extraordinary_no += 1;
                }
                if let Some(s3) = r.special3 {
                    tally(&mut c.nontwist_3a_extraordinary_yes, Some(s3 && ex));
                    tally(&mut c.nontwist_3a_extraordinary_no, Some(s3 && !ex));
                }
            }
        }
        c
    }

    pub fn merge(&self, o: &Counts) -> Counts {
        Counts {
            classes: self.classes + o.classes,
            twist_pairs: self.twist_pairs + o.twist_pairs,
            nontwist_pairs: self.nontwist_pairs + o.nontwist_pairs,
            twist_3a: add_opt(self.twist_3a, o.twist_3a),
            twist_3b: add_opt(self.twist_3b, o.twist_3b),
            twist_4: add_opt(self.twist_4, o.twist_4),
            nontwist_3a: add_opt(self.nontwist_3a, o.nontwist_3a),
            nontwist_3b: add_opt(self.nontwist_3b, o.nontwist_3b),
            nontwist_4: add_opt(self.nontwist_4, o.nontwist_4),
            easytwist_yes: self.easytwist_yes + o.easytwist_yes,
            easytwist_no: self.easytwist_no + o.easytwist_no,
            extraordinary_yes: self.extraordinary_yes + o.extraordinary_yes,
            extraordinary_no: self.extraordinary_no + o.extraordinary_no,
            nontwist_3a_extraordinary_yes: add_opt(self.nontwist_3a_extraordinary_yes, o.nontwist_3a_extraordinary_yes),
            nontwist_3a_extraordinary_no: add_opt(self.nontwist_3a_extraordinary_no, o.nontwist_3a_extraordinary_no),
        }
    }

    fn table_fields(&self) -> Vec<String> {
        let o = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.classes.to_string(),
            self.twist_pairs.to_string(),
            self.nontwist_pairs.to_string(),
            o(self.twist_3a),
            o(self.twist_3b),
            o(self.twist_4),
            o(self.nontwist_3a),
            o(self.nontwist_3b),
            o(self.nontwist_4),
            self.easytwist_yes.to_string(),
            self.easytwist_no.to_string(),
            self.extraordinary_yes.to_string(),
            self.extraordinary_no.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeRow {
    pub p: u64,
    pub counts: Counts,
}

/// One pair in the JSON dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairJson {
    pub p: u64,
    pub u1: u64,
    pub c1: u64,
    pub u2: u64,
    pub c2: u64,
    #[serde(rename = "isTwist")]
    pub is_twist: bool,
    pub special3: Option<bool>,
    pub mult3: Option<bool>,
    pub four: Option<bool>,
    #[serde(rename = "easyTwistTheorem")]
    pub easy_twist_theorem: bool,
    pub extraordinary: bool,
}

impl From<&PairRecord> for PairJson {
    fn from(r: &PairRecord) -> Self {
        let f = PrimeField::new(r.p).expect("survey primes are valid");
        let c = |ns: bool| if ns { f.smallest_nonresidue() } else { 1 };
        PairJson {
            p: r.p,
            u1: r.first.u,
            c1: c(r.first.nonsquare),
            u2: r.second.u,
            c2: c(r.second.nonsquare),
            is_twist: r.is_twist,
            special3: r.refinements.special3,
            mult3: r.refinements.mult3,
            four: r.refinements.four,
            easy_twist_theorem: r.flags.easy_twist_theorem,
            extraordinary: r.flags.extraordinary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyReport {
    pub rows: Vec<PrimeRow>,
    pub totals: Counts,
    pub pairs: Vec<PairJson>,
    /// Sum of p^{-1/2} over the window: the nontwist heuristic predicts a
    /// count proportional to it.
    pub sum_inv_sqrt_p: f64,
}

impl SurveyReport {
    pub fn new(surveys: &[PrimeSurvey]) -> Self {
        let rows: Vec<PrimeRow> = surveys.iter().map(|s| PrimeRow { p: s.p, counts: Counts::of_prime(s) }).collect();
        let totals = rows.iter().fold(Counts::default(), |acc, r| acc.merge(&r.counts));
        let pairs = surveys.iter().flat_map(|s| s.pairs.iter().map(PairJson::from)).collect();
        let sum_inv_sqrt_p = surveys.iter().map(|s| 1.0 / (s.p as f64).sqrt()).sum();
        SurveyReport { rows, totals, pairs, sum_inv_sqrt_p }
    }

    pub fn prime_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(PRIME_HEADER.split(',')).expect("in-memory write");
        for r in &self.rows {
            let mut fields = vec![r.p.to_string()];
            fields.extend(r.counts.table_fields());
            w.write_record(&fields).expect("in-memory write");
        }
        finish(w)
    }

    pub fn aggregate_csv(&self) -> String {
        let t = &self.totals;
        let o = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut fields = vec![
            self.rows.len().to_string(),
            self.rows.first().map(|r| r.p.to_string()).unwrap_or_default(),
            self.rows.last().map(|r| r.p.to_string()).unwrap_or_default(),
        ];
        fields.extend(t.table_fields());
        fields.push(o(t.nontwist_3a_extraordinary_yes));
        fields.push(o(t.nontwist_3a_extraordinary_no));
        fields.push(format!("{:.6}", self.sum_inv_sqrt_p));
        let mut w = csv_writer();
        w.write_record(AGGREGATE_HEADER.split(',')).expect("in-memory write");
        w.write_record(&fields).expect("in-memory write");
        finish(w)
    }

    pub fn pairs_json(&self) -> String {
        serde_json::to_string_pretty(&self.pairs).expect("plain data serializes")
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Writes `primes.csv`, `aggregate.csv` and `pairs.json` into `dir`.
pub fn emit_report(report: &SurveyReport, dir: &Path) -> Result<(), SurveyError> {
    fs::create_dir_all(dir)?;
    let write = |name: &str, body: &str| -> std::io::Result<()> {
        let mut f = fs::File::create(dir.join(name))?;
        f.write_all(body.as_bytes())
    };
    write("primes.csv", &report.prime_csv())?;
    write("aggregate.csv", &report.aggregate_csv())?;
    write("pairs.json", &(report.pairs_json() + "\n"))?;
    Ok(())
}
