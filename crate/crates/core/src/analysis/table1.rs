//! The published reversibility table, kept as a fixture and regenerated on
//! demand.

use std::fmt;

use rayon::prelude::*;

use super::{classify, ReversibilityRecord, Verdict};
use crate::error::{Error, Result};
use crate::field::{is_prime, primes_in};

/// The checked-in fixture.
pub const TABLE1_FIXTURE: &str = include_str!("../../fixtures/table1.txt");

/// One fixture line: a coefficient tuple, a level, a prime list and the
/// expected verdict for every prime in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Row {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub n: u32,
    /// The prime column exactly as written.
    pub primes_text: String,
    pub primes: Vec<u64>,
    pub expected: Verdict,
}

/// Expands `"2"`, `"7,11,13"` or `"3,5,...,101"` into a prime list.
///
/// An ellipsis stands for every prime strictly between the entries on
/// either side of it.
pub fn expand_primes(text: &str) -> Result<Vec<u64>> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    let mut out: Vec<u64> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        if tok == "..." {
            let (Some(&lo), Some(hi)) = (out.last(), tokens.get(i + 1)) else {
                return Err(Error::Parse(format!("dangling ellipsis in {text:?}")));
            };
            let hi: u64 = hi
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime {hi:?}")))?;
            out.extend(
                primes_in(lo + 1, hi.saturating_sub(1))
                    .into_iter()
                    .map(u64::from),
            );
        } else {
            let p: u64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime {tok:?}")))?;
            if p >= 1 << 32 || !is_prime(p) {
                return Err(Error::NonPrimeModulus(p));
            }
            out.push(p);
        }
        i += 1;
    }
    if out.is_empty() {
        return Err(Error::Parse("empty prime list".into()));
    }
    Ok(out)
}

pub fn parse_fixture(text: &str) -> Result<Vec<Table1Row>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let cols: Vec<&str> = line.split('|').map(str::trim).collect();
            let [a, b, c, d, n, p, verdict] = cols.as_slice() else {
                return Err(Error::Parse(format!("expected 7 columns in {line:?}")));
            };
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad integer {s:?} in {line:?}")))
            };
            Ok(Table1Row {
                a: num(a)?,
                b: num(b)?,
                c: num(c)?,
                d: num(d)?,
                n: num(n)? as u32,
                primes_text: p.to_string(),
                primes: expand_primes(p)?,
                expected: verdict.parse()?,
            })
        })
        .collect()
}

/// One regenerated record compared with its fixture row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Check {
    /// 1-based row in the fixture.
    pub row: usize,
    pub expected: Verdict,
    pub record: ReversibilityRecord,
}

impl Table1Check {
    pub fn matches(&self) -> bool {
        self.record.verdict == self.expected
    }
}

impl fmt::Display for Table1Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.record;
        write!(
            f,
            "row {}: (a,b,c,d)=({},{},{},{}) n={} p={} expected {} computed {} (det={}, rank={})",
            self.row,
            r.a,
            r.b,
            r.c,
            r.d,
            r.n,
            r.p,
            self.expected.as_str(),
            r.verdict.as_str(),
            r.det,
            r.rank
        )
    }
}

/// Classifies every (row, prime) pair in fixture order.
pub fn regenerate(rows: &[Table1Row]) -> Result<Vec<Table1Check>> {
    let jobs: Vec<(usize, &Table1Row, u64)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.primes.iter().map(move |&p| (i + 1, row, p)))
        .collect();
    jobs.into_par_iter()
        .map(|(row_no, row, p)| {
            Ok(Table1Check {
                row: row_no,
                expected: row.expected,
                record: classify(row.a, row.b, row.c, row.d, row.n, p)?,
            })
        })
        .collect()
}

pub fn mismatches(checks: &[Table1Check]) -> Vec<&Table1Check> {
    checks.iter().filter(|c| !c.matches()).collect()
}
