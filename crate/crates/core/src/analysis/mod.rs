//! Reversibility classification, parameter sweeps and the closed-form
//! determinants for the two smallest trees.

mod entropy;
pub mod table1;

pub use entropy::{
    bernoulli_join_entropy, entropy_sequence, format_significant, partition_atom_count,
    partition_entropy, EntropySequence, EntropyTerm, Observation, PartitionProbe,
};

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::rulematrix::{Params, RuleMatrix};
use crate::tree::TreeShape;

/// Seed used by every randomized check unless one is given explicitly.
pub const DEFAULT_SEED: u64 = 0x5EED_CA02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Reversible,
    Irreversible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Reversible => "reversible",
            Verdict::Irreversible => "irreversible",
        }
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reversible" => Ok(Verdict::Reversible),
            "irreversible" => Ok(Verdict::Irreversible),
            _ => Err(Error::Parse(format!("unknown verdict {s:?}"))),
        }
    }
}

/// One classified parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReversibilityRecord {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub n: u32,
    pub p: u32,
    pub det: u32,
    pub rank: usize,
    pub verdict: Verdict,
}

impl ReversibilityRecord {
    fn sort_key(&self) -> (u32, u32, u32, u32, u32, u32) {
        (self.p, self.n, self.a, self.b, self.c, self.d)
    }

    pub fn is_reversible(&self) -> bool {
        self.verdict == Verdict::Reversible
    }
}

impl Serialize for ReversibilityRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ReversibilityRecord", 9)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("det", &self.det)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("reversible", &self.is_reversible())?;
        st.end()
    }
}

pub const CSV_HEADER: &str = "a,b,c,d,n,p,det,rank,reversible";

pub fn records_to_csv(records: &[ReversibilityRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.a,
            r.b,
            r.c,
            r.d,
            r.n,
            r.p,
            r.det,
            r.rank,
            r.is_reversible()
        )
        .unwrap();
    }
    out
}

pub fn records_to_json(records: &[ReversibilityRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

/// Builds the rule matrix for `params` on `V_n` and classifies it.
pub fn classify_params(params: Params, n: u32) -> Result<ReversibilityRecord> {
    let shape = TreeShape::new(n)?;
    let report = RuleMatrix::build(&shape, params).report();
    Ok(ReversibilityRecord {
        a: params.a,
        b: params.b,
        c: params.c,
        d: params.d,
        n,
        p: params.p(),
        det: report.det,
        rank: report.rank,
        verdict: if report.det != 0 {
            Verdict::Reversible
        } else {
            Verdict::Irreversible
        },
    })
}

/// Classifies `(a, b, c, d)` at level `n` mod `p`. Coefficients must be
/// nonzero mod `p`.
pub fn classify(a: u64, b: u64, c: u64, d: u64, n: u32, p: u64) -> Result<ReversibilityRecord> {
    let field = PrimeField::new(p)?;
    classify_params(Params::new(a, b, c, d, field)?, n)
}

/// Coefficient values to sweep over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefSet {
    /// Given values, reduced mod each prime.
    Values(Vec<u64>),
    /// All of `1..p` for each prime.
    AllUnits,
}

impl CoefSet {
    fn resolve(&self, p: u32) -> Vec<u64> {
        match self {
            CoefSet::Values(v) => v.clone(),
            CoefSet::AllUnits => (1..p as u64).collect(),
        }
    }
}

/// What a sweep iterates over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepSpec {
    /// Full cartesian product.
    Grid {
        a: CoefSet,
        b: CoefSet,
        c: CoefSet,
        d: CoefSet,
        levels: Vec<u32>,
        primes: Vec<u64>,
        allow_zero: bool,
    },
    /// `samples` uniformly random tuples with units as coefficients.
    Random {
        samples: usize,
        seed: u64,
        levels: Vec<u32>,
        primes: Vec<u64>,
    },
}

impl SweepSpec {
    fn tuples(&self) -> Result<Vec<(Params, u32)>> {
        let mut out = Vec::new();
        match self {
            SweepSpec::Grid {
                a,
                b,
                c,
                d,
                levels,
                primes,
                allow_zero,
            } => {
                for &p in primes {
                    let field = PrimeField::new(p)?;
                    let (av, bv, cv, dv) = (
                        a.resolve(field.modulus()),
                        b.resolve(field.modulus()),
                        c.resolve(field.modulus()),
                        d.resolve(field.modulus()),
                    );
                    for &n in levels {
                        for &x in &av {
                            for &y in &bv {
                                for &z in &cv {
                                    for &w in &dv {
                                        out.push((
                                            Params::with_zeros_allowed(
                                                x,
                                                y,
                                                z,
                                                w,
                                                field,
                                                *allow_zero,
                                            )?,
                                            n,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            SweepSpec::Random {
                samples,
                seed,
                levels,
                primes,
            } => {
                if levels.is_empty() || primes.is_empty() {
                    return Err(Error::InvalidArgument(
                        "random sweep needs levels and primes".into(),
                    ));
                }
                let fields = primes
                    .iter()
                    .map(|&p| PrimeField::new(p))
                    .collect::<Result<Vec<_>>>()?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for _ in 0..*samples {
                    let field = fields[rng.gen_range(0..fields.len())];
                    let n = levels[rng.gen_range(0..levels.len())];
                    let p = field.modulus() as u64;
                    let mut unit = || rng.gen_range(1..p);
                    let params = Params::new(unit(), unit(), unit(), unit(), field)?;
                    out.push((params, n));
                }
            }
        }
        Ok(out)
    }
}

/// Classifies every tuple of `spec` in parallel and returns the records in
/// canonical `(p, n, a, b, c, d)` order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<ReversibilityRecord>> {
    let tuples = spec.tuples()?;
    let mut records = tuples
        .into_par_iter()
        .map(|(params, n)| classify_params(params, n))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(ReversibilityRecord::sort_key);
    Ok(records)
}

/// Closed-form determinant of the level-2 rule matrix:
/// `-d^4 (c (2 (a + b) + c) - d^2) (-(a + b) c + d^2)^2 mod p`.
pub fn det_formula_n2(a: u64, b: u64, c: u64, d: u64, field: PrimeField) -> u32 {
    let f = field;
    let (a, b, c, d) = (
        f.reduce_u64(a),
        f.reduce_u64(b),
        f.reduce_u64(c),
        f.reduce_u64(d),
    );
    let ab = f.add(a, b);
    let d2 = f.mul(d, d);
    let first = f.sub(f.mul(c, f.add(f.add(ab, ab), c)), d2);
    let second = f.sub(d2, f.mul(ab, c));
    let body = f.mul(f.mul(f.pow(d, 4), first), f.mul(second, second));
    f.neg(body)
}

/// Closed-form determinant of the level-3 rule matrix:
/// `-d^8 ((a+b)c - d^2)^3 (-2(a+b)c + d^2)^2 ((a+b)c^2(a+b+c) - c(3(a+b)+c)d^2 + d^4) mod p`.
pub fn det_formula_n3(a: u64, b: u64, c: u64, d: u64, field: PrimeField) -> u32 {
    let f = field;
    let (a, b, c, d) = (
        f.reduce_u64(a),
        f.reduce_u64(b),
        f.reduce_u64(c),
        f.reduce_u64(d),
    );
    let s = f.add(a, b);
    let d2 = f.mul(d, d);
    let sc = f.mul(s, c);
    let first = f.sub(sc, d2);
    let second = f.sub(d2, f.add(sc, sc));
    let c2 = f.mul(c, c);
    let third = {
        let t1 = f.mul(f.mul(s, c2), f.add(s, c));
        let three_s = f.add(f.add(s, s), s);
        let t2 = f.mul(f.mul(c, f.add(three_s, c)), d2);
        f.add(f.sub(t1, t2), f.mul(d2, d2))
    };
    let body = f.mul(
        f.mul(f.pow(d, 8), f.pow(first, 3)),
        f.mul(f.mul(second, second), third),
    );
    f.neg(body)
}
