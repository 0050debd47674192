use std::fs;
use std::path::Path;

use treeca_core::analysis::table1::{mismatches, parse_fixture, regenerate, TABLE1_FIXTURE};
use treeca_core::analysis::{
    classify_params, entropy_sequence, partition_atom_count, records_to_csv, records_to_json,
    CoefSet, Observation, ReversibilityRecord, SweepSpec,
};
use treeca_core::dynamics::{evolve, garden_report, Configuration};
use treeca_core::field::primes_in;
use treeca_core::format::{read_config, write_config, write_matrix, write_matrix_coo};
use treeca_core::{sweep, Error, Params, PrimeField, RuleMatrix, TreeShape};

use crate::args::{Cli, Command, Format, ObserveArg, RuleArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{} fixture row(s) disagree with the computed verdicts", .0.len())]
    FixtureMismatch(Vec<String>),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage_error",
            CliError::Domain(e) => e.code(),
            CliError::Io { .. } => "io_error",
            CliError::FixtureMismatch(_) => "fixture_mismatch",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 3,
            CliError::FixtureMismatch(_) => 4,
        }
    }
}

/// Rendered artifact plus diagnostics for stderr.
pub struct Output {
    pub body: String,
    pub notes: Vec<String>,
}

impl Output {
    fn plain(body: String) -> Self {
        Self {
            body,
            notes: Vec::new(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn pick(
    format: Option<Format>,
    default: Format,
    allowed: &[Format],
    command: &str,
) -> Result<Format, CliError> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(
            format!("{command} does not support --format {f:?}").to_lowercase(),
        ))
    }
}

fn rule(args: &RuleArgs) -> Result<(TreeShape, Params), CliError> {
    let field = PrimeField::new(args.p)?;
    let shape = TreeShape::new(args.n)?;
    let params = Params::with_zeros_allowed(
        args.a,
        args.b,
        args.c,
        args.d,
        field,
        args.allow_zero_coeffs,
    )?;
    Ok((shape, params))
}

fn rows_json<'a>(rows: impl Iterator<Item = &'a [u32]>) -> String {
    let rows: Vec<&[u32]> = rows.collect();
    let mut s = serde_json::to_string(&rows).expect("integers serialize");
    s.push('\n');
    s
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Matrix {
            rule: r,
            coo,
            inverse,
        } => {
            let format = pick(fmt, Format::Text, &[Format::Text, Format::Json], "matrix")?;
            let (shape, params) = rule(r)?;
            let m = RuleMatrix::build(&shape, params);
            let dense = if *inverse { m.inverse()? } else { m.to_dense() };
            let body = match (format, coo) {
                (Format::Json, _) => rows_json(dense.iter_rows()),
                (_, true) => write_matrix_coo(&shape, &dense),
                _ => write_matrix(&shape, &dense),
            };
            Ok(Output::plain(body))
        }
        Command::Evolve {
            rule: r,
            steps,
            input,
        } => {
            let format = pick(
                fmt,
                Format::Json,
                &[Format::Json, Format::Csv, Format::Text],
                "evolve",
            )?;
            let (shape, params) = rule(r)?;
            let mut notes = Vec::new();
            let initial = match input {
                Some(path) => {
                    let cfg = read_config(&read_file(path)?)?;
                    if cfg.shape() != &shape || cfg.field() != params.field {
                        return Err(Error::InvalidArgument(format!(
                            "configuration is for n={} p={}, rule is for n={} p={}",
                            cfg.shape().levels(),
                            cfg.field().modulus(),
                            shape.levels(),
                            params.p()
                        ))
                        .into());
                    }
                    cfg
                }
                None => {
                    notes.push(format!("seed {}", cli.seed));
                    Configuration::seeded(&shape, params.field, cli.seed)
                }
            };
            let trace = evolve(&initial, &params, *steps)?;
            let body = match format {
                Format::Json => trace.to_json() + "\n",
                Format::Csv => trace
                    .states
                    .iter()
                    .enumerate()
                    .map(|(t, s)| {
                        let vals: Vec<String> = s.values().iter().map(u32::to_string).collect();
                        format!("{t},{}\n", vals.join(","))
                    })
                    .collect(),
                Format::Text => trace
                    .states
                    .iter()
                    .map(write_config)
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            Ok(Output { body, notes })
        }
        Command::Det { rule: r } => {
            let format = pick(fmt, Format::Text, &[Format::Text, Format::Json], "det")?;
            let (shape, params) = rule(r)?;
            let report = RuleMatrix::build(&shape, params).report();
            let body = match format {
                Format::Json => json_line(&report),
                _ => format!(
                    "det {}\nrank {}\nnullity {}\ninvertible {}\n",
                    report.det, report.rank, report.nullity, report.invertible
                ),
            };
            Ok(Output::plain(body))
        }
        Command::Classify { rule: r } => {
            let format = pick(fmt, Format::Csv, &[Format::Csv, Format::Json], "classify")?;
            let (_, params) = rule(r)?;
            let record = classify_params(params, r.n)?;
            Ok(Output::plain(render_records(&[record], format)))
        }
        Command::Sweep {
            a,
            b,
            c,
            d,
            n,
            p,
            samples,
            allow_zero_coeffs,
        } => {
            let format = pick(fmt, Format::Csv, &[Format::Csv, Format::Json], "sweep")?;
            let levels = parse_list(n, "-n")?
                .ok_or_else(|| CliError::Usage("-n does not accept `all`".into()))?
                .into_iter()
                .map(|v| {
                    u32::try_from(v)
                        .map_err(|_| CliError::Usage(format!("level {v} is out of range")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let primes = parse_primes(p)?;
            let mut notes = Vec::new();
            let spec = match samples {
                Some(samples) => {
                    notes.push(format!("seed {}", cli.seed));
                    SweepSpec::Random {
                        samples: *samples,
                        seed: cli.seed,
                        levels,
                        primes,
                    }
                }
                None => SweepSpec::Grid {
                    a: coef_set(a, "-a")?,
                    b: coef_set(b, "-b")?,
                    c: coef_set(c, "-c")?,
                    d: coef_set(d, "-d")?,
                    levels,
                    primes,
                    allow_zero: *allow_zero_coeffs,
                },
            };
            let records = sweep(&spec)?;
            Ok(Output {
                body: render_records(&records, format),
                notes,
            })
        }
        Command::Garden { rule: r, samples } => {
            let format = pick(fmt, Format::Json, &[Format::Json, Format::Text], "garden")?;
            let (shape, params) = rule(r)?;
            let report = garden_report(&RuleMatrix::build(&shape, params), *samples);
            let body = match format {
                Format::Json => json_line(&report),
                _ => {
                    let opt = |v: Option<u128>| {
                        v.map_or_else(|| "overflow".to_string(), |v| v.to_string())
                    };
                    let mut s = format!(
                        "order {}\nrank {}\nimage_size {}\ngarden_count {}\n",
                        report.order,
                        report.rank,
                        opt(report.image_size),
                        opt(report.garden_count)
                    );
                    for cfg in &report.samples {
                        s.push_str(&write_config(cfg));
                    }
                    s
                }
            };
            Ok(Output::plain(body))
        }
        Command::Entropy { p, max_n } => {
            let format = pick(fmt, Format::Csv, &[Format::Csv, Format::Json], "entropy")?;
            let seq = entropy_sequence(PrimeField::new(*p)?, *max_n)?;
            let body = match format {
                Format::Json => seq.to_json() + "\n",
                _ => seq.to_csv(),
            };
            Ok(Output::plain(body))
        }
        Command::Probe {
            rule: r,
            steps,
            observe,
        } => {
            let format = pick(fmt, Format::Text, &[Format::Text, Format::Json], "probe")?;
            let (shape, params) = rule(r)?;
            let observation = match observe {
                ObserveArg::Root => Observation::Root,
                ObserveArg::Ball => Observation::Ball,
            };
            let probe =
                partition_atom_count(&params, *steps, &shape, observation, cli.enumeration_cap)?;
            let body = match format {
                Format::Json => json_line(&probe),
                _ => probe.summary(),
            };
            Ok(Output::plain(body))
        }
        Command::Table1 { fixture } => {
            let format = pick(
                fmt,
                Format::Csv,
                &[Format::Csv, Format::Json, Format::Text],
                "table1",
            )?;
            let text = match fixture {
                Some(path) => read_file(path)?,
                None => TABLE1_FIXTURE.to_string(),
            };
            let checks = regenerate(&parse_fixture(&text)?)?;
            let bad: Vec<String> = mismatches(&checks).iter().map(|c| c.to_string()).collect();
            let records: Vec<ReversibilityRecord> = checks.iter().map(|c| c.record).collect();
            let body = match format {
                Format::Text => checks
                    .iter()
                    .map(|c| format!("{} {}\n", if c.matches() { "ok" } else { "MISMATCH" }, c))
                    .collect(),
                f => render_records(&records, f),
            };
            let notes = vec![format!(
                "table1: {} records, {} mismatches",
                checks.len(),
                bad.len()
            )];
            if bad.is_empty() {
                Ok(Output { body, notes })
            } else {
                // The regenerated table is still useful when it disagrees.
                if let Some(out) = &cli.out {
                    write_file(out, &body)?;
                }
                Err(CliError::FixtureMismatch(bad))
            }
        }
    }
}

fn render_records(records: &[ReversibilityRecord], format: Format) -> String {
    match format {
        Format::Json => records_to_json(records) + "\n",
        _ => records_to_csv(records),
    }
}

/// `all` maps to `None`; otherwise a comma list whose items are integers or
/// inclusive ranges `lo..hi`.
fn parse_list(text: &str, flag: &str) -> Result<Option<Vec<u64>>, CliError> {
    let text = text.trim();
    if text == "all" {
        return Ok(None);
    }
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("{flag}: cannot parse {s:?} as an integer")))
    };
    let mut out = Vec::new();
    for item in text.split(',') {
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(CliError::Usage(format!("{flag}: empty range {item:?}")));
                }
                if hi - lo > 1 << 20 {
                    return Err(CliError::Usage(format!(
                        "{flag}: range {item:?} is too long"
                    )));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(item)?),
        }
    }
    Ok(Some(out))
}

fn coef_set(text: &str, flag: &str) -> Result<CoefSet, CliError> {
    Ok(parse_list(text, flag)?.map_or(CoefSet::AllUnits, CoefSet::Values))
}

/// Ranges keep only their primes; listed values must be prime.
fn parse_primes(text: &str) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',') {
        match item.split_once("..") {
            Some(_) => {
                let span = parse_list(item, "-p")?.unwrap_or_default();
                if let (Some(&lo), Some(&hi)) = (span.first(), span.last()) {
                    out.extend(primes_in(lo, hi).into_iter().map(u64::from));
                }
            }
            None => match parse_list(item, "-p")? {
                Some(v) => out.extend(v),
                None => return Err(CliError::Usage("-p does not accept `all`".into())),
            },
        }
    }
    Ok(out)
}
