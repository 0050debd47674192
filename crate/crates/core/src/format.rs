//! Plain-text file formats.
//!
//! ```text
//! treeca-matrix 1 <n> <p>              dense, one row per line
//! treeca-matrix-coo 1 <n> <p> <nnz>    then `row col value` triples
//! treeca-config 1 <n> <p>              then one line of residues
//! ```
//!
//! Every line ends with `\n`; values are base-10 and space-separated.

use std::fmt::Write as _;

use crate::dynamics::Configuration;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::DenseMatrix;
use crate::tree::TreeShape;

pub const MATRIX_MAGIC: &str = "treeca-matrix";
pub const MATRIX_COO_MAGIC: &str = "treeca-matrix-coo";
pub const CONFIG_MAGIC: &str = "treeca-config";
pub const FORMAT_VERSION: u32 = 1;

/// A matrix read back from disk together with its header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub shape: TreeShape,
    pub matrix: DenseMatrix,
}

pub fn write_matrix(shape: &TreeShape, m: &DenseMatrix) -> String {
    let mut out = format!(
        "{MATRIX_MAGIC} {FORMAT_VERSION} {} {}\n",
        shape.levels(),
        m.field().modulus()
    );
    for row in m.iter_rows() {
        push_joined(&mut out, row);
    }
    out
}

pub fn write_matrix_coo(shape: &TreeShape, m: &DenseMatrix) -> String {
    let nnz = m.iter_rows().flatten().filter(|&&v| v != 0).count();
    let mut out = format!(
        "{MATRIX_COO_MAGIC} {FORMAT_VERSION} {} {} {nnz}\n",
        shape.levels(),
        m.field().modulus()
    );
    for (r, row) in m.iter_rows().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v != 0 {
                writeln!(out, "{r} {c} {v}").unwrap();
            }
        }
    }
    out
}

fn push_joined(out: &mut String, values: &[u32]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

struct Header<'a> {
    magic: &'a str,
    fields: Vec<u64>,
}

fn parse_header(line: Option<&str>) -> Result<Header<'_>> {
    let line = line.ok_or_else(|| Error::Parse("empty input".into()))?;
    let mut tokens = line.split(' ');
    let magic = tokens.next().unwrap_or_default();
    let fields = tokens.map(parse_u64).collect::<Result<Vec<_>>>()?;
    if fields.first() != Some(&(FORMAT_VERSION as u64)) {
        return Err(Error::Parse(format!("unsupported header {line:?}")));
    }
    Ok(Header { magic, fields })
}

fn parse_u64(tok: &str) -> Result<u64> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("expected an integer, found {tok:?}")))
}

fn parse_residue(tok: &str, field: PrimeField) -> Result<u32> {
    let v = parse_u64(tok)?;
    if v >= field.modulus() as u64 {
        return Err(Error::Parse(format!(
            "value {v} is not a residue mod {}",
            field.modulus()
        )));
    }
    Ok(v as u32)
}

fn shape_and_field(n: u64, p: u64) -> Result<(TreeShape, PrimeField)> {
    let n = u32::try_from(n).map_err(|_| Error::InvalidLevel(u32::MAX))?;
    Ok((TreeShape::new(n)?, PrimeField::new(p)?))
}

/// Reads either matrix variant, recognised by its magic word.
pub fn read_matrix(text: &str) -> Result<MatrixFile> {
    let mut lines = text.lines();
    let header = parse_header(lines.next())?;
    match (header.magic, header.fields.as_slice()) {
        (MATRIX_MAGIC, &[_, n, p]) => {
            let (shape, field) = shape_and_field(n, p)?;
            let order = shape.total_vertices();
            let mut m = DenseMatrix::zeros(field, order, order);
            let mut count = 0;
            for (r, line) in lines.enumerate() {
                if r >= order {
                    return Err(Error::Parse("too many rows".into()));
                }
                let values = line
                    .split(' ')
                    .map(|t| parse_residue(t, field))
                    .collect::<Result<Vec<_>>>()?;
                if values.len() != order {
                    return Err(Error::DimensionMismatch {
                        expected: order,
                        found: values.len(),
                    });
                }
                for (c, v) in values.into_iter().enumerate() {
                    m.set(r, c, v);
                }
                count += 1;
            }
            if count != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    found: count,
                });
            }
            Ok(MatrixFile { shape, matrix: m })
        }
        (MATRIX_COO_MAGIC, &[_, n, p, nnz]) => {
            let (shape, field) = shape_and_field(n, p)?;
            let order = shape.total_vertices();
            let mut m = DenseMatrix::zeros(field, order, order);
            let mut count = 0u64;
            for line in lines {
                let t: Vec<&str> = line.split(' ').collect();
                let [r, c, v] = t.as_slice() else {
                    return Err(Error::Parse(format!("bad triple {line:?}")));
                };
                let (r, c) = (parse_u64(r)? as usize, parse_u64(c)? as usize);
                if r >= order || c >= order {
                    return Err(Error::Parse(format!(
                        "entry ({r}, {c}) outside order {order}"
                    )));
                }
                m.set(r, c, parse_residue(v, field)?);
                count += 1;
            }
            if count != nnz {
                return Err(Error::Parse(format!(
                    "header declares {nnz} entries, found {count}"
                )));
            }
            Ok(MatrixFile { shape, matrix: m })
        }
        _ => Err(Error::Parse(format!(
            "unrecognised matrix header {:?}",
            header.magic
        ))),
    }
}

pub fn write_config(cfg: &Configuration) -> String {
    let mut out = format!(
        "{CONFIG_MAGIC} {FORMAT_VERSION} {} {}\n",
        cfg.shape().levels(),
        cfg.field().modulus()
    );
    push_joined(&mut out, cfg.values());
    out
}

pub fn read_config(text: &str) -> Result<Configuration> {
    let mut lines = text.lines();
    let header = parse_header(lines.next())?;
    let (CONFIG_MAGIC, &[_, n, p]) = (header.magic, header.fields.as_slice()) else {
        return Err(Error::Parse(format!(
            "unrecognised configuration header {:?}",
            header.magic
        )));
    };
    let (shape, field) = shape_and_field(n, p)?;
    let body = lines.next().unwrap_or_default();
    if lines.next().is_some() {
        return Err(Error::Parse("trailing lines after configuration".into()));
    }
    let values = if body.is_empty() {
        Vec::new()
    } else {
        body.split(' ')
            .map(|t| parse_residue(t, field))
            .collect::<Result<Vec<_>>>()?
    };
    Configuration::new(shape, field, values)
}
