//! Entropy growth of the root-cylinder partition, and a finite probe that
//! counts the atoms of the refined partition on a truncated tree.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{configuration_count, decode, step_local, Configuration};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::rulematrix::Params;
use crate::tree::{ball_size, TreeShape};

/// Largest `n` for which `|V_n|` is tabulated.
pub const MAX_ENTROPY_LEVEL: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyTerm {
    pub n: u32,
    /// `|V_n| = 1 + 3 (2^n - 1)`; `h = cells * log2(p)`.
    pub cells: u128,
    pub h: f64,
    pub h_over_n: f64,
}

/// `H_n = |V_n| log2 p` for `n = 1..=max_n` under the uniform measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropySequence {
    pub p: u32,
    pub terms: Vec<EntropyTerm>,
}

impl EntropySequence {
    /// CSV with header `n,H_n,H_n_over_n`, values to 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,H_n,H_n_over_n\n");
        for t in &self.terms {
            writeln!(
                out,
                "{},{},{}",
                t.n,
                format_significant(t.h, 12),
                format_significant(t.h_over_n, 12)
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("entropy terms serialize")
    }
}

pub fn entropy_sequence(field: PrimeField, max_n: u32) -> Result<EntropySequence> {
    if !(1..=MAX_ENTROPY_LEVEL).contains(&max_n) {
        return Err(Error::InvalidArgument(format!(
            "max-n must be in 1..={MAX_ENTROPY_LEVEL}, got {max_n}"
        )));
    }
    let log_p = (field.modulus() as f64).log2();
    let terms = (1..=max_n)
        .map(|n| {
            let cells = ball_size(n);
            let h = cells as f64 * log_p;
            EntropyTerm {
                n,
                cells,
                h,
                h_over_n: h / n as f64,
            }
        })
        .collect();
    Ok(EntropySequence {
        p: field.modulus(),
        terms,
    })
}

/// Shannon entropy in bits of a probability vector. Zero-mass symbols
/// contribute nothing.
pub fn partition_entropy(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() || probs.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
        return Err(Error::InvalidArgument(
            "probabilities must lie in [0, 1]".into(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(probs
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| -q * q.log2())
        .sum())
}

/// Entropy of the cylinder partition on the first `|V_n|` coordinates of a
/// Bernoulli product measure with marginal `probs`.
pub fn bernoulli_join_entropy(probs: &[f64], n: u32) -> Result<f64> {
    if n > MAX_ENTROPY_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "n must be at most {MAX_ENTROPY_LEVEL}"
        )));
    }
    Ok(ball_size(n) as f64 * partition_entropy(probs)?)
}

/// Renders `x` with `digits` significant digits, `%g` style: fixed notation
/// for moderate magnitudes, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Which coordinates are read at each time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Observation {
    /// The root state only.
    #[default]
    Root,
    /// The root and its three neighbours.
    Ball,
}

impl Observation {
    fn coordinates(self) -> &'static [usize] {
        match self {
            Observation::Root => &[0],
            Observation::Ball => &[0, 1, 2, 3],
        }
    }
}

/// Atom count of `xi v T^-1 xi v ... v T^-(steps-1) xi` restricted to a
/// truncated tree, next to the count `p^|V_steps|` the infinite-tree
/// argument asserts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionProbe {
    pub steps: u32,
    pub truncation_level: u32,
    pub p: u32,
    pub observation: Observation,
    pub atom_count: u64,
    /// Coordinates observed over all steps; the count is at most `p^observables`.
    pub observables: usize,
    pub configurations: u64,
    /// Exponent `1 + 3 (2^steps - 1)` of the asserted count.
    pub claimed_exponent: u128,
    /// `p^claimed_exponent`, absent if it overflows `u128`.
    pub claimed_atoms: Option<u128>,
}

impl PartitionProbe {
    /// Two-line plain-text summary with both counts.
    pub fn summary(&self) -> String {
        let claimed = match self.claimed_atoms {
            Some(v) => format!("{}^{} = {v}", self.p, self.claimed_exponent),
            None => format!("{}^{}", self.p, self.claimed_exponent),
        };
        format!(
            "atom_count {} (steps={}, n={}, p={}, observation={}, configurations={})\nclaimed_atoms {claimed}\n",
            self.atom_count,
            self.steps,
            self.truncation_level,
            self.p,
            match self.observation {
                Observation::Root => "root",
                Observation::Ball => "ball",
            },
            self.configurations,
        )
    }
}

/// Enumerates every configuration on `truncation`, runs `steps - 1` updates
/// and counts distinct observation histories.
pub fn partition_atom_count(
    params: &Params,
    steps: u32,
    truncation: &TreeShape,
    observation: Observation,
    cap: u64,
) -> Result<PartitionProbe> {
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "the probe needs at least one step".into(),
        ));
    }
    let p = params.p();
    let total = configuration_count(truncation, p, cap)?;
    let coords = observation.coordinates();
    let mut histories: Vec<Vec<u32>> = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0u32; truncation.total_vertices()],
            |buf, k| {
                decode(k, p, buf);
                let mut cfg = Configuration::new(truncation.clone(), params.field, buf.clone())
                    .expect("valid residues");
                let mut history = Vec::with_capacity(steps as usize * coords.len());
                for t in 0..steps {
                    if t > 0 {
                        cfg = step_local(&cfg, params).expect("field matches");
                    }
                    history.extend(coords.iter().map(|&i| cfg.values()[i]));
                }
                history
            },
        )
        .collect();
    histories.par_sort_unstable();
    histories.dedup();
    let claimed_exponent = ball_size(steps);
    let claimed_atoms = u32::try_from(claimed_exponent)
        .ok()
        .and_then(|e| (p as u128).checked_pow(e));
    Ok(PartitionProbe {
        steps,
        truncation_level: truncation.levels(),
        p,
        observation,
        atom_count: histories.len() as u64,
        observables: steps as usize * coords.len(),
        configurations: total,
        claimed_exponent,
        claimed_atoms,
    })
}
