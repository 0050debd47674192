use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treeca_core::analysis::DEFAULT_SEED;
use treeca_core::DEFAULT_ENUMERATION_CAP;

#[derive(Debug, Parser)]
#[command(
    name = "treeca",
    version,
    about = "Linear cellular automata on the order-2 Cayley tree over Z_p"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; each command documents which ones it supports.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for parallel commands.
    #[arg(long, global = true, env = "TREECA_THREADS")]
    pub threads: Option<usize>,

    /// Largest configuration space exhaustive commands may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: u64,

    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObserveArg {
    Root,
    Ball,
}

/// Rule coefficients, level and modulus.
#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    #[arg(short = 'a')]
    pub a: u64,
    #[arg(short = 'b')]
    pub b: u64,
    #[arg(short = 'c')]
    pub c: u64,
    #[arg(short = 'd')]
    pub d: u64,
    /// Number of tree levels.
    #[arg(short = 'n')]
    pub n: u32,
    /// Prime modulus.
    #[arg(short = 'p')]
    pub p: u64,
    /// Accept coefficients that vanish mod p.
    #[arg(long)]
    pub allow_zero_coeffs: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the rule matrix (text: treeca-matrix v1, or COO with --coo).
    Matrix {
        #[command(flatten)]
        rule: RuleArgs,
        /// Sparse `treeca-matrix-coo` output.
        #[arg(long)]
        coo: bool,
        /// Emit the inverse matrix instead.
        #[arg(long)]
        inverse: bool,
    },
    /// Evolve a configuration; emits a JSON trace by default.
    Evolve {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// treeca-config file with the initial state; seeded random otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Determinant, rank and nullity of the rule matrix.
    Det {
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Reversibility record for one parameter tuple.
    Classify {
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Reversibility over a grid of parameters, or random samples.
    ///
    /// Coefficient lists accept `1,2,5`, ranges `1..4` (inclusive) and `all`
    /// (every unit mod p). Prime lists accept the same; ranges keep primes only.
    Sweep {
        #[arg(short = 'a', default_value = "all")]
        a: String,
        #[arg(short = 'b', default_value = "all")]
        b: String,
        #[arg(short = 'c', default_value = "all")]
        c: String,
        #[arg(short = 'd', default_value = "all")]
        d: String,
        #[arg(short = 'n', default_value = "2")]
        n: String,
        #[arg(short = 'p')]
        p: String,
        /// Draw this many random tuples instead of the full grid.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        allow_zero_coeffs: bool,
    },
    /// Garden-of-Eden count and sample unreachable configurations.
    Garden {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Entropy growth H_n = |V_n| log2 p as CSV.
    Entropy {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long, default_value_t = 10)]
        max_n: u32,
    },
    /// Count atoms of the refined root partition by exhaustive enumeration.
    Probe {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 2)]
        steps: u32,
        #[arg(long, value_enum, default_value_t = ObserveArg::Root)]
        observe: ObserveArg,
    },
    /// Regenerate the reversibility table and diff it against the fixture.
    Table1 {
        /// Alternative fixture; the built-in one is used otherwise.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}
