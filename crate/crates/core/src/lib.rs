//! Linear cellular automata on the order-2 Cayley tree over Z_p.
//!
//! A configuration assigns a residue mod a prime `p` to every vertex of the
//! tree truncated at level `n`; vertices outside the truncation are held at
//! zero. One time step replaces each state by
//! `a * child1 + b * child2 + c * parent + d * self` (the root reads its
//! three children with `a`, `b`, `c`). The map is linear, so everything
//! reduces to the rule matrix built in [`rulematrix`]:
//!
//! ```
//! use treeca_core::{classify, PrimeField, Params, RuleMatrix, TreeShape};
//!
//! let shape = TreeShape::new(2)?;
//! let params = Params::new(1, 1, 1, 1, PrimeField::new(3)?)?;
//! let m = RuleMatrix::build(&shape, params);
//! assert_eq!(m.order(), 10);
//! assert_eq!(m.det(), 2);
//! assert!(classify(1, 1, 1, 1, 2, 3)?.is_reversible());
//! # Ok::<(), treeca_core::Error>(())
//! ```

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod format;
pub mod linalg;
pub mod rulematrix;
pub mod tree;

pub use analysis::{
    classify, classify_params, det_formula_n2, det_formula_n3, entropy_sequence,
    partition_atom_count, sweep, CoefSet, EntropySequence, Observation, PartitionProbe,
    ReversibilityRecord, SweepSpec, Verdict,
};
pub use dynamics::{
    bijectivity_oracle, evolve, garden_report, image_census, preimages, step_local, step_matrix,
    Configuration, EvolutionTrace, GardenReport, DEFAULT_ENUMERATION_CAP,
};
pub use error::{Error, Result};
pub use field::PrimeField;
pub use linalg::{DenseMatrix, LinAlgReport, SolutionSet};
pub use rulematrix::{Coef, Params, RuleMatrix};
pub use tree::{TreeShape, VertexAddress};
