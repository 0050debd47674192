//! The rule matrix of the nearest-neighbour linear rule with null boundary.
//!
//! Row `v` of the matrix is the update of vertex `v`:
//!
//! ```text
//! root:      x0'  = a x1 + b x2 + c x3 + d x0
//! non-root:  xv'  = a xv1 + b xv2 + c x_parent + d xv
//! ```
//!
//! with the child terms dropped on the boundary level.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{DenseMatrix, LinAlgReport, SolutionSet};
use crate::tree::TreeShape;

/// Rule coefficients and the field they live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub field: PrimeField,
}

impl Params {
    /// Coefficients are reduced mod p and must all be units.
    pub fn new(a: u64, b: u64, c: u64, d: u64, field: PrimeField) -> Result<Self> {
        let params = Self::relaxed(a, b, c, d, field);
        for (name, v) in params.named() {
            if v == 0 {
                return Err(Error::ZeroCoefficient {
                    name,
                    p: field.modulus(),
                });
            }
        }
        Ok(params)
    }

    /// Like [`Params::new`] but admits zero coefficients.
    pub fn relaxed(a: u64, b: u64, c: u64, d: u64, field: PrimeField) -> Self {
        Self {
            a: field.reduce_u64(a),
            b: field.reduce_u64(b),
            c: field.reduce_u64(c),
            d: field.reduce_u64(d),
            field,
        }
    }

    pub fn with_zeros_allowed(
        a: u64,
        b: u64,
        c: u64,
        d: u64,
        field: PrimeField,
        allow_zero: bool,
    ) -> Result<Self> {
        if allow_zero {
            Ok(Self::relaxed(a, b, c, d, field))
        } else {
            Self::new(a, b, c, d, field)
        }
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn named(&self) -> [(char, u32); 4] {
        [('a', self.a), ('b', self.b), ('c', self.c), ('d', self.d)]
    }

    pub fn value(&self, coef: Coef) -> u32 {
        match coef {
            Coef::A => self.a,
            Coef::B => self.b,
            Coef::C => self.c,
            Coef::D => self.d,
        }
    }

    /// Every coefficient is a unit mod p, i.e. the rule permutes the state
    /// alphabet in each argument.
    pub fn is_bipermutative(&self) -> bool {
        self.named().iter().all(|&(_, v)| v != 0)
    }
}

/// Which coefficient a structural nonzero carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coef {
    A,
    B,
    C,
    D,
}

impl Coef {
    pub fn label(self) -> char {
        match self {
            Coef::A => 'a',
            Coef::B => 'b',
            Coef::C => 'c',
            Coef::D => 'd',
        }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Sparse rule matrix in compressed-row form.
///
/// Each row holds at most four structural entries tagged with the
/// coefficient they carry, sorted by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatrix {
    shape: TreeShape,
    params: Params,
    row_start: Vec<usize>,
    entries: Vec<(usize, Coef)>,
}

impl RuleMatrix {
    pub fn build(shape: &TreeShape, params: Params) -> Self {
        let order = shape.total_vertices();
        let mut row_start = Vec::with_capacity(order + 1);
        let mut entries = Vec::with_capacity(4 * order);
        for v in 0..order {
            row_start.push(entries.len());
            let mut row: Vec<(usize, Coef)> = Vec::with_capacity(4);
            row.push((v, Coef::D));
            match shape.parent_index(v) {
                // the root's third child carries c, playing the parent's role
                None => {
                    let kids = shape.child_indices(v);
                    let kids = kids.as_slice();
                    row.extend([(kids[0], Coef::A), (kids[1], Coef::B), (kids[2], Coef::C)]);
                }
                Some(parent) => {
                    row.push((parent, Coef::C));
                    if let [first, second] = *shape.child_indices(v).as_slice() {
                        row.extend([(first, Coef::A), (second, Coef::B)]);
                    }
                }
            }
            row.sort_unstable_by_key(|&(c, _)| c);
            entries.extend(row);
        }
        row_start.push(entries.len());
        Self {
            shape: shape.clone(),
            params,
            row_start,
            entries,
        }
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn field(&self) -> PrimeField {
        self.params.field
    }

    pub fn order(&self) -> usize {
        self.shape.total_vertices()
    }

    /// Structural entries of a row with their coefficient labels.
    pub fn row_labels(&self, r: usize) -> &[(usize, Coef)] {
        &self.entries[self.row_start[r]..self.row_start[r + 1]]
    }

    /// Nonzero `(column, value)` pairs of a row; entries whose coefficient
    /// is zero under the relaxed parameters are skipped.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.row_labels(r)
            .iter()
            .map(|&(c, coef)| (c, self.params.value(coef)))
            .filter(|&(_, v)| v != 0)
    }

    pub fn label(&self, r: usize, c: usize) -> Option<Coef> {
        self.row_labels(r)
            .binary_search_by_key(&c, |&(col, _)| col)
            .ok()
            .map(|i| self.row_labels(r)[i].1)
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.label(r, c).map_or(0, |coef| self.params.value(coef))
    }

    pub fn nnz(&self) -> usize {
        (0..self.order()).map(|r| self.row(r).count()).sum()
    }

    /// Coefficient-label grid: `'0'` or one of `a`, `b`, `c`, `d`.
    pub fn label_grid(&self) -> Vec<Vec<char>> {
        let n = self.order();
        (0..n)
            .map(|r| {
                let mut line = vec!['0'; n];
                for &(c, coef) in self.row_labels(r) {
                    line[c] = coef.label();
                }
                line
            })
            .collect()
    }

    pub fn apply(&self, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: x.len(),
            });
        }
        let f = self.field();
        Ok((0..self.order())
            .map(|r| self.row(r).fold(0, |acc, (c, v)| f.mul_add(v, x[c], acc)))
            .collect())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.order();
        let mut m = DenseMatrix::zeros(self.field(), n, n);
        for r in 0..n {
            for (c, v) in self.row(r) {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn det(&self) -> u32 {
        self.to_dense().det().expect("rule matrix is square")
    }

    pub fn rank(&self) -> usize {
        self.to_dense().rank()
    }

    pub fn report(&self) -> LinAlgReport {
        self.to_dense().report().expect("rule matrix is square")
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        self.to_dense().inverse()
    }

    pub fn solve(&self, y: &[u32]) -> Result<SolutionSet> {
        self.to_dense().solve(y)
    }

    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        self.to_dense().kernel_basis()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(a: u64, b: u64, c: u64, d: u64, p: u64) -> Params {
        Params::new(a, b, c, d, PrimeField::new(p).unwrap()).unwrap()
    }

    fn build(n: u32, p: Params) -> RuleMatrix {
        RuleMatrix::build(&TreeShape::new(n).unwrap(), p)
    }

    #[test]
    fn zero_coefficients_rejected_unless_relaxed() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(
            Params::new(1, 5, 1, 1, f),
            Err(Error::ZeroCoefficient { name: 'b', p: 5 })
        );
        let relaxed = Params::relaxed(1, 5, 1, 1, f);
        assert_eq!(relaxed.b, 0);
        assert!(!relaxed.is_bipermutative());
        assert!(params(1, 2, 3, 4, 5).is_bipermutative());
    }

    #[test]
    fn n1_rows_from_local_rules() {
        let m = build(1, params(1, 1, 1, 1, 2));
        let dense = m.to_dense();
        let rows: Vec<Vec<u32>> = dense.iter_rows().map(<[u32]>::to_vec).collect();
        assert_eq!(
            rows,
            vec![
                vec![1, 1, 1, 1],
                vec![1, 1, 0, 0],
                vec![1, 0, 1, 0],
                vec![1, 0, 0, 1]
            ]
        );
    }

    #[test]
    fn det_examples() {
        assert_eq!(build(2, params(1, 1, 1, 1, 2)).det(), 0);
        assert_eq!(build(2, params(1, 1, 1, 1, 3)).det(), 2);
        assert_eq!(build(2, params(2, 1, 5, 2, 17)).det(), 0);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(build(2, params(1, 1, 1, 1, 3)).rank(), 10);
        assert!(build(2, params(1, 1, 1, 1, 2)).rank() < 10);
        let f = PrimeField::new(3).unwrap();
        let diag = build(2, Params::relaxed(0, 0, 0, 1, f));
        assert_eq!(diag.rank(), 10);
        assert!(diag.to_dense().is_identity());
    }

    #[test]
    fn invert_examples() {
        let m = build(2, params(1, 1, 1, 1, 3));
        let inv = m.inverse().unwrap();
        assert!(m.to_dense().mul(&inv).unwrap().is_identity());
        assert_eq!(
            build(2, params(1, 1, 1, 1, 2)).inverse(),
            Err(Error::SingularMatrix { p: 2 })
        );
        let m3 = build(3, params(2, 1, 1, 3, 5));
        let inv3 = m3.inverse().unwrap();
        assert!(m3.to_dense().mul(&inv3).unwrap().is_identity());
        assert!(inv3.mul(&m3.to_dense()).unwrap().is_identity());
    }

    #[test]
    fn kernel_examples() {
        assert!(build(2, params(1, 1, 1, 1, 3)).kernel_basis().is_empty());
        let singular = build(2, params(1, 1, 1, 1, 2));
        let k = singular.kernel_basis();
        assert_eq!(k.len(), 10 - singular.rank());
        for v in &k {
            assert!(singular.apply(v).unwrap().iter().all(|&x| x == 0));
        }
        let f = PrimeField::new(2).unwrap();
        assert_eq!(
            build(2, Params::relaxed(0, 0, 0, 0, f))
                .kernel_basis()
                .len(),
            10
        );
    }

    #[test]
    fn solve_examples() {
        let m = build(2, params(1, 1, 1, 1, 3));
        let x: Vec<u32> = (0..10).map(|i| i % 3).collect();
        let y = m.apply(&x).unwrap();
        let sol = m.solve(&y).unwrap();
        assert_eq!(sol.enumerate(10).unwrap(), vec![x]);

        let s = build(2, params(1, 1, 1, 1, 2));
        let zero = s.solve(&[0; 10]).unwrap();
        let all = zero.enumerate(1 << 10).unwrap();
        assert_eq!(all.len(), 1 << (10 - s.rank()));
        assert!(all.contains(&vec![0; 10]));
        assert!(matches!(
            s.solve(&[0; 9]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn structure_follows_parent_child_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7eec);
        for n in 1..=8 {
            let shape = TreeShape::new(n).unwrap();
            let f = PrimeField::new(101).unwrap();
            let p = Params::new(
                rng.gen_range(1..101),
                rng.gen_range(1..101),
                rng.gen_range(1..101),
                rng.gen_range(1..101),
                f,
            )
            .unwrap();
            let m = RuleMatrix::build(&shape, p);
            for u in 0..m.order() {
                let mut allowed = vec![u];
                allowed.extend(shape.parent_index(u));
                allowed.extend_from_slice(shape.child_indices(u).as_slice());
                let row: Vec<_> = m.row(u).collect();
                assert!(row.len() <= 4);
                for &(c, _) in &row {
                    assert!(allowed.contains(&c), "n={n} row {u} col {c}");
                }
                assert_eq!(m.get(u, u), p.d);
                if shape.level_of(u) == n {
                    assert_eq!(row.len(), 2);
                }
            }
        }
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let m = build(4, params(3, 5, 7, 11, 13));
        let x: Vec<u32> = (0..m.order() as u32).map(|i| (i * 7 + 3) % 13).collect();
        assert_eq!(m.apply(&x).unwrap(), m.to_dense().mul_vec(&x).unwrap());
    }
}
