//! Dense Gaussian elimination over Z_p.
//!
//! Pivots are chosen as the first nonzero residue at or below the current
//! row (lowest row index wins), so every result is deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Row-major dense matrix with entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, order: usize) -> Self {
        let mut m = Self::zeros(field, order, order);
        for i in 0..order {
            m.data[i * order + i] = 1;
        }
        m
    }

    /// Builds a matrix from rows, reducing every entry mod p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| field.reduce_u64(x)));
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        let v = self.field.reduce_u64(v as u64);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(r, k);
                if x == 0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = f.mul_add(x, s, *d);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let f = self.field;
        Ok(self
            .iter_rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(0, |acc, (&m, &v)| f.mul_add(m, v, acc))
            })
            .collect())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    /// Reduced row echelon form of a working copy.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let f = self.field;
        let mut pivots = Vec::new();
        let mut swaps = 0usize;
        let mut pivot_product = 1u32;
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                m.swap_rows(pr, r);
                swaps += 1;
            }
            let pv = m.get(r, c);
            pivot_product = f.mul(pivot_product, pv);
            let inv = f.inv(pv).expect("pivot is nonzero");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let factor = m.get(i, c);
                    if factor != 0 {
                        m.sub_row_multiple(i, r, factor, c);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: m,
            pivots,
            swaps,
            pivot_product,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let cols = self.cols;
        for c in 0..cols {
            self.data.swap(a * cols + c, b * cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, k: u32) {
        let f = self.field;
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *v = f.mul(*v, k);
        }
    }

    /// `row[dst] -= factor * row[src]`, starting at column `from`.
    fn sub_row_multiple(&mut self, dst: usize, src: usize, factor: u32, from: usize) {
        let f = self.field;
        let neg = f.neg(factor);
        let cols = self.cols;
        for c in from..cols {
            let s = self.data[src * cols + c];
            if s != 0 {
                let d = &mut self.data[dst * cols + c];
                *d = f.mul_add(neg, s, *d);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Determinant in `[0, p)`; sign tracked by counting row swaps.
    pub fn det(&self) -> Result<u32> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        Ok(self.echelon().det())
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.data[r * 2 * n + n + r] = 1;
        }
        let ech = aug.echelon();
        if ech.pivots.iter().take_while(|&&c| c < n).count() < n {
            return Err(Error::SingularMatrix {
                p: self.field.modulus(),
            });
        }
        let mut inv = Self::zeros(self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&ech.reduced.row(r)[n..]);
        }
        Ok(inv)
    }

    /// All `x` with `self * x = y`.
    pub fn solve(&self, y: &[u32]) -> Result<SolutionSet> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: y.len(),
            });
        }
        let cols = self.cols;
        let mut aug = Self::zeros(self.field, self.rows, cols + 1);
        for (r, &yr) in y.iter().enumerate() {
            aug.data[r * (cols + 1)..r * (cols + 1) + cols].copy_from_slice(self.row(r));
            aug.data[r * (cols + 1) + cols] = self.field.reduce_u64(yr as u64);
        }
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&cols) {
            return Ok(SolutionSet::Inconsistent);
        }
        let mut particular = vec![0; cols];
        for (r, &c) in ech.pivots.iter().enumerate() {
            particular[c] = ech.reduced.get(r, cols);
        }
        let kernel = kernel_from_rref(&ech.reduced, &ech.pivots, cols);
        Ok(SolutionSet::Affine {
            field: self.field,
            particular,
            kernel,
        })
    }

    /// Basis of the right null space.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let ech = self.echelon();
        kernel_from_rref(&ech.reduced, &ech.pivots, self.cols)
    }

    pub fn report(&self) -> Result<LinAlgReport> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let ech = self.echelon();
        let rank = ech.rank();
        let det = ech.det();
        Ok(LinAlgReport {
            det,
            rank,
            nullity: self.cols - rank,
            invertible: det != 0,
        })
    }
}

fn kernel_from_rref(reduced: &DenseMatrix, pivots: &[usize], cols: usize) -> Vec<Vec<u32>> {
    let f = reduced.field;
    let mut is_pivot = vec![false; cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(reduced.get(r, free));
            }
            v
        })
        .collect()
}

/// Output of [`DenseMatrix::echelon`].
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: DenseMatrix,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
    pub swaps: usize,
    pivot_product: u32,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Determinant of the original (square) matrix.
    pub fn det(&self) -> u32 {
        let n = self.reduced.rows;
        if self.pivots.len() < n {
            return 0;
        }
        let f = self.reduced.field;
        if self.swaps % 2 == 1 {
            f.neg(self.pivot_product)
        } else {
            self.pivot_product
        }
    }
}

/// Determinant, rank and invertibility summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinAlgReport {
    pub det: u32,
    pub rank: usize,
    pub nullity: usize,
    pub invertible: bool,
}

/// Preimage set of a linear map: empty, or a coset of the kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionSet {
    Inconsistent,
    Affine {
        field: PrimeField,
        particular: Vec<u32>,
        kernel: Vec<Vec<u32>>,
    },
}

impl SolutionSet {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SolutionSet::Affine { .. })
    }

    pub fn nullity(&self) -> Option<usize> {
        match self {
            SolutionSet::Inconsistent => None,
            SolutionSet::Affine { kernel, .. } => Some(kernel.len()),
        }
    }

    /// Number of solutions, `None` if it does not fit in `u128`.
    pub fn count(&self) -> Option<u128> {
        match self {
            SolutionSet::Inconsistent => Some(0),
            SolutionSet::Affine { field, kernel, .. } => {
                (field.modulus() as u128).checked_pow(kernel.len() as u32)
            }
        }
    }

    /// Lists every solution, failing when there are more than `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Vec<u32>>> {
        let SolutionSet::Affine {
            field,
            particular,
            kernel,
        } = self
        else {
            return Ok(Vec::new());
        };
        let total = self.count().filter(|&c| c <= cap as u128).ok_or_else(|| {
            Error::EnumerationTooLarge {
                requested: format!("{}^{}", field.modulus(), kernel.len()),
                cap,
            }
        })?;
        let f = *field;
        let mut coeffs = vec![0u32; kernel.len()];
        let mut out = Vec::with_capacity(total as usize);
        for _ in 0..total {
            let mut v = particular.clone();
            for (k, &t) in kernel.iter().zip(&coeffs) {
                if t != 0 {
                    for (vi, &ki) in v.iter_mut().zip(k) {
                        *vi = f.mul_add(t, ki, *vi);
                    }
                }
            }
            out.push(v);
            // mixed-radix increment, last coefficient fastest
            for t in coeffs.iter_mut().rev() {
                *t += 1;
                if *t < f.modulus() {
                    break;
                }
                *t = 0;
            }
        }
        Ok(out)
    }
}
