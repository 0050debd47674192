//! The order-2 Cayley tree truncated at level `n`.
//!
//! The root has three children labelled 1..=3 and every other vertex has two
//! children labelled 1..=2. A vertex is named by the digit path from the
//! root; the root itself is the empty path. Vertices are flattened level by
//! level, and within a level lexicographically, which fixes the basis used
//! by every matrix and configuration vector in this crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest supported truncation. `|V_40|` still fits comfortably in `u64`.
pub const MAX_LEVEL: u32 = 40;

/// Path from the root to a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexAddress {
    digits: Vec<u8>,
}

impl VertexAddress {
    pub fn root() -> Self {
        Self { digits: Vec::new() }
    }

    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        let ok = match digits.split_first() {
            None => true,
            Some((first, rest)) => {
                (1..=3).contains(first) && rest.iter().all(|d| (1..=2).contains(d))
            }
        };
        if !ok {
            let s: String = digits
                .iter()
                .map(|d| char::from(b'0' + d.min(&9)))
                .collect();
            return Err(Error::InvalidAddress(s));
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn level(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    /// Drops the last digit; `None` for the root.
    pub fn parent(&self) -> Option<VertexAddress> {
        let (_, init) = self.digits.split_last()?;
        Some(Self {
            digits: init.to_vec(),
        })
    }

    /// Children ignoring any truncation: three for the root, two otherwise.
    pub fn children_unbounded(&self) -> Vec<VertexAddress> {
        let labels: &[u8] = if self.is_root() { &[1, 2, 3] } else { &[1, 2] };
        labels
            .iter()
            .map(|&d| {
                let mut digits = self.digits.clone();
                digits.push(d);
                Self { digits }
            })
            .collect()
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for VertexAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .bytes()
            .map(|b| match b {
                b'1'..=b'3' => Ok(b - b'0'),
                _ => Err(Error::InvalidAddress(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_digits(digits).map_err(|_| Error::InvalidAddress(s.to_string()))
    }
}

impl Serialize for VertexAddress {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexAddress {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Level sizes and offsets of the ball `V_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct TreeShape {
    n: u32,
    level_sizes: Vec<usize>,
    level_offsets: Vec<usize>,
    total: usize,
}

/// `|W_l|`: 1 for the root level, `3 * 2^(l-1)` otherwise.
pub fn level_size(l: u32) -> u64 {
    if l == 0 {
        1
    } else {
        3u64 << (l - 1)
    }
}

/// `|V_n| = 1 + 3 (2^n - 1)`.
pub fn ball_size(n: u32) -> u128 {
    1 + 3 * ((1u128 << n) - 1)
}

impl TreeShape {
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=MAX_LEVEL).contains(&n) {
            return Err(Error::InvalidLevel(n));
        }
        let level_sizes: Vec<usize> = (0..=n).map(|l| level_size(l) as usize).collect();
        let mut level_offsets = Vec::with_capacity(level_sizes.len());
        let mut acc = 0;
        for &s in &level_sizes {
            level_offsets.push(acc);
            acc += s;
        }
        Ok(Self {
            n,
            level_sizes,
            level_offsets,
            total: acc,
        })
    }

    pub fn levels(&self) -> u32 {
        self.n
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    /// `|V_n|`, the order of the rule matrix.
    pub fn total_vertices(&self) -> usize {
        self.total
    }

    pub fn contains(&self, addr: &VertexAddress) -> bool {
        addr.level() <= self.n
    }

    fn check(&self, addr: &VertexAddress) -> Result<()> {
        if self.contains(addr) {
            Ok(())
        } else {
            Err(Error::AddressOutOfShape {
                address: addr.to_string(),
                n: self.n,
            })
        }
    }

    /// Position of `addr` in the lexicographic level-by-level ordering.
    pub fn linear_index(&self, addr: &VertexAddress) -> Result<usize> {
        self.check(addr)?;
        let Some((&first, rest)) = addr.digits.split_first() else {
            return Ok(0);
        };
        let l = addr.level();
        let mut within = (first as usize - 1) << (l - 1);
        for (i, &d) in rest.iter().enumerate() {
            within += (d as usize - 1) << (l as usize - 2 - i);
        }
        Ok(self.level_offsets[l as usize] + within)
    }

    /// Inverse of [`TreeShape::linear_index`].
    pub fn address_of(&self, index: usize) -> Result<VertexAddress> {
        if index >= self.total {
            return Err(Error::DimensionMismatch {
                expected: self.total,
                found: index,
            });
        }
        let l = self.level_of(index);
        if l == 0 {
            return Ok(VertexAddress::root());
        }
        let within = index - self.level_offsets[l as usize];
        let mut digits = Vec::with_capacity(l as usize);
        digits.push((within >> (l - 1)) as u8 + 1);
        for shift in (0..l - 1).rev() {
            digits.push(((within >> shift) & 1) as u8 + 1);
        }
        Ok(VertexAddress { digits })
    }

    /// Level of the vertex at `index` (which must be in range).
    pub fn level_of(&self, index: usize) -> u32 {
        debug_assert!(index < self.total);
        // offsets are sorted; the level is the last offset <= index
        (self.level_offsets.partition_point(|&o| o <= index) - 1) as u32
    }

    /// Parent of an address, `None` for the root.
    pub fn parent(&self, addr: &VertexAddress) -> Result<Option<VertexAddress>> {
        self.check(addr)?;
        Ok(addr.parent())
    }

    /// Children inside the truncation; level-`n` vertices have none.
    pub fn children(&self, addr: &VertexAddress) -> Result<Vec<VertexAddress>> {
        self.check(addr)?;
        if addr.level() == self.n {
            return Ok(Vec::new());
        }
        Ok(addr.children_unbounded())
    }

    /// Index-level parent map, the hot path for matrix assembly and stepping.
    pub fn parent_index(&self, index: usize) -> Option<usize> {
        let l = self.level_of(index);
        match l {
            0 => None,
            1 => Some(0),
            _ => {
                let within = index - self.level_offsets[l as usize];
                Some(self.level_offsets[l as usize - 1] + within / 2)
            }
        }
    }

    /// Index-level children in label order (empty on the boundary level).
    pub fn child_indices(&self, index: usize) -> ChildIndices {
        let l = self.level_of(index);
        if l == self.n {
            return ChildIndices::None;
        }
        if l == 0 {
            return ChildIndices::Three([1, 2, 3]);
        }
        let within = index - self.level_offsets[l as usize];
        let first = self.level_offsets[l as usize + 1] + 2 * within;
        ChildIndices::Two([first, first + 1])
    }

    /// All addresses in linear-index order.
    pub fn addresses(&self) -> impl Iterator<Item = VertexAddress> + '_ {
        (0..self.total).map(move |i| self.address_of(i).expect("index in range"))
    }
}

/// Child index list without allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildIndices {
    None,
    Two([usize; 2]),
    Three([usize; 3]),
}

impl ChildIndices {
    pub fn as_slice(&self) -> &[usize] {
        match self {
            ChildIndices::None => &[],
            ChildIndices::Two(c) => c,
            ChildIndices::Three(c) => c,
        }
    }
}

impl TryFrom<u32> for TreeShape {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<TreeShape> for u32 {
    fn from(s: TreeShape) -> u32 {
        s.n
    }
}
