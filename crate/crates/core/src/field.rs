//! Arithmetic in the prime field Z_p.
//!
//! Residues are stored as `u32` in `[0, p)`; products are formed in `u64`,
//! so any prime below 2^31 is supported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Deterministic primality test for `n < 2^32`.
///
/// Trial division by small primes, then Miller-Rabin with the witness set
/// {2, 3, 5, 7, 11}, which has no strong pseudoprimes below 2^32.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    if n < 23 * 23 {
        return true;
    }
    assert!(n < (1 << 32), "is_prime is limited to 32-bit inputs");
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &w in &[2u64, 3, 5, 7, 11] {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Handle for Z_p with `p` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(Error::NonPrimeModulus(p));
        }
        Ok(Self { p: p as u32 })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn reduce_u64(self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    #[inline]
    pub fn add(self, x: u32, y: u32) -> u32 {
        let s = x as u64 + y as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, x: u32, y: u32) -> u32 {
        if x >= y {
            x - y
        } else {
            (x as u64 + self.p as u64 - y as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.p - x
        }
    }

    #[inline]
    pub fn mul(self, x: u32, y: u32) -> u32 {
        (x as u64 * y as u64 % self.p as u64) as u32
    }

    /// `x * y + z`, the inner step of every dot product here.
    #[inline]
    pub fn mul_add(self, x: u32, y: u32, z: u32) -> u32 {
        ((x as u64 * y as u64 + z as u64) % self.p as u64) as u32
    }

    pub fn pow(self, x: u32, exp: u64) -> u32 {
        pow_mod(x as u64, exp, self.p as u64) as u32
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self, x: u32) -> Result<u32> {
        let x = x % self.p;
        if x == 0 {
            return Err(Error::DivisionByZero { p: self.p });
        }
        let (mut r0, mut r1) = (self.p as i64, x as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    /// Iterates over all residues `0..p`.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.p
    }

    /// Iterates over the units `1..p`.
    pub fn units(self) -> impl Iterator<Item = u32> {
        1..self.p
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p as u64
    }
}

impl std::fmt::Display for PrimeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z_{}", self.p)
    }
}

/// Primes in the inclusive range `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u32> {
    (lo..=hi.min(MAX_MODULUS - 1))
        .filter(|&q| is_prime(q))
        .map(|q| q as u32)
        .collect()
}
