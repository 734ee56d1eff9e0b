//! Prime-field arithmetic, dense matrices over GF(q) and the Vandermonde MDS
//! codec every scheme is built from.

mod matrix;
mod mds;

pub use matrix::{mat_rank, FieldMatrix};
pub use mds::MdsCodebook;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A field element. One 16-bit slot per symbol, so `q <= 65521`.
pub type Symbol = u16;

/// A sequence of field elements (a source block, a share stream, ...).
pub type SymbolSeq = Vec<Symbol>;

/// Largest prime that fits a 16-bit symbol slot.
pub const MAX_MODULUS: u32 = 65521;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not a prime in [2, 65521]")]
    NotPrime(u32),
    #[error("0 has no multiplicative inverse")]
    NoInverse,
    #[error("degenerate code: {0}")]
    DegenerateCode(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("insufficient shares: need {needed}, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("shares are inconsistent with any codeword")]
    CorruptShare,
}

/// The prime field GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Field {
    q: u32,
}

impl TryFrom<u32> for Field {
    type Error = FieldError;

    fn try_from(q: u32) -> Result<Self, Self::Error> {
        Field::new(q)
    }
}

impl From<Field> for u32 {
    fn from(f: Field) -> u32 {
        f.q
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if q > MAX_MODULUS || !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(Field { q })
    }

    /// Smallest prime `q >= encoders + 1`, so that `encoders` distinct nonzero
    /// evaluation points exist.
    pub fn for_encoders(encoders: usize) -> Result<Self, FieldError> {
        let mut q = (encoders as u32 + 1).max(2);
        while !is_prime(q) {
            q += 1;
        }
        Field::new(q)
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Bits needed to store one element.
    pub fn symbol_bits(&self) -> u32 {
        32 - (self.q - 1).leading_zeros()
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> Symbol {
        (x % self.q as u64) as Symbol
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        let s = a as u32 + b as u32;
        (if s >= self.q { s - self.q } else { s }) as Symbol
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        let (a, b) = (a as u32, b as u32);
        (if a >= b { a - b } else { a + self.q - b }) as Symbol
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        ((a as u32 * b as u32) % self.q) as Symbol
    }

    pub fn pow(&self, base: Symbol, mut exp: u32) -> Symbol {
        let mut acc: Symbol = 1 % self.q as Symbol;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat, `a^(q-2)`.
    pub fn inv(&self, a: Symbol) -> Result<Symbol, FieldError> {
        if (a as u32).is_multiple_of(self.q) {
            return Err(FieldError::NoInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as u32) < self.q
    }

    /// `acc[i] += c * x[i]`
    pub fn axpy(&self, acc: &mut [Symbol], c: Symbol, x: &[Symbol]) {
        debug_assert_eq!(acc.len(), x.len());
        if c == 0 {
            return;
        }
        for (a, &v) in acc.iter_mut().zip(x) {
            *a = self.add(*a, self.mul(c, v));
        }
    }
}

/// Free-function form of [`Field::inv`].
pub fn gf_inverse(a: Symbol, f: &Field) -> Result<Symbol, FieldError> {
    f.inv(a)
}
