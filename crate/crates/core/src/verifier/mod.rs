//! Certification of reconstruction and secrecy.
//!
//! Two independent oracles: an exhaustive one that enumerates every input
//! and compares exact histograms, and a rank one that works on the linear
//! image of a scheme. [`full_audit`] runs every access pattern a profile
//! requires through either or both.

mod audit;
mod exhaustive;
mod rank;

pub use audit::{
    audit_encoder, audit_rows, full_audit, full_audit_with_cap, AuditRow, OracleMode, OracleUsed, RowKind,
    VerificationReport,
};
pub use exhaustive::{enum_cap, microstates, Enumeration, JointCounts, DEFAULT_ENUM_CAP};
pub use rank::{dependent_dimension, rank_check_lossless, rank_check_secrecy, rank_mutual_information_bits};

use crate::field::{Field, Symbol, SymbolSeq};
use crate::regions::Rational;
use crate::schemes::{LinearEncoderMatrix, SchemeInstance, ShareBundle};
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifierError {
    #[error("{} microstates exceed the enumeration cap {cap}; use the rank oracle", states.map(|s| s.to_string()).unwrap_or_else(|| "too many".into()))]
    TooLargeUseRankOracle { states: Option<u64>, cap: u64 },
    #[error(transparent)]
    Scheme(#[from] crate::schemes::SchemeError),
}

/// Anything that maps a flat input vector to `L` outputs. Inputs are laid
/// out as source symbols (level 1 first) followed by key symbols.
pub trait Encoder: Sync {
    fn field(&self) -> Field;
    fn input_len(&self) -> usize;
    /// Input positions of `X_a` at index `a - 1`.
    fn source_ranges(&self) -> Vec<Range<usize>>;
    fn encode(&self, z: &[Symbol]) -> Vec<SymbolSeq>;
}

fn ranges_of(lengths: &[usize]) -> Vec<Range<usize>> {
    let mut off = 0;
    lengths
        .iter()
        .map(|&n| {
            off += n;
            off - n..off
        })
        .collect()
}

impl Encoder for SchemeInstance {
    fn field(&self) -> Field {
        self.profile.field
    }

    fn input_len(&self) -> usize {
        SchemeInstance::input_len(self)
    }

    fn source_ranges(&self) -> Vec<Range<usize>> {
        ranges_of(&self.profile.lengths)
    }

    fn encode(&self, z: &[Symbol]) -> Vec<SymbolSeq> {
        self.encode_flat(z).expect("enumerated inputs are well formed")
    }
}

impl Encoder for LinearEncoderMatrix {
    fn field(&self) -> Field {
        self.field
    }

    fn input_len(&self) -> usize {
        self.input_len
    }

    fn source_ranges(&self) -> Vec<Range<usize>> {
        ranges_of(&self.selectors.iter().map(|s| s.rows()).collect::<Vec<_>>())
    }

    fn encode(&self, z: &[Symbol]) -> Vec<SymbolSeq> {
        self.apply(z)
    }
}

/// An encoder given by a closure, for ad hoc constructions.
pub struct FnEncoder<F> {
    pub field: Field,
    pub source_lengths: Vec<usize>,
    pub key_len: usize,
    pub f: F,
}

impl<F> Encoder for FnEncoder<F>
where
    F: Fn(&[Symbol]) -> Vec<SymbolSeq> + Sync,
{
    fn field(&self) -> Field {
        self.field
    }

    fn input_len(&self) -> usize {
        self.source_lengths.iter().sum::<usize>() + self.key_len
    }

    fn source_ranges(&self) -> Vec<Range<usize>> {
        ranges_of(&self.source_lengths)
    }

    fn encode(&self, z: &[Symbol]) -> Vec<SymbolSeq> {
        (self.f)(z)
    }
}

/// Whether `W_set` determines `X_1..X_alpha`, by enumerating every input.
/// `set` is 0-based, `alpha` 1-based.
pub fn exhaustive_check_lossless(enc: &dyn Encoder, set: &[usize], alpha: usize) -> Result<bool, VerifierError> {
    Ok(Enumeration::new(enc, enum_cap())?.lossless(set, alpha))
}

/// Whether `X_alpha` and `W_set` are exactly independent under uniform
/// inputs, with the mutual information in bits as telemetry.
pub fn exhaustive_check_secrecy(enc: &dyn Encoder, set: &[usize], alpha: usize) -> Result<(bool, f64), VerifierError> {
    let counts = Enumeration::new(enc, enum_cap())?.joint_counts(set, alpha);
    Ok((counts.independent(), counts.mutual_information_bits()))
}

/// Shannon entropy in bits of an unnormalized histogram.
pub fn entropy_bits(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Per-encoder symbol counts of a bundle.
pub fn measured_rates(bundle: &ShareBundle) -> Vec<Rational> {
    bundle
        .symbol_counts()
        .into_iter()
        .map(|n| Rational::from_integer(n as i64))
        .collect()
}
