//! Encoders and decoders for every construction: threshold and ramp
//! sharing, the `(L, 1)` superposition scheme, the layered multilevel secret
//! sharing schemes (general, chained, hybrid), the eight `(3, 2)` corner
//! schemes and the sliding pseudo-superposition scheme.
//!
//! Every scheme here is linear over GF(q) in (sources, key), which is what
//! [`plan_matrix`] relies on.

mod corner;
mod layered;
mod matrix;
mod sharing;

pub use corner::{Corner, CornerScheme};
pub use layered::{hybrid_level_rate, MssVariant};
pub use matrix::{plan_matrix, LinearEncoderMatrix};
pub use sharing::{ramp_decode, ramp_share, threshold_share};

use crate::field::{Field, FieldError, Symbol, SymbolSeq};
use crate::regions::{Mode, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("bad threshold: {0}")]
    BadThreshold(String),
    #[error("source lengths do not conform; minimal conforming lengths are {minimal:?}")]
    PaddingRequired { minimal: Vec<usize> },
    #[error("wrong scheme: {0}")]
    WrongScheme(String),
    #[error(
        "key deficit at level {level}: previous level supplies {available} key symbols per encoder, {needed} needed"
    )]
    KeyDeficit {
        level: usize,
        available: usize,
        needed: usize,
    },
    #[error("corner {corner} unavailable: {reason}")]
    CornerUnavailable { corner: Corner, reason: String },
    #[error("insufficient shares: need {needed}, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("shares do not determine X_{level}")]
    Undecodable { level: usize },
    #[error("invalid profile: {0}")]
    ProfileError(String),
    #[error("key has {got} symbols, scheme needs {expected}")]
    KeyLength { expected: usize, got: usize },
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("encoder is not linear: {0}")]
    NonLinear(String),
}

pub type Result<T> = std::result::Result<T, SchemeError>;

/// Parameters of one coding instance. `lengths[a - 1]` is the number of
/// symbols of source `X_a`; one block of these lengths is encoded at a time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProfile {
    pub encoders: usize,
    pub s: usize,
    pub field: Field,
    pub lengths: Vec<usize>,
    pub mode: Mode,
}

impl SourceProfile {
    pub fn new(encoders: usize, s: usize, field: Field, lengths: Vec<usize>, mode: Mode) -> Result<Self> {
        let p = SourceProfile {
            encoders,
            s,
            field,
            lengths,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    /// A multilevel secret sharing profile over the default field for `L`.
    pub fn mss(encoders: usize, s: usize, lengths: Vec<usize>) -> Result<Self> {
        Self::new(encoders, s, Field::for_encoders(encoders)?, lengths, Mode::Mss)
    }

    pub fn sliding(encoders: usize, s: usize, lengths: Vec<usize>) -> Result<Self> {
        Self::new(encoders, s, Field::for_encoders(encoders)?, lengths, Mode::Sliding)
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.encoders;
        if l == 0 {
            return Err(SchemeError::ProfileError("need at least one encoder".into()));
        }
        if self.s == 0 || self.s > l {
            return Err(SchemeError::ProfileError(format!(
                "need 1 <= s <= L, got s = {}, L = {l}",
                self.s
            )));
        }
        if self.lengths.len() != l {
            return Err(SchemeError::ProfileError(format!(
                "expected {l} source lengths, got {}",
                self.lengths.len()
            )));
        }
        if self.mode == Mode::Mss && self.lengths[..self.s - 1].iter().any(|&n| n != 0) {
            return Err(SchemeError::ProfileError(
                "multilevel secret sharing needs X_1..X_{s-1} empty".into(),
            ));
        }
        Ok(())
    }

    pub fn total_source_len(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Lowest level with a reconstruction requirement.
    pub fn first_level(&self) -> usize {
        match self.mode {
            Mode::Mss => self.s,
            Mode::Sliding => 1,
        }
    }
}

/// Secret randomness, drawn up front from a seeded ChaCha20 stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub symbols: SymbolSeq,
    pub seed: Option<u64>,
}

impl KeyMaterial {
    pub fn generate(len: usize, field: &Field, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let symbols = (0..len).map(|_| rng.gen_range(0..field.order()) as Symbol).collect();
        KeyMaterial {
            symbols,
            seed: Some(seed),
        }
    }

    pub fn from_symbols(symbols: SymbolSeq) -> Self {
        KeyMaterial { symbols, seed: None }
    }

    pub fn empty() -> Self {
        Self::from_symbols(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// One tagged piece of an encoder output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// Source level the piece belongs to (0 for pure key material).
    pub level: u8,
    pub tag: String,
    pub symbols: SymbolSeq,
}

impl Segment {
    pub fn new(level: usize, tag: impl Into<String>, symbols: SymbolSeq) -> Self {
        Segment {
            level: level as u8,
            tag: tag.into(),
            symbols,
        }
    }
}

/// Outputs `W_1..W_L` of one encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareBundle {
    pub scheme: SchemeKind,
    pub profile: SourceProfile,
    pub shares: Vec<Vec<Segment>>,
}

impl ShareBundle {
    /// `W_l` as one symbol sequence (0-based `l`).
    pub fn flat(&self, l: usize) -> SymbolSeq {
        self.shares[l].iter().flat_map(|s| s.symbols.iter().copied()).collect()
    }

    pub fn flat_all(&self) -> Vec<SymbolSeq> {
        (0..self.shares.len()).map(|l| self.flat(l)).collect()
    }

    /// Per-encoder symbol counts.
    pub fn symbol_counts(&self) -> Vec<usize> {
        self.shares
            .iter()
            .map(|w| w.iter().map(|s| s.symbols.len()).sum())
            .collect()
    }
}

/// Which construction an instance uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// `(k, L)` threshold sharing of the single source `X_k`.
    Threshold {
        k: usize,
    },
    /// `(c, k, L)` ramp sharing of the single source `X_k`.
    Ramp {
        c: usize,
        k: usize,
    },
    /// Independent threshold sharing of every source (the `(L, 1)` problem).
    Sup1,
    Mss(MssVariant),
    Corner(CornerScheme),
    /// MDS striping of `X_1..X_{s-1}` next to a multilevel scheme for the rest.
    PseudoSup(MssVariant),
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Threshold { k } => write!(f, "threshold:{k}"),
            SchemeKind::Ramp { c, k } => write!(f, "ramp:{c}:{k}"),
            SchemeKind::Sup1 => f.write_str("sup1"),
            SchemeKind::Mss(v) => write!(f, "{v}"),
            SchemeKind::Corner(c) => write!(f, "corner:{c}"),
            SchemeKind::PseudoSup(v) => write!(f, "pseudo-sup:{v}"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || SchemeError::WrongScheme(format!("unknown scheme id {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
        Ok(match parts.as_slice() {
            ["sup1"] => SchemeKind::Sup1,
            ["threshold", k] => SchemeKind::Threshold { k: num(k)? },
            ["ramp", c, k] => SchemeKind::Ramp { c: num(c)?, k: num(k)? },
            ["corner", rest @ ..] => SchemeKind::Corner(rest.join(":").parse()?),
            ["pseudo-sup", v] => SchemeKind::PseudoSup(v.parse()?),
            [v] => SchemeKind::Mss(v.parse()?),
            _ => return Err(bad()),
        })
    }
}

/// A fully parameterized scheme: profile plus construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeInstance {
    pub kind: SchemeKind,
    pub profile: SourceProfile,
}

impl SchemeInstance {
    /// Validates the pairing of profile and construction, including every
    /// length precondition, so that `encode` only fails on bad inputs.
    pub fn new(kind: SchemeKind, profile: SourceProfile) -> Result<Self> {
        profile.validate()?;
        let inst = SchemeInstance { kind, profile };
        inst.check()?;
        Ok(inst)
    }

    /// `(k, L)` threshold sharing of `len` symbols.
    pub fn threshold(k: usize, encoders: usize, len: usize, field: Field) -> Result<Self> {
        Self::ramp(k.saturating_sub(1), k, encoders, len, field).map(|i| SchemeInstance {
            kind: SchemeKind::Threshold { k },
            ..i
        })
    }

    /// `(c, k, L)` ramp sharing of `len` symbols.
    pub fn ramp(c: usize, k: usize, encoders: usize, len: usize, field: Field) -> Result<Self> {
        if k == 0 || k > encoders || c >= k {
            return Err(SchemeError::BadThreshold(format!(
                "need 0 <= c < k <= L, got c = {c}, k = {k}, L = {encoders}"
            )));
        }
        let mut lengths = vec![0; encoders];
        lengths[k - 1] = len;
        let profile = SourceProfile::new(encoders, k - c, field, lengths, Mode::Mss)?;
        Self::new(SchemeKind::Ramp { c, k }, profile)
    }

    pub fn encoders(&self) -> usize {
        self.profile.encoders
    }

    pub fn field(&self) -> &Field {
        &self.profile.field
    }

    fn check(&self) -> Result<()> {
        let p = &self.profile;
        let mds_based = !matches!(self.kind, SchemeKind::Corner(_));
        if mds_based && p.encoders as u32 >= p.field.order() {
            return Err(SchemeError::ProfileError(format!(
                "GF({}) has fewer than {} nonzero evaluation points",
                p.field.order(),
                p.encoders
            )));
        }
        match self.kind {
            SchemeKind::Threshold { k } => {
                if k == 0 || k > p.encoders || p.s != 1 {
                    return Err(SchemeError::BadThreshold(format!("k = {k}, L = {}", p.encoders)));
                }
                sharing::check_single_level(p, k - 1, k)
            }
            SchemeKind::Ramp { c, k } => {
                if k == 0 || k > p.encoders || c >= k || p.s != k - c {
                    return Err(SchemeError::BadThreshold(format!(
                        "c = {c}, k = {k}, L = {}, s = {}",
                        p.encoders, p.s
                    )));
                }
                sharing::check_single_level(p, c, k)
            }
            SchemeKind::Sup1 => {
                if p.s != 1 {
                    return Err(SchemeError::WrongScheme(
                        "superposition sharing is the s = 1 scheme".into(),
                    ));
                }
                Ok(())
            }
            SchemeKind::Mss(v) => {
                if p.mode != Mode::Mss {
                    return Err(SchemeError::WrongScheme(
                        "layered multilevel schemes need a multilevel secret sharing profile".into(),
                    ));
                }
                layered::plan(v, p).map(|_| ())
            }
            SchemeKind::Corner(c) => c.check(p),
            SchemeKind::PseudoSup(v) => layered::check_pseudo_sup(v, p),
        }
    }

    /// Number of key symbols `encode` consumes.
    pub fn key_len(&self) -> usize {
        let p = &self.profile;
        match self.kind {
            SchemeKind::Threshold { k } => sharing::ramp_key_len(k - 1, k, p.lengths[k - 1]),
            SchemeKind::Ramp { c, k } => sharing::ramp_key_len(c, k, p.lengths[k - 1]),
            SchemeKind::Sup1 => sharing::sup1_key_len(p),
            SchemeKind::Mss(v) => layered::plan(v, p).map(|pl| pl.key_len()).unwrap_or(0),
            SchemeKind::Corner(c) => c.key_len(p.lengths[1], p.lengths[2]),
            SchemeKind::PseudoSup(v) => layered::pseudo_sup_key_len(v, p),
        }
    }

    /// Number of input symbols: all sources, then the key.
    pub fn input_len(&self) -> usize {
        self.profile.total_source_len() + self.key_len()
    }

    /// Declared per-encoder output lengths in symbols.
    pub fn declared_rates(&self) -> Vec<usize> {
        let p = &self.profile;
        match self.kind {
            SchemeKind::Threshold { k } => vec![p.lengths[k - 1]; p.encoders],
            SchemeKind::Ramp { c, k } => vec![p.lengths[k - 1] / (k - c); p.encoders],
            SchemeKind::Sup1 => vec![p.total_source_len(); p.encoders],
            SchemeKind::Mss(v) => {
                let r = layered::plan(v, p).map(|pl| pl.rate()).unwrap_or(0);
                vec![r; p.encoders]
            }
            SchemeKind::Corner(c) => c.rates(p.lengths[1], p.lengths[2]).to_vec(),
            SchemeKind::PseudoSup(v) => vec![layered::pseudo_sup_rate(v, p); p.encoders],
        }
    }

    /// Declared rates as rationals, for region membership checks.
    pub fn declared_rate_tuple(&self) -> Vec<Rational> {
        self.declared_rates()
            .into_iter()
            .map(|r| Rational::from_integer(r as i64))
            .collect()
    }

    fn check_inputs(&self, sources: &[SymbolSeq], key: &KeyMaterial) -> Result<()> {
        let p = &self.profile;
        if sources.len() != p.encoders {
            return Err(SchemeError::ShapeError(format!(
                "expected {} sources, got {}",
                p.encoders,
                sources.len()
            )));
        }
        for (a, (x, &n)) in sources.iter().zip(&p.lengths).enumerate() {
            if x.len() != n {
                return Err(SchemeError::ShapeError(format!(
                    "source X_{} has {} symbols, profile says {n}",
                    a + 1,
                    x.len()
                )));
            }
            if let Some(&v) = x.iter().find(|&&v| !p.field.contains(v)) {
                return Err(SchemeError::ShapeError(format!(
                    "symbol {v} outside GF({})",
                    p.field.order()
                )));
            }
        }
        if key.len() != self.key_len() {
            return Err(SchemeError::KeyLength {
                expected: self.key_len(),
                got: key.len(),
            });
        }
        Ok(())
    }

    pub fn encode(&self, sources: &[SymbolSeq], key: &KeyMaterial) -> Result<ShareBundle> {
        self.check_inputs(sources, key)?;
        let p = &self.profile;
        let shares = match self.kind {
            SchemeKind::Threshold { k } => {
                sharing::ramp_segments(&sources[k - 1], k - 1, k, p.encoders, &p.field, &key.symbols, "T")?
            }
            SchemeKind::Ramp { c, k } => {
                sharing::ramp_segments(&sources[k - 1], c, k, p.encoders, &p.field, &key.symbols, "R")?
            }
            SchemeKind::Sup1 => sharing::sup1_encode(p, sources, &key.symbols)?,
            SchemeKind::Mss(v) => layered::plan(v, p)?.encode(sources, &key.symbols)?,
            SchemeKind::Corner(c) => c.encode(&sources[1], &sources[2], &key.symbols)?,
            SchemeKind::PseudoSup(v) => layered::pseudo_sup_encode(v, p, sources, &key.symbols)?,
        };
        Ok(ShareBundle {
            scheme: self.kind,
            profile: self.profile.clone(),
            shares,
        })
    }

    /// Encodes with a fresh key drawn from `seed`.
    pub fn encode_seeded(&self, sources: &[SymbolSeq], seed: u64) -> Result<ShareBundle> {
        let key = KeyMaterial::generate(self.key_len(), self.field(), seed);
        self.encode(sources, &key)
    }

    /// Reconstructs `X_1..X_a` from `a` distinct shares, given as
    /// `(0-based encoder index, W_l)`. Entries for levels without a
    /// reconstruction requirement at `a` shares are empty.
    pub fn decode(&self, shares: &[(usize, &[Symbol])]) -> Result<Vec<SymbolSeq>> {
        let shares = distinct_shares(shares, self.profile.encoders)?;
        let got = shares.len();
        let first = self.profile.first_level();
        let needed = match self.kind {
            SchemeKind::Threshold { .. } | SchemeKind::Ramp { .. } => self.profile.s,
            _ => first,
        };
        if got < needed {
            return Err(SchemeError::InsufficientShares { needed, got });
        }
        let rates = self.declared_rates();
        for &(l, w) in &shares {
            if w.len() != rates[l] {
                return Err(SchemeError::ShapeError(format!(
                    "share {} has {} symbols, expected {}",
                    l + 1,
                    w.len(),
                    rates[l]
                )));
            }
        }
        let p = &self.profile;
        match self.kind {
            SchemeKind::Threshold { k } => sharing::single_level_decode(p, k - 1, k, &shares),
            SchemeKind::Ramp { c, k } => sharing::single_level_decode(p, c, k, &shares),
            SchemeKind::Sup1 => sharing::sup1_decode(p, &shares),
            SchemeKind::Mss(v) => layered::plan(v, p)?.decode(&shares),
            SchemeKind::PseudoSup(v) => layered::pseudo_sup_decode(v, p, &shares),
            SchemeKind::Corner(_) => plan_matrix(self)?.decode(&shares),
        }
    }

    /// Decodes the shares of a bundle held by the 0-based encoders in `set`.
    pub fn decode_bundle(&self, bundle: &ShareBundle, set: &[usize]) -> Result<Vec<SymbolSeq>> {
        let flats: Vec<(usize, SymbolSeq)> = set.iter().map(|&l| (l, bundle.flat(l))).collect();
        let refs: Vec<(usize, &[Symbol])> = flats.iter().map(|(l, w)| (*l, w.as_slice())).collect();
        self.decode(&refs)
    }

    /// Splits a flat input vector (sources then key) into its parts.
    pub fn split_input(&self, z: &[Symbol]) -> (Vec<SymbolSeq>, KeyMaterial) {
        let mut off = 0;
        let sources = self
            .profile
            .lengths
            .iter()
            .map(|&n| {
                let x = z[off..off + n].to_vec();
                off += n;
                x
            })
            .collect();
        (sources, KeyMaterial::from_symbols(z[off..].to_vec()))
    }

    /// Flat encoder outputs for a flat input vector.
    pub fn encode_flat(&self, z: &[Symbol]) -> Result<Vec<SymbolSeq>> {
        let (sources, key) = self.split_input(z);
        Ok(self.encode(&sources, &key)?.flat_all())
    }
}

/// Sorts by index and drops exact duplicates; conflicting duplicates are corrupt.
fn distinct_shares<'a>(shares: &[(usize, &'a [Symbol])], encoders: usize) -> Result<Vec<(usize, &'a [Symbol])>> {
    let mut out: Vec<(usize, &[Symbol])> = Vec::new();
    for &(l, w) in shares {
        if l >= encoders {
            return Err(SchemeError::ShapeError(format!("encoder index {} out of range", l + 1)));
        }
        match out.iter().find(|(k, _)| *k == l) {
            Some((_, prev)) if *prev != w => return Err(FieldError::CorruptShare.into()),
            Some(_) => {}
            None => out.push((l, w)),
        }
    }
    out.sort_by_key(|(l, _)| *l);
    Ok(out)
}

/// Cuts consecutive pieces of the given lengths off the front of `w`.
pub(crate) fn split_lengths<'a>(mut w: &'a [Symbol], lens: &[usize]) -> Vec<&'a [Symbol]> {
    lens.iter()
        .map(|&n| {
            let (head, rest) = w.split_at(n);
            w = rest;
            head
        })
        .collect()
}

/// Smallest multiple of `m` that is `>= n`.
pub(crate) fn round_up(n: usize, m: usize) -> usize {
    n.div_ceil(m) * m
}
