//! Arbitrary octet files through a scheme. Each source is mapped to symbols,
//! zero-padded to a whole number of blocks of its profile length and encoded
//! block by block, every block with its own slice of the key stream.

use super::octets::{octets_to_symbols, symbols_to_octets};
use super::share::ShareFile;
use super::{InstanceConfig, IoError, Result};
use crate::field::{Field, Symbol, SymbolSeq};
use crate::schemes::{plan_matrix, KeyMaterial, SchemeError, SchemeInstance, SchemeKind, SourceProfile};

/// Source `X_level` recovered from a set of share files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedSource {
    pub level: usize,
    pub octets: Vec<u8>,
}

/// Encodes one octet stream per level (empty for levels of length 0) into
/// `L` share files.
pub fn encode_files(cfg: &InstanceConfig, sources: &[Vec<u8>], seed: u64) -> Result<Vec<ShareFile>> {
    let field = cfg.file_field()?;
    let inst = cfg.instance_over(field)?;
    let p = &inst.profile;
    if sources.len() != p.encoders {
        return Err(IoError::Config(format!(
            "expected {} sources, got {}",
            p.encoders,
            sources.len()
        )));
    }
    let mut symbols = Vec::with_capacity(p.encoders);
    let mut blocks = 1;
    for (a, (src, &n)) in sources.iter().zip(&p.lengths).enumerate() {
        if n == 0 && !src.is_empty() {
            return Err(IoError::Config(format!("X_{} has length 0 in the profile", a + 1)));
        }
        let sym = octets_to_symbols(src, &field)?;
        if n > 0 {
            blocks = blocks.max(sym.len().div_ceil(n));
        }
        symbols.push(sym);
    }
    let padding: Vec<usize> = symbols
        .iter_mut()
        .zip(&p.lengths)
        .map(|(sym, &n)| {
            let pad = blocks * n - sym.len();
            sym.resize(blocks * n, 0);
            pad
        })
        .collect();

    let key_len = inst.key_len();
    let key = KeyMaterial::generate(key_len * blocks, &field, seed);
    let bundles = (0..blocks)
        .map(|b| {
            let block: Vec<SymbolSeq> = symbols
                .iter()
                .zip(&p.lengths)
                .map(|(sym, &n)| sym[b * n..(b + 1) * n].to_vec())
                .collect();
            let k = KeyMaterial::from_symbols(key.symbols[b * key_len..(b + 1) * key_len].to_vec());
            inst.encode(&block, &k)
        })
        .collect::<Result<Vec<_>, SchemeError>>()?;
    (0..p.encoders)
        .map(|l| ShareFile::from_blocks(&bundles, l, &padding))
        .collect()
}

fn instance_of(share: &ShareFile) -> Result<SchemeInstance> {
    let field = share.field()?;
    let lengths = share.lengths.iter().map(|&n| n as usize).collect();
    let profile = SourceProfile::new(share.encoders as usize, share.s as usize, field, lengths, share.mode)?;
    Ok(SchemeInstance::new(share.scheme.parse()?, profile)?)
}

fn same_instance(a: &ShareFile, b: &ShareFile) -> bool {
    (
        a.q, a.encoders, a.s, a.mode, a.blocks, &a.scheme, &a.lengths, &a.padding,
    ) == (
        b.q, b.encoders, b.s, b.mode, b.blocks, &b.scheme, &b.lengths, &b.padding,
    )
}

/// Recovers every source the given shares determine: with `a` distinct
/// shares, each nonempty `X_level` with `level <= a` that the profile
/// requires at `a` shares.
pub fn decode_files(shares: &[ShareFile]) -> Result<Vec<DecodedSource>> {
    let first = shares
        .first()
        .ok_or(SchemeError::InsufficientShares { needed: 1, got: 0 })?;
    if let Some(odd) = shares.iter().find(|s| !same_instance(s, first)) {
        return Err(IoError::FormatError(format!(
            "share {} belongs to a different instance",
            odd.index
        )));
    }
    let inst = instance_of(first)?;
    let field: Field = *inst.field();
    let blocks = first.blocks as usize;
    let payloads = shares.iter().map(|s| s.block_payloads()).collect::<Result<Vec<_>>>()?;
    let mat = match inst.kind {
        SchemeKind::Corner(_) => Some(plan_matrix(&inst)?),
        _ => None,
    };

    let mut out: Vec<SymbolSeq> = Vec::new();
    for b in 0..blocks {
        let view: Vec<(usize, &[Symbol])> = shares
            .iter()
            .zip(&payloads)
            .map(|(s, p)| (s.index as usize - 1, p[b].as_slice()))
            .collect();
        // the instance decoder validates the share set once; corners reuse
        // one linear plan for the remaining blocks
        let x = match (&mat, b) {
            (Some(m), b) if b > 0 => {
                let mut view = view;
                view.sort_by_key(|v| v.0);
                view.dedup_by_key(|v| v.0);
                m.decode(&view)?
            }
            _ => inst.decode(&view)?,
        };
        if out.is_empty() {
            out = vec![SymbolSeq::new(); x.len()];
        }
        for (acc, part) in out.iter_mut().zip(x) {
            acc.extend(part);
        }
    }

    let mut decoded = Vec::new();
    for (a, sym) in out.into_iter().enumerate() {
        let n = first.lengths[a] as usize;
        if n == 0 || sym.len() != n * blocks {
            continue;
        }
        let keep = sym.len() - first.padding[a] as usize;
        decoded.push(DecodedSource {
            level: a + 1,
            octets: symbols_to_octets(&sym[..keep], &field)?,
        });
    }
    Ok(decoded)
}
