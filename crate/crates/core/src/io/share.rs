//! Binary share files. All integers little-endian:
//!
//! ```text
//! "SMDC" | version u8 | q u16 | L u8 | s u8 | encoder u8 (1-based) | mode u8
//! blocks u32 | scheme id: len u8, ASCII
//! per level: encoded length u32, padding u32
//! layers: count u16, then per layer: alpha u8, tag len u8, tag, symbols u32
//! payload: symbols as u16
//! ```
//!
//! Long sources are cut into `blocks` independently keyed blocks of the
//! profile lengths. The payload is layer-major: layer `j` holds the `j`-th
//! segment of every block in block order, and its count covers all blocks.

use super::{IoError, Result};
use crate::field::{Field, Symbol, SymbolSeq};
use crate::regions::Mode;
use crate::schemes::{Segment, ShareBundle};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"SMDC";
pub const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub level: u8,
    pub tag: String,
    pub count: u32,
}

/// One encoder's output plus everything needed to decode it alongside its
/// siblings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareFile {
    pub q: u16,
    pub encoders: u8,
    pub s: u8,
    /// 1-based encoder index.
    pub index: u8,
    pub mode: Mode,
    pub blocks: u32,
    pub scheme: String,
    /// Per-level source lengths of one block, in symbols.
    pub lengths: Vec<u32>,
    /// Per-level zero padding appended to each whole source, in symbols.
    pub padding: Vec<u32>,
    pub layers: Vec<Layer>,
    pub payload: SymbolSeq,
}

fn narrow<T: TryFrom<usize>>(v: usize, what: &str) -> Result<T> {
    T::try_from(v).map_err(|_| IoError::FormatError(format!("{what} {v} does not fit the header")))
}

impl ShareFile {
    /// Share of 0-based encoder `l` of a single bundle.
    pub fn from_bundle(bundle: &ShareBundle, l: usize) -> Result<Self> {
        Self::from_blocks(std::slice::from_ref(bundle), l, &vec![0; bundle.profile.encoders])
    }

    /// Share of 0-based encoder `l` over consecutive blocks encoded with the
    /// same instance.
    pub fn from_blocks(bundles: &[ShareBundle], l: usize, padding: &[usize]) -> Result<Self> {
        let first = bundles
            .first()
            .ok_or_else(|| IoError::FormatError("no blocks".into()))?;
        let p = &first.profile;
        let segs = first
            .shares
            .get(l)
            .ok_or_else(|| IoError::FormatError(format!("no encoder {}", l + 1)))?;
        let mut payload = SymbolSeq::new();
        let mut layers = Vec::with_capacity(segs.len());
        for (j, g) in segs.iter().enumerate() {
            let mut count = 0;
            for b in bundles {
                let seg = &b.shares[l][j];
                if seg.level != g.level || seg.symbols.len() != g.symbols.len() {
                    return Err(IoError::FormatError("blocks differ in shape".into()));
                }
                payload.extend_from_slice(&seg.symbols);
                count += seg.symbols.len();
            }
            layers.push(Layer {
                level: g.level,
                tag: g.tag.clone(),
                count: narrow(count, "layer size")?,
            });
        }
        Ok(ShareFile {
            q: narrow(p.field.order() as usize, "field order")?,
            encoders: narrow(p.encoders, "encoder count")?,
            s: narrow(p.s, "s")?,
            index: narrow(l + 1, "encoder index")?,
            mode: p.mode,
            blocks: narrow(bundles.len(), "block count")?,
            scheme: first.scheme.to_string(),
            lengths: p
                .lengths
                .iter()
                .map(|&n| narrow(n, "source length"))
                .collect::<Result<_>>()?,
            padding: padding.iter().map(|&n| narrow(n, "padding")).collect::<Result<_>>()?,
            layers,
            payload,
        })
    }

    pub fn field(&self) -> Result<Field> {
        Field::new(self.q as u32).map_err(|e| IoError::FormatError(e.to_string()))
    }

    /// Flat encoder output of each block.
    pub fn block_payloads(&self) -> Result<Vec<SymbolSeq>> {
        let b = self.blocks.max(1) as usize;
        let mut out = vec![SymbolSeq::new(); b];
        let mut off = 0;
        for ly in &self.layers {
            let n = ly.count as usize;
            if !n.is_multiple_of(b) {
                return Err(IoError::FormatError(format!("layer of {n} symbols over {b} blocks")));
            }
            if n > 0 {
                for (i, chunk) in self.payload[off..off + n].chunks(n / b).enumerate() {
                    out[i].extend_from_slice(chunk);
                }
            }
            off += n;
        }
        Ok(out)
    }

    /// Payload split back into tagged segments, all blocks per layer.
    pub fn segments(&self) -> Vec<Segment> {
        let mut off = 0;
        self.layers
            .iter()
            .map(|ly| {
                let n = ly.count as usize;
                off += n;
                Segment {
                    level: ly.level,
                    tag: ly.tag.clone(),
                    symbols: self.payload[off - n..off].to_vec(),
                }
            })
            .collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(64 + 2 * self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.q.to_le_bytes());
        out.push(self.encoders);
        out.push(self.s);
        out.push(self.index);
        out.push(match self.mode {
            Mode::Mss => 0,
            Mode::Sliding => 1,
        });
        out.extend_from_slice(&self.blocks.to_le_bytes());
        put_str(&mut out, &self.scheme, "scheme id")?;
        if self.lengths.len() != self.encoders as usize || self.padding.len() != self.encoders as usize {
            return Err(IoError::FormatError("per-level tables do not match L".into()));
        }
        for (n, pad) in self.lengths.iter().zip(&self.padding) {
            out.extend_from_slice(&n.to_le_bytes());
            out.extend_from_slice(&pad.to_le_bytes());
        }
        out.extend_from_slice(&narrow::<u16>(self.layers.len(), "layer count")?.to_le_bytes());
        let mut total = 0usize;
        for ly in &self.layers {
            out.push(ly.level);
            put_str(&mut out, &ly.tag, "layer tag")?;
            out.extend_from_slice(&ly.count.to_le_bytes());
            total += ly.count as usize;
        }
        if total != self.payload.len() {
            return Err(IoError::FormatError(format!(
                "layer directory sums to {total} symbols, payload has {}",
                self.payload.len()
            )));
        }
        for v in &self.payload {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(IoError::FormatError("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(IoError::FormatError(format!("unsupported version {version}")));
        }
        let q = r.u16()?;
        let encoders = r.u8()?;
        let s = r.u8()?;
        let index = r.u8()?;
        let mode = match r.u8()? {
            0 => Mode::Mss,
            1 => Mode::Sliding,
            m => return Err(IoError::FormatError(format!("unknown mode byte {m}"))),
        };
        let blocks = r.u32()?;
        if blocks == 0 {
            return Err(IoError::FormatError("zero blocks".into()));
        }
        let scheme = r.string()?;
        let mut lengths = Vec::with_capacity(encoders as usize);
        let mut padding = Vec::with_capacity(encoders as usize);
        for _ in 0..encoders {
            lengths.push(r.u32()?);
            padding.push(r.u32()?);
        }
        let nlayers = r.u16()?;
        let mut layers = Vec::with_capacity(nlayers as usize);
        for _ in 0..nlayers {
            let level = r.u8()?;
            let tag = r.string()?;
            let count = r.u32()?;
            layers.push(Layer { level, tag, count });
        }
        let total: usize = layers.iter().map(|l| l.count as usize).sum();
        let body = r.rest();
        if body.len() != 2 * total {
            return Err(IoError::FormatError(format!(
                "payload has {} octets, directory promises {}",
                body.len(),
                2 * total
            )));
        }
        let payload: SymbolSeq = body
            .chunks_exact(2)
            .map(|c| Symbol::from_le_bytes([c[0], c[1]]))
            .collect();
        if let Some(v) = payload.iter().find(|&&v| v as u32 >= q as u32) {
            return Err(IoError::FormatError(format!("symbol {v} outside GF({q})")));
        }
        if index == 0 || index > encoders {
            return Err(IoError::FormatError(format!(
                "encoder index {index} outside 1..={encoders}"
            )));
        }
        Ok(ShareFile {
            q,
            encoders,
            s,
            index,
            mode,
            blocks,
            scheme,
            lengths,
            padding,
            layers,
            payload,
        })
    }
}

fn put_str(out: &mut Vec<u8>, s: &str, what: &str) -> Result<()> {
    out.push(narrow(s.len(), what)?);
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.buf.len() {
            return Err(IoError::FormatError(format!("truncated at octet {}", self.buf.len())));
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u8()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| IoError::FormatError("non-UTF-8 string".into()))
    }

    fn rest(&mut self) -> &'a [u8] {
        let s = &self.buf[self.pos..];
        self.pos = self.buf.len();
        s
    }
}

/// Writes the share of 0-based encoder `l` to `path`.
pub fn write_share(path: &Path, l: usize, bundle: &ShareBundle) -> Result<ShareFile> {
    let share = ShareFile::from_bundle(bundle, l)?;
    std::fs::write(path, share.to_bytes()?)?;
    Ok(share)
}

pub fn read_share(path: &Path) -> Result<ShareFile> {
    ShareFile::from_bytes(&std::fs::read(path)?)
}
