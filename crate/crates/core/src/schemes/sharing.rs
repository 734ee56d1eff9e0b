use super::{round_up, split_lengths, Result, SchemeError, Segment, SourceProfile};
use crate::field::{Field, MdsCodebook, Symbol, SymbolSeq};

pub(crate) fn ramp_key_len(c: usize, k: usize, len: usize) -> usize {
    c * len / (k - c)
}

pub(crate) fn check_single_level(p: &SourceProfile, c: usize, k: usize) -> Result<()> {
    if p.lengths.iter().enumerate().any(|(a, &n)| a + 1 != k && n != 0) {
        return Err(SchemeError::ProfileError(format!("a ramp instance carries only X_{k}")));
    }
    let len = p.lengths[k - 1];
    if !len.is_multiple_of(k - c) {
        let mut minimal = p.lengths.clone();
        minimal[k - 1] = round_up(len, k - c);
        return Err(SchemeError::PaddingRequired { minimal });
    }
    Ok(())
}

/// `(c, k, L)` ramp sharing: each stripe of `k - c` secret symbols gets `c`
/// key symbols appended (`key[t*c..(t+1)*c]` for stripe `t`) and is encoded
/// with the `(L, k)` Vandermonde code. Returns the `L` shares.
pub fn ramp_share(
    x: &[Symbol],
    c: usize,
    k: usize,
    encoders: usize,
    field: &Field,
    key: &[Symbol],
) -> Result<Vec<SymbolSeq>> {
    if k == 0 || k > encoders || c >= k {
        return Err(SchemeError::BadThreshold(format!(
            "need 0 <= c < k <= L, got c = {c}, k = {k}, L = {encoders}"
        )));
    }
    let width = k - c;
    if !x.len().is_multiple_of(width) {
        return Err(SchemeError::PaddingRequired {
            minimal: vec![round_up(x.len(), width)],
        });
    }
    let stripes = x.len() / width;
    if key.len() != c * stripes {
        return Err(SchemeError::KeyLength {
            expected: c * stripes,
            got: key.len(),
        });
    }
    let message: Vec<SymbolSeq> = (0..k)
        .map(|r| {
            (0..stripes)
                .map(|t| {
                    if r < width {
                        x[t * width + r]
                    } else {
                        key[t * c + r - width]
                    }
                })
                .collect()
        })
        .collect();
    Ok(MdsCodebook::standard(k, encoders, *field)?.encode(&message)?)
}

/// `(k, L)` threshold sharing, the ramp scheme with `c = k - 1`.
pub fn threshold_share(
    x: &[Symbol],
    k: usize,
    encoders: usize,
    field: &Field,
    key: &[Symbol],
) -> Result<Vec<SymbolSeq>> {
    if k == 0 || k > encoders {
        return Err(SchemeError::BadThreshold(format!(
            "need 1 <= k <= L, got k = {k}, L = {encoders}"
        )));
    }
    ramp_share(x, k - 1, k, encoders, field, key)
}

/// Inverts [`ramp_share`] from at least `k` shares (0-based indices).
pub fn ramp_decode(
    shares: &[(usize, &[Symbol])],
    c: usize,
    k: usize,
    encoders: usize,
    field: &Field,
) -> Result<SymbolSeq> {
    let message = MdsCodebook::standard(k, encoders, *field)?.decode(shares)?;
    let stripes = message[0].len();
    Ok((0..stripes)
        .flat_map(|t| message[..k - c].iter().map(move |row| row[t]))
        .collect())
}

pub(crate) fn ramp_segments(
    x: &[Symbol],
    c: usize,
    k: usize,
    encoders: usize,
    field: &Field,
    key: &[Symbol],
    tag: &str,
) -> Result<Vec<Vec<Segment>>> {
    Ok(ramp_share(x, c, k, encoders, field, key)?
        .into_iter()
        .map(|y| vec![Segment::new(k, format!("{tag}{k}"), y)])
        .collect())
}

pub(crate) fn single_level_decode(
    p: &SourceProfile,
    c: usize,
    k: usize,
    shares: &[(usize, &[Symbol])],
) -> Result<Vec<SymbolSeq>> {
    let mut out = vec![SymbolSeq::new(); shares.len()];
    if shares.len() >= k {
        out[k - 1] = ramp_decode(shares, c, k, p.encoders, &p.field)?;
    }
    Ok(out)
}

pub(crate) fn sup1_key_len(p: &SourceProfile) -> usize {
    p.lengths.iter().enumerate().map(|(a, &n)| a * n).sum()
}

/// Threshold sharing of every `X_a` with threshold `a`, concatenated.
pub(crate) fn sup1_encode(p: &SourceProfile, sources: &[SymbolSeq], key: &[Symbol]) -> Result<Vec<Vec<Segment>>> {
    let mut shares = vec![Vec::new(); p.encoders];
    let mut off = 0;
    for (a, x) in sources.iter().enumerate() {
        let k = a + 1;
        let kl = a * x.len();
        let ys = threshold_share(x, k, p.encoders, &p.field, &key[off..off + kl])?;
        off += kl;
        for (w, y) in shares.iter_mut().zip(ys) {
            w.push(Segment::new(k, format!("T{k}"), y));
        }
    }
    Ok(shares)
}

pub(crate) fn sup1_decode(p: &SourceProfile, shares: &[(usize, &[Symbol])]) -> Result<Vec<SymbolSeq>> {
    let got = shares.len();
    let parts: Vec<(usize, Vec<&[Symbol]>)> = shares.iter().map(|&(l, w)| (l, split_lengths(w, &p.lengths))).collect();
    (0..got)
        .map(|a| {
            let level: Vec<(usize, &[Symbol])> = parts.iter().map(|(l, segs)| (*l, segs[a])).collect();
            ramp_decode(&level, a, a + 1, p.encoders, &p.field)
        })
        .collect()
}
