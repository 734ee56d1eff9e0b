//! Key-chained multilevel schemes. Level `s` is plain `(L, s)` MDS striping
//! of `X_s`; every higher level `X_a` is MDS striped with an `(L, a)` code
//! and each encoder's stream is masked with pieces of the level `a - 1`
//! streams held by other encoders, so earlier sources act as one-time pads
//! for later ones.

use super::sharing::{ramp_decode, ramp_share, sup1_decode, sup1_encode, sup1_key_len};
use super::{round_up, split_lengths, Result, SchemeError, Segment, SourceProfile};
use crate::field::{Field, MdsCodebook, Symbol, SymbolSeq};
use crate::regions::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MssVariant {
    /// Sub-partitioned key chaining; any `L`.
    General,
    /// Whole-stream chaining from the next encoder; needs `L < 2s`.
    Chain,
    /// Chaining plus ramp sharing of whatever the previous level cannot mask.
    Hybrid,
}

impl fmt::Display for MssVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MssVariant::General => "general",
            MssVariant::Chain => "chain",
            MssVariant::Hybrid => "hybrid",
        })
    }
}

impl FromStr for MssVariant {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(MssVariant::General),
            "chain" => Ok(MssVariant::Chain),
            "hybrid" => Ok(MssVariant::Hybrid),
            _ => Err(SchemeError::WrongScheme(format!("unknown scheme id {s:?}"))),
        }
    }
}

/// Per-encoder rate of level `alpha` in the hybrid scheme, given the
/// per-encoder length of the previous level's key stream.
pub fn hybrid_level_rate(s: usize, alpha: usize, prev_stream: Rational, l_alpha: Rational) -> Rational {
    let a = Rational::from_integer(alpha as i64);
    if l_alpha <= a * prev_stream {
        l_alpha / a
    } else {
        prev_stream + (l_alpha - a * prev_stream) / Rational::from_integer(s as i64)
    }
}

#[derive(Clone, Debug)]
struct LevelPlan {
    alpha: usize,
    /// Per-encoder length of the chained MDS stream.
    m: usize,
    /// Leading symbols of `X_alpha` sent through the ramp code instead.
    ramp_src: usize,
    key_off: usize,
}

impl LevelPlan {
    fn ramp_share_len(&self, s: usize) -> usize {
        self.ramp_src / s
    }

    fn ramp_key_len(&self, s: usize) -> usize {
        (self.alpha - s) * self.ramp_src / s
    }
}

#[derive(Clone, Debug)]
pub(crate) struct LayerPlan {
    variant: MssVariant,
    encoders: usize,
    s: usize,
    field: Field,
    levels: Vec<LevelPlan>,
}

pub(crate) fn plan(v: MssVariant, p: &SourceProfile) -> Result<LayerPlan> {
    build(v, p.encoders, p.s, p.field, &p.lengths)
}

fn padding(lengths: &[usize], s: usize, minimal: Vec<usize>) -> Result<()> {
    if minimal[s - 1..] != lengths[s - 1..] {
        let mut full = lengths.to_vec();
        full[s - 1..].copy_from_slice(&minimal[s - 1..]);
        return Err(SchemeError::PaddingRequired { minimal: full });
    }
    Ok(())
}

fn build(v: MssVariant, l: usize, s: usize, field: Field, lengths: &[usize]) -> Result<LayerPlan> {
    if s == 1 && l > 1 {
        return Err(SchemeError::WrongScheme(
            "with s = 1 the first level is a repetition code and cannot serve as a key; use sup1".into(),
        ));
    }
    if v != MssVariant::General && l >= 2 * s {
        return Err(SchemeError::WrongScheme(format!(
            "the {v} scheme needs L < 2s, got L = {l}, s = {s}"
        )));
    }
    let mut levels = Vec::new();
    match v {
        MssVariant::General => {
            // walk down from L: each level must feed L(a - s) pieces to the next
            let mut minimal = lengths.to_vec();
            for a in (s..=l).rev() {
                let mut n = round_up(lengths[a - 1], a);
                if a < l {
                    let need = a * l * (a + 1 - s) * (minimal[a] / (a + 1));
                    n = n.max(need);
                }
                minimal[a - 1] = n;
            }
            padding(lengths, s, minimal)?;
            for a in s..=l {
                levels.push(LevelPlan {
                    alpha: a,
                    m: lengths[a - 1] / a,
                    ramp_src: 0,
                    key_off: 0,
                });
            }
        }
        MssVariant::Chain => {
            let minimal: Vec<usize> = (1..=l).map(|a| round_up(lengths[a - 1], a)).collect();
            padding(lengths, s, minimal)?;
            for a in s..=l {
                let m = lengths[a - 1] / a;
                if a > s {
                    let available = lengths[a - 2] / (a - 1);
                    if available < m {
                        return Err(SchemeError::KeyDeficit {
                            level: a,
                            available,
                            needed: m,
                        });
                    }
                }
                levels.push(LevelPlan {
                    alpha: a,
                    m,
                    ramp_src: 0,
                    key_off: 0,
                });
            }
        }
        MssVariant::Hybrid => {
            let mut minimal = lengths.to_vec();
            let mut key_off = 0;
            let mut prev = 0;
            for a in s..=l {
                let n = lengths[a - 1];
                let lv = if a == s || n <= a * prev {
                    minimal[a - 1] = round_up(n, a);
                    LevelPlan {
                        alpha: a,
                        m: n / a,
                        ramp_src: 0,
                        key_off,
                    }
                } else {
                    let deficit = n - a * prev;
                    minimal[a - 1] = a * prev + round_up(deficit, s);
                    LevelPlan {
                        alpha: a,
                        m: prev,
                        ramp_src: deficit,
                        key_off,
                    }
                };
                key_off += lv.ramp_key_len(s);
                prev = lv.m;
                levels.push(lv);
            }
            padding(lengths, s, minimal)?;
        }
    }
    Ok(LayerPlan {
        variant: v,
        encoders: l,
        s,
        field,
        levels,
    })
}

impl LayerPlan {
    pub(crate) fn key_len(&self) -> usize {
        self.levels.iter().map(|lv| lv.ramp_key_len(self.s)).sum()
    }

    pub(crate) fn rate(&self) -> usize {
        self.levels.iter().map(|lv| lv.m + lv.ramp_share_len(self.s)).sum()
    }

    /// Symbol counts of the segments of one encoder output, in order.
    fn segment_lengths(&self) -> Vec<usize> {
        let mut lens = Vec::new();
        for lv in &self.levels {
            lens.push(lv.m);
            if lv.ramp_src > 0 {
                lens.push(lv.ramp_share_len(self.s));
            }
        }
        lens
    }

    /// `(stream, offset)` of each mask piece added to encoder `l0` at `lv`.
    fn masks(&self, lv: &LevelPlan, l0: usize) -> Vec<(usize, usize)> {
        let l = self.encoders;
        let d = lv.alpha - self.s;
        if d == 0 {
            return Vec::new();
        }
        match self.variant {
            MssVariant::General => (1..=d).map(|i| ((l0 + i) % l, (l0 * d + i - 1) * lv.m)).collect(),
            MssVariant::Chain | MssVariant::Hybrid => vec![((l0 + 1) % l, 0)],
        }
    }

    fn apply_masks(&self, lv: &LevelPlan, l0: usize, y: &mut [Symbol], prev: &[SymbolSeq], sign: bool) {
        let f = &self.field;
        for (st, off) in self.masks(lv, l0) {
            let piece = &prev[st][off..off + lv.m];
            for (v, &k) in y.iter_mut().zip(piece) {
                *v = if sign { f.add(*v, k) } else { f.sub(*v, k) };
            }
        }
    }

    fn stripes(x: &[Symbol], alpha: usize, m: usize) -> Vec<SymbolSeq> {
        (0..alpha).map(|r| x[r * m..(r + 1) * m].to_vec()).collect()
    }

    pub(crate) fn encode(&self, sources: &[SymbolSeq], key: &[Symbol]) -> Result<Vec<Vec<Segment>>> {
        let l = self.encoders;
        let mut shares: Vec<Vec<Segment>> = vec![Vec::new(); l];
        let mut prev: Vec<SymbolSeq> = Vec::new();
        for lv in &self.levels {
            let a = lv.alpha;
            let (ramp_part, chained) = sources[a - 1].split_at(lv.ramp_src);
            let code = MdsCodebook::standard(a, l, self.field)?;
            let ys = code.encode(&Self::stripes(chained, a, lv.m))?;
            for (l0, w) in shares.iter_mut().enumerate() {
                let mut seg = ys[l0].clone();
                self.apply_masks(lv, l0, &mut seg, &prev, true);
                let tag = if a == self.s {
                    format!("Y{a}")
                } else {
                    format!("Y{a}+K")
                };
                w.push(Segment::new(a, tag, seg));
            }
            if lv.ramp_src > 0 {
                let k = &key[lv.key_off..lv.key_off + lv.ramp_key_len(self.s)];
                let rs = ramp_share(ramp_part, a - self.s, a, l, &self.field, k)?;
                for (w, r) in shares.iter_mut().zip(rs) {
                    w.push(Segment::new(a, format!("R{a}"), r));
                }
            }
            prev = ys;
        }
        Ok(shares)
    }

    /// Level-by-level decoding: MDS-decode `X_s`, regenerate all level-`s`
    /// streams, strip them off the level `s + 1` segments, and so on.
    pub(crate) fn decode(&self, shares: &[(usize, &[Symbol])]) -> Result<Vec<SymbolSeq>> {
        let got = shares.len();
        if got < self.s {
            return Err(SchemeError::InsufficientShares { needed: self.s, got });
        }
        let lens = self.segment_lengths();
        let segs: Vec<(usize, Vec<&[Symbol]>)> = shares.iter().map(|&(l, w)| (l, split_lengths(w, &lens))).collect();
        let mut out = vec![SymbolSeq::new(); got];
        let mut prev: Vec<SymbolSeq> = Vec::new();
        let mut idx = 0;
        for lv in &self.levels {
            let a = lv.alpha;
            if a > got {
                break;
            }
            let unmasked: Vec<(usize, SymbolSeq)> = segs
                .iter()
                .map(|(l0, parts)| {
                    let mut y = parts[idx].to_vec();
                    self.apply_masks(lv, *l0, &mut y, &prev, false);
                    (*l0, y)
                })
                .collect();
            let refs: Vec<(usize, &[Symbol])> = unmasked.iter().map(|(l0, y)| (*l0, y.as_slice())).collect();
            let code = MdsCodebook::standard(a, self.encoders, self.field)?;
            let stripes = code.decode(&refs)?;
            let mut x = Vec::with_capacity(lv.ramp_src + a * lv.m);
            idx += 1;
            if lv.ramp_src > 0 {
                let rs: Vec<(usize, &[Symbol])> = segs.iter().map(|(l0, parts)| (*l0, parts[idx])).collect();
                x.extend(ramp_decode(&rs, a - self.s, a, self.encoders, &self.field)?);
                idx += 1;
            }
            for s in &stripes {
                x.extend_from_slice(s);
            }
            out[a - 1] = x;
            if a < got {
                prev = code.encode(&stripes)?;
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_pseudo_sup(v: MssVariant, p: &SourceProfile) -> Result<()> {
    if p.s == 1 {
        return Ok(());
    }
    let minimal: Vec<usize> = p
        .lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| if i + 1 < p.s { round_up(n, i + 1) } else { n })
        .collect();
    let inner = plan(v, p);
    match (minimal == p.lengths, inner) {
        (true, r) => r.map(|_| ()),
        (false, Err(SchemeError::PaddingRequired { minimal: m })) => {
            let mut full = minimal;
            full[p.s - 1..].copy_from_slice(&m[p.s - 1..]);
            Err(SchemeError::PaddingRequired { minimal: full })
        }
        (false, Err(e)) => Err(e),
        (false, Ok(_)) => Err(SchemeError::PaddingRequired { minimal }),
    }
}

pub(crate) fn pseudo_sup_key_len(v: MssVariant, p: &SourceProfile) -> usize {
    if p.s == 1 {
        return sup1_key_len(p);
    }
    plan(v, p).map(|pl| pl.key_len()).unwrap_or(0)
}

pub(crate) fn pseudo_sup_rate(v: MssVariant, p: &SourceProfile) -> usize {
    if p.s == 1 {
        return p.total_source_len();
    }
    let head: usize = (1..p.s).map(|a| p.lengths[a - 1] / a).sum();
    head + plan(v, p).map(|pl| pl.rate()).unwrap_or(0)
}

/// Superposition of `(L, a)` MDS striping for each `X_a`, `a < s`, and the
/// multilevel scheme for `X_s..X_L`.
pub(crate) fn pseudo_sup_encode(
    v: MssVariant,
    p: &SourceProfile,
    sources: &[SymbolSeq],
    key: &[Symbol],
) -> Result<Vec<Vec<Segment>>> {
    if p.s == 1 {
        return sup1_encode(p, sources, key);
    }
    let mut shares: Vec<Vec<Segment>> = vec![Vec::new(); p.encoders];
    for a in 1..p.s {
        let m = p.lengths[a - 1] / a;
        let ys = MdsCodebook::standard(a, p.encoders, p.field)?.encode(&LayerPlan::stripes(&sources[a - 1], a, m))?;
        for (w, y) in shares.iter_mut().zip(ys) {
            w.push(Segment::new(a, format!("D{a}"), y));
        }
    }
    let inner = plan(v, p)?.encode(sources, key)?;
    for (w, rest) in shares.iter_mut().zip(inner) {
        w.extend(rest);
    }
    Ok(shares)
}

pub(crate) fn pseudo_sup_decode(
    v: MssVariant,
    p: &SourceProfile,
    shares: &[(usize, &[Symbol])],
) -> Result<Vec<SymbolSeq>> {
    if p.s == 1 {
        return sup1_decode(p, shares);
    }
    let got = shares.len();
    let head: Vec<usize> = (1..p.s).map(|a| p.lengths[a - 1] / a).collect();
    let head_len: usize = head.iter().sum();
    let mut out = vec![SymbolSeq::new(); got];
    for a in 1..p.s.min(got + 1) {
        let off: usize = head[..a - 1].iter().sum();
        let part: Vec<(usize, &[Symbol])> = shares.iter().map(|&(l, w)| (l, &w[off..off + head[a - 1]])).collect();
        let stripes = MdsCodebook::standard(a, p.encoders, p.field)?.decode(&part)?;
        out[a - 1] = stripes.concat();
    }
    if got >= p.s {
        let rest: Vec<(usize, &[Symbol])> = shares.iter().map(|&(l, w)| (l, &w[head_len..])).collect();
        let inner = plan(v, p)?.decode(&rest)?;
        for (a, x) in inner.into_iter().enumerate().skip(p.s - 1) {
            out[a] = x;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{KeyMaterial, SchemeInstance, SchemeKind};
    use super::*;
    use crate::regions::{min_sum_rate, Mode};
    use rand::{Rng, SeedableRng};

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    fn random_sources(p: &SourceProfile, seed: u64) -> Vec<SymbolSeq> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        p.lengths
            .iter()
            .map(|&n| (0..n).map(|_| rng.gen_range(0..p.field.order()) as Symbol).collect())
            .collect()
    }

    /// Every subset of every size decodes exactly the sources it should.
    fn roundtrip_all_subsets(inst: &SchemeInstance, seed: u64) {
        let p = &inst.profile;
        let src = random_sources(p, seed);
        let b = inst.encode_seeded(&src, seed).unwrap();
        assert_eq!(b.symbol_counts(), inst.declared_rates());
        for size in p.first_level()..=p.encoders {
            for set in subsets(p.encoders, size) {
                let x = inst.decode_bundle(&b, &set).unwrap();
                for a in p.first_level()..=size {
                    assert_eq!(x[a - 1], src[a - 1], "{} level {a} from {set:?}", inst.kind);
                }
            }
        }
    }

    fn mss(v: MssVariant, l: usize, s: usize, lengths: Vec<usize>) -> Result<SchemeInstance> {
        SchemeInstance::new(SchemeKind::Mss(v), SourceProfile::mss(l, s, lengths)?)
    }

    #[test]
    fn general_rates_and_roundtrip() {
        let inst = mss(MssVariant::General, 3, 2, vec![0, 36, 18]).unwrap();
        assert_eq!(inst.declared_rates(), vec![24; 3]);
        assert_eq!(inst.key_len(), 0);
        let sum: usize = inst.declared_rates().iter().sum();
        let h: Vec<Rational> = [0, 36, 18].iter().map(|&n| Rational::from_integer(n)).collect();
        assert_eq!(
            Rational::from_integer(sum as i64),
            min_sum_rate(2, &h, Mode::Mss).unwrap()
        );
        roundtrip_all_subsets(&inst, 1);

        for (l, s, lengths) in [
            (4, 2, vec![0, 64, 24, 4]),
            (4, 3, vec![0, 0, 48, 16]),
            (5, 3, vec![0, 0, 150, 40, 5]),
            (3, 3, vec![0, 0, 6]),
        ] {
            let inst = mss(MssVariant::General, l, s, lengths).unwrap();
            roundtrip_all_subsets(&inst, 2);
        }
    }

    #[test]
    fn general_rejects_nonconforming() {
        assert_eq!(
            mss(MssVariant::General, 4, 3, vec![0, 0, 12, 16]).unwrap_err(),
            SchemeError::PaddingRequired {
                minimal: vec![0, 0, 48, 16]
            }
        );
        assert_eq!(
            mss(MssVariant::General, 3, 2, vec![0, 3, 3]).unwrap_err(),
            SchemeError::PaddingRequired { minimal: vec![0, 6, 3] }
        );
        assert!(matches!(
            mss(MssVariant::General, 3, 1, vec![1, 2, 3]),
            Err(SchemeError::WrongScheme(_))
        ));
    }

    #[test]
    fn s_equals_l_is_plain_mds() {
        let inst = mss(MssVariant::General, 3, 3, vec![0, 0, 3]).unwrap();
        let b = inst
            .encode(&[vec![], vec![], vec![1, 2, 3]], &KeyMaterial::empty())
            .unwrap();
        let cb = MdsCodebook::standard(3, 3, *inst.field()).unwrap();
        let y = cb.encode(&[vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(b.flat_all(), y);
    }

    #[test]
    fn chain_examples() {
        let inst = mss(MssVariant::Chain, 3, 2, vec![0, 2, 3]).unwrap();
        assert_eq!(inst.declared_rates(), vec![2, 2, 2]);
        assert_eq!(inst.input_len(), 5);
        roundtrip_all_subsets(&inst, 3);
        // same-size subsets agree
        let src = vec![vec![], vec![4, 1], vec![2, 2, 3]];
        let b = inst.encode(&src, &KeyMaterial::empty()).unwrap();
        assert_eq!(
            inst.decode_bundle(&b, &[1, 2]).unwrap(),
            inst.decode_bundle(&b, &[0, 2]).unwrap()
        );
        assert!(matches!(
            inst.decode_bundle(&b, &[1]),
            Err(SchemeError::InsufficientShares { needed: 2, got: 1 })
        ));

        let inst = mss(MssVariant::Chain, 4, 3, vec![0, 0, 3, 4]).unwrap();
        roundtrip_all_subsets(&inst, 4);
        let inst = mss(MssVariant::Chain, 4, 3, vec![0, 0, 12, 16]).unwrap();
        roundtrip_all_subsets(&inst, 5);
        let inst = mss(MssVariant::Chain, 5, 3, vec![0, 0, 9, 8, 5]).unwrap();
        roundtrip_all_subsets(&inst, 6);
    }

    #[test]
    fn chain_errors() {
        assert!(matches!(
            mss(MssVariant::Chain, 4, 2, vec![0, 2, 3, 4]),
            Err(SchemeError::WrongScheme(_))
        ));
        assert_eq!(
            mss(MssVariant::Chain, 3, 2, vec![0, 2, 6]).unwrap_err(),
            SchemeError::KeyDeficit {
                level: 3,
                available: 1,
                needed: 2
            }
        );
        assert_eq!(
            mss(MssVariant::Chain, 3, 2, vec![0, 1, 3]).unwrap_err(),
            SchemeError::PaddingRequired { minimal: vec![0, 2, 3] }
        );
    }

    #[test]
    fn hybrid_examples() {
        let r = |n, d| Rational::new(n, d);
        assert_eq!(hybrid_level_rate(2, 3, r(1, 1), r(6, 1)), r(5, 2));
        assert_eq!(hybrid_level_rate(2, 3, r(1, 1), r(3, 1)), r(1, 1));

        let inst = mss(MssVariant::Hybrid, 3, 2, vec![0, 4, 12]).unwrap();
        assert_eq!(inst.declared_rates(), vec![7; 3]);
        assert_eq!(inst.key_len(), 3);
        roundtrip_all_subsets(&inst, 7);
        assert_eq!(
            mss(MssVariant::Hybrid, 3, 2, vec![0, 2, 6]).unwrap_err(),
            SchemeError::PaddingRequired { minimal: vec![0, 2, 7] }
        );

        // no deficit: identical to the chain scheme
        let h = mss(MssVariant::Hybrid, 3, 2, vec![0, 2, 3]).unwrap();
        let c = mss(MssVariant::Chain, 3, 2, vec![0, 2, 3]).unwrap();
        let src = vec![vec![], vec![3, 1], vec![0, 4, 2]];
        let bh = h.encode(&src, &KeyMaterial::empty()).unwrap();
        let bc = c.encode(&src, &KeyMaterial::empty()).unwrap();
        assert_eq!(bh.shares, bc.shares);

        let inst = mss(MssVariant::Hybrid, 5, 3, vec![0, 0, 3, 10, 26]).unwrap();
        roundtrip_all_subsets(&inst, 8);
    }

    #[test]
    fn pseudo_sup_examples() {
        let p = SourceProfile::sliding(3, 2, vec![1, 2, 3]).unwrap();
        let inst = SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::Chain), p).unwrap();
        assert_eq!(inst.declared_rates(), vec![3, 3, 3]);
        roundtrip_all_subsets(&inst, 9);

        let p = SourceProfile::sliding(4, 3, vec![3, 4, 12, 8]).unwrap();
        let inst = SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::Chain), p).unwrap();
        roundtrip_all_subsets(&inst, 10);
        let p = SourceProfile::sliding(4, 2, vec![2, 64, 24, 4]).unwrap();
        let inst = SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::General), p).unwrap();
        roundtrip_all_subsets(&inst, 11);

        // s = 1 matches the superposition scheme
        let p = SourceProfile::sliding(3, 1, vec![1, 1, 1]).unwrap();
        let ps = SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::General), p.clone()).unwrap();
        let s1 = SchemeInstance::new(SchemeKind::Sup1, p).unwrap();
        let src = vec![vec![1], vec![2], vec![3]];
        let a = ps.encode_seeded(&src, 4).unwrap();
        let b = s1.encode_seeded(&src, 4).unwrap();
        assert_eq!(a.shares, b.shares);

        let p = SourceProfile::sliding(3, 2, vec![1, 3, 3]).unwrap();
        assert_eq!(
            SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::Chain), p).unwrap_err(),
            SchemeError::PaddingRequired { minimal: vec![1, 4, 3] }
        );
    }
}
