use super::exhaustive::{enum_cap, Enumeration};
use super::rank::{rank_check_lossless, rank_mutual_information_bits};
use super::Encoder;
use super::VerifierError;
use crate::regions::Mode;
use crate::schemes::{plan_matrix, LinearEncoderMatrix, SchemeError, SchemeInstance, SourceProfile};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    Exhaustive,
    Rank,
    Both,
}

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(OracleMode::Exhaustive),
            "rank" => Ok(OracleMode::Rank),
            "both" => Ok(OracleMode::Both),
            _ => Err(format!("unknown oracle mode {s:?}")),
        }
    }
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMode::Exhaustive => "exhaustive",
            OracleMode::Rank => "rank",
            OracleMode::Both => "both",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Lossless,
    Secrecy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleUsed {
    Exhaustive,
    Rank,
    Both,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub kind: RowKind,
    pub alpha: usize,
    /// 1-based encoder indices (`U` for lossless rows, `A` for secrecy rows).
    pub subset: Vec<usize>,
    pub pass: bool,
    pub oracle: OracleUsed,
    pub exhaustive: Option<bool>,
    pub rank: Option<bool>,
    /// Secrecy rows only; exactly 0 when the row passes.
    pub mutual_information_bits: Option<f64>,
    pub enumeration_size: Option<u64>,
    /// The exhaustive oracle was requested but the instance exceeded the cap.
    pub fallback: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scheme: String,
    pub encoders: usize,
    pub s: usize,
    pub q: u32,
    pub mode: Mode,
    pub lengths: Vec<usize>,
    pub key_len: usize,
    pub requested: OracleMode,
    pub declared_rates: Vec<usize>,
    pub measured_rates: Vec<usize>,
    pub rates_conform: bool,
    pub rows: Vec<AuditRow>,
    pub oracles_agree: bool,
    pub monotone: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failing_rows(&self) -> impl Iterator<Item = &AuditRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn count(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every access pattern a profile constrains, as `(kind, alpha, 0-based set)`:
/// all `U` with `|U| = alpha` for each reconstruction level, and all `A` with
/// `1 <= |A| <= alpha - s` for each `alpha > s`.
pub fn audit_rows(p: &SourceProfile) -> Vec<(RowKind, usize, Vec<usize>)> {
    let l = p.encoders;
    let mut rows = Vec::new();
    for a in p.first_level()..=l {
        for u in subsets(l, a) {
            rows.push((RowKind::Lossless, a, u));
        }
    }
    for a in p.s + 1..=l {
        for size in 1..=a - p.s {
            for set in subsets(l, size) {
                rows.push((RowKind::Secrecy, a, set));
            }
        }
    }
    rows
}

struct Oracles {
    en: Option<Enumeration>,
    mat: Option<Result<LinearEncoderMatrix, SchemeError>>,
    fallback: bool,
    states: Option<u64>,
}

/// One verdict per oracle; the rank side carries why it could not run.
type Pair<T> = (Option<T>, Option<Result<T, String>>);

impl Oracles {
    fn lossless(&self, set: &[usize], alpha: usize) -> Pair<bool> {
        let e = self.en.as_ref().map(|en| en.lossless(set, alpha));
        let r = self.mat.as_ref().map(|m| match m {
            Ok(m) => Ok(rank_check_lossless(m, set, alpha)),
            Err(err) => Err(err.to_string()),
        });
        (e, r)
    }

    fn secrecy(&self, set: &[usize], alpha: usize) -> Pair<(bool, f64)> {
        let e = self.en.as_ref().map(|en| {
            let c = en.joint_counts(set, alpha);
            (c.independent(), c.mutual_information_bits())
        });
        let r = self.mat.as_ref().map(|m| match m {
            Ok(m) => {
                let mi = rank_mutual_information_bits(m, set, alpha);
                Ok((mi == 0.0, mi))
            }
            Err(err) => Err(err.to_string()),
        });
        (e, r)
    }
}

pub fn full_audit(inst: &SchemeInstance, mode: OracleMode) -> VerificationReport {
    full_audit_with_cap(inst, mode, enum_cap())
}

/// Runs every row of [`audit_rows`]. With `Exhaustive` or `Both`, instances
/// above `cap` microstates fall back to the rank oracle and say so per row.
pub fn full_audit_with_cap(inst: &SchemeInstance, mode: OracleMode, cap: u64) -> VerificationReport {
    let mut oracles = Oracles {
        en: None,
        mat: None,
        fallback: false,
        states: None,
    };
    if mode != OracleMode::Rank {
        match Enumeration::new(inst, cap) {
            Ok(en) => {
                oracles.states = Some(en.states());
                oracles.en = Some(en);
            }
            Err(_) => oracles.fallback = true,
        }
    }
    if mode != OracleMode::Exhaustive || oracles.fallback {
        oracles.mat = Some(plan_matrix(inst));
    }
    let declared = inst.declared_rates();
    let measured = sample_rates(inst);
    report(
        &inst.profile,
        inst.kind.to_string(),
        inst.key_len(),
        mode,
        &oracles,
        declared,
        measured,
    )
}

/// Exhaustive audit of an arbitrary encoder against the constraints of
/// `profile`. Rates are taken from the encoder's own output lengths.
pub fn audit_encoder(
    enc: &dyn Encoder,
    profile: &SourceProfile,
    label: &str,
    cap: u64,
) -> Result<VerificationReport, VerifierError> {
    let en = Enumeration::new(enc, cap)?;
    let oracles = Oracles {
        states: Some(en.states()),
        en: Some(en),
        mat: None,
        fallback: false,
    };
    let counts: Vec<usize> = enc.encode(&vec![0; enc.input_len()]).iter().map(|w| w.len()).collect();
    let key_len = enc.input_len() - profile.total_source_len();
    Ok(report(
        profile,
        label.to_string(),
        key_len,
        OracleMode::Exhaustive,
        &oracles,
        counts.clone(),
        Some(counts),
    ))
}

fn report(
    p: &SourceProfile,
    scheme: String,
    key_len: usize,
    mode: OracleMode,
    oracles: &Oracles,
    declared: Vec<usize>,
    measured: Option<Vec<usize>>,
) -> VerificationReport {
    let mut rows = Vec::new();
    let mut agree = true;
    for (kind, alpha, set) in audit_rows(p) {
        let mut row = AuditRow {
            kind,
            alpha,
            subset: set.iter().map(|l| l + 1).collect(),
            pass: false,
            oracle: OracleUsed::None,
            exhaustive: None,
            rank: None,
            mutual_information_bits: None,
            enumeration_size: oracles.states,
            fallback: oracles.fallback,
            error: None,
        };
        match kind {
            RowKind::Lossless => {
                let (e, r) = oracles.lossless(&set, alpha);
                row.exhaustive = e;
                match r {
                    Some(Ok(v)) => row.rank = Some(v),
                    Some(Err(msg)) => row.error = Some(msg),
                    None => {}
                }
            }
            RowKind::Secrecy => {
                let (e, r) = oracles.secrecy(&set, alpha);
                if let Some((v, mi)) = e {
                    row.exhaustive = Some(v);
                    row.mutual_information_bits = Some(mi);
                }
                match r {
                    Some(Ok((v, mi))) => {
                        row.rank = Some(v);
                        row.mutual_information_bits.get_or_insert(mi);
                    }
                    Some(Err(msg)) => row.error = Some(msg),
                    None => {}
                }
            }
        }
        row.oracle = match (row.exhaustive, row.rank) {
            (Some(_), Some(_)) => OracleUsed::Both,
            (Some(_), None) => OracleUsed::Exhaustive,
            (None, Some(_)) => OracleUsed::Rank,
            (None, None) => OracleUsed::None,
        };
        if let (Some(a), Some(b)) = (row.exhaustive, row.rank) {
            agree &= a == b;
        }
        row.pass = row.error.is_none()
            && row.oracle != OracleUsed::None
            && row.exhaustive.unwrap_or(true)
            && row.rank.unwrap_or(true);
        rows.push(row);
    }

    let monotone = check_monotone(p.encoders, oracles, &rows);
    let rates_conform = measured.as_ref() == Some(&declared);
    let pass = rows.iter().all(|r| r.pass) && agree && monotone && rates_conform;
    VerificationReport {
        scheme,
        encoders: p.encoders,
        s: p.s,
        q: p.field.order(),
        mode: p.mode,
        lengths: p.lengths.clone(),
        key_len,
        requested: mode,
        declared_rates: declared,
        measured_rates: measured.unwrap_or_default(),
        rates_conform,
        rows,
        oracles_agree: agree,
        monotone,
        pass,
    }
}

/// Lossless at `U` must persist when one encoder is added; secrecy at `A`
/// must hold at every subset of `A` (those subsets are rows themselves).
fn check_monotone(l: usize, oracles: &Oracles, rows: &[AuditRow]) -> bool {
    let lossless: HashMap<(usize, &[usize]), bool> = rows
        .iter()
        .filter(|r| r.kind == RowKind::Lossless)
        .map(|r| ((r.alpha, r.subset.as_slice()), r.pass))
        .collect();
    for row in rows.iter().filter(|r| r.kind == RowKind::Lossless && r.pass) {
        let set: Vec<usize> = row.subset.iter().map(|x| x - 1).collect();
        for extra in (0..l).filter(|x| !set.contains(x)) {
            let mut sup = set.clone();
            sup.push(extra);
            sup.sort_unstable();
            // recovering X_1..X_{alpha+1} from sup already covers X_1..X_alpha
            let one_based: Vec<usize> = sup.iter().map(|x| x + 1).collect();
            if lossless.get(&(row.alpha + 1, one_based.as_slice())) == Some(&true) {
                continue;
            }
            let (e, r) = oracles.lossless(&sup, row.alpha);
            if e == Some(false) || matches!(r, Some(Ok(false))) {
                return false;
            }
        }
    }
    let secrecy: HashMap<(usize, &[usize]), bool> = rows
        .iter()
        .filter(|r| r.kind == RowKind::Secrecy)
        .map(|r| ((r.alpha, r.subset.as_slice()), r.pass))
        .collect();
    for row in rows.iter().filter(|r| r.kind == RowKind::Secrecy && r.pass) {
        for drop in 0..row.subset.len() {
            let mut sub = row.subset.clone();
            sub.remove(drop);
            if !sub.is_empty() && secrecy.get(&(row.alpha, sub.as_slice())) == Some(&false) {
                return false;
            }
        }
    }
    true
}

/// Symbol counts of one encoding of random sources.
fn sample_rates(inst: &SchemeInstance) -> Option<Vec<usize>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let q = inst.field().order();
    let src: Vec<Vec<u16>> = inst
        .profile
        .lengths
        .iter()
        .map(|&n| (0..n).map(|_| rng.gen_range(0..q) as u16).collect())
        .collect();
    inst.encode_seeded(&src, 1).ok().map(|b| b.symbol_counts())
}
