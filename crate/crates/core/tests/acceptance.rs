//! End-to-end acceptance run: one line per criterion, nonzero exit on any
//! failure or overrun. Expected values are computed here from closed forms,
//! independently of the library code paths they check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smdc::field::{Field, FieldMatrix, MdsCodebook, Symbol, SymbolSeq};
use smdc::regions::{
    contains3, corners3, min_sum_rate, region_mss32, region_smdc32, region_sup2, sup_sum_rate, Mode, RateTuple,
    Rational,
};
use smdc::schemes::{
    plan_matrix, Corner, CornerScheme, LinearEncoderMatrix, MssVariant, SchemeInstance, SchemeKind, SourceProfile,
};
use smdc::verifier::{
    audit_rows, full_audit, full_audit_with_cap, rank_check_lossless, rank_check_secrecy, Enumeration, FnEncoder,
    OracleMode, OracleUsed, RowKind, VerificationReport,
};
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn field(q: u32) -> Field {
    Field::new(q).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn audit_ok(rep: &VerificationReport) -> Result<(), String> {
    if let Some(row) = rep.failing_rows().next() {
        return Err(format!(
            "{}: {:?} row alpha={} set={:?} fails",
            rep.scheme, row.kind, row.alpha, row.subset
        ));
    }
    ensure!(rep.rates_conform, "{}: measured rates differ from declared", rep.scheme);
    ensure!(
        rep.monotone && rep.oracles_agree && rep.pass,
        "{}: audit flags {:?}",
        rep.scheme,
        (rep.monotone, rep.oracles_agree)
    );
    Ok(())
}

/// Secrecy rows must have exactly zero mutual information.
fn zero_leakage(rep: &VerificationReport) -> Result<(), String> {
    for row in rep.rows.iter().filter(|r| r.kind == RowKind::Secrecy) {
        ensure!(
            row.mutual_information_bits == Some(0.0),
            "nonzero leakage at {:?}",
            row.subset
        );
    }
    Ok(())
}

fn c1_mds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut decodes = 0;
    for l in 3..=6usize {
        let f = Field::for_encoders(l).unwrap();
        for alpha in 1..=l {
            let code = MdsCodebook::standard(alpha, l, f).unwrap();
            for _ in 0..50 {
                let stripes = rng.gen_range(1..4);
                let msg: Vec<SymbolSeq> = (0..alpha)
                    .map(|_| (0..stripes).map(|_| rng.gen_range(0..f.order()) as Symbol).collect())
                    .collect();
                let shares = code.encode(&msg).map_err(|e| e.to_string())?;
                // share j is sum_r msg[r] * (j+1)^r
                for (j, w) in shares.iter().enumerate() {
                    for t in 0..stripes {
                        let want = (0..alpha).fold(0u64, |acc, row| {
                            (acc + msg[row][t] as u64 * (j as u64 + 1).pow(row as u32)) % f.order() as u64
                        });
                        ensure!(
                            w[t] as u64 == want,
                            "share {j} of L={l} alpha={alpha} is not Vandermonde"
                        );
                    }
                }
                for set in subsets(l, alpha) {
                    let view: Vec<(usize, &[Symbol])> = set.iter().map(|&j| (j, shares[j].as_slice())).collect();
                    ensure!(
                        code.decode(&view).map_err(|e| e.to_string())? == msg,
                        "L={l} alpha={alpha} set={set:?}"
                    );
                    decodes += 1;
                }
            }
        }
    }
    Ok(format!("{decodes} subset decodes exact"))
}

fn chain32() -> SchemeInstance {
    let p = SourceProfile::new(3, 2, field(5), vec![0, 2, 3], Mode::Mss).unwrap();
    SchemeInstance::new(SchemeKind::Mss(MssVariant::Chain), p).unwrap()
}

fn c2_chain() -> Check {
    let inst = chain32();
    let rep = full_audit_with_cap(&inst, OracleMode::Exhaustive, 1 << 20);
    audit_ok(&rep)?;
    zero_leakage(&rep)?;
    ensure!(rep.measured_rates == vec![2, 2, 2], "rates {:?}", rep.measured_rates);
    let sum: usize = rep.measured_rates.iter().sum();
    ensure!(r(sum as i64) == q(3, 2) * r(2) + q(3, 3) * r(3), "sum {sum}");
    let sizes: BTreeSet<_> = rep.rows.iter().map(|r| r.enumeration_size).collect();
    ensure!(sizes == BTreeSet::from([Some(3125)]), "enumeration sizes {sizes:?}");
    ensure!(
        rep.rows.iter().all(|r| r.oracle == OracleUsed::Exhaustive),
        "oracle not exhaustive"
    );
    Ok(format!(
        "{} lossless + {} secrecy rows over 3125 states",
        rep.count(RowKind::Lossless),
        rep.count(RowKind::Secrecy)
    ))
}

fn c3_general() -> Check {
    let p = SourceProfile::new(3, 2, field(5), vec![0, 36, 18], Mode::Mss).unwrap();
    let inst = SchemeInstance::new(SchemeKind::Mss(MssVariant::General), p).map_err(|e| e.to_string())?;
    let rep = full_audit(&inst, OracleMode::Rank);
    audit_ok(&rep)?;
    ensure!(rep.measured_rates == vec![24, 24, 24], "rates {:?}", rep.measured_rates);
    let min = min_sum_rate(2, &[r(0), r(36), r(18)], Mode::Mss).unwrap();
    ensure!(r(72) == min && min == q(3, 2) * r(36) + r(18), "min sum {min}");
    let paired = full_audit(&chain32(), OracleMode::Both);
    audit_ok(&paired)?;
    ensure!(
        paired.rows.iter().all(|r| r.oracle == OracleUsed::Both),
        "pairing incomplete"
    );
    Ok(format!(
        "rank audit of {} rows; paired oracles agree on {} rows",
        rep.rows.len(),
        paired.rows.len()
    ))
}

/// Corner labels of the (3,2) region with `H2 = l2`, `H3 = l3`.
fn label(c: Corner, h2: i64, h3: i64) -> [Rational; 3] {
    let (h2, h3) = (r(h2), r(h3));
    let half = q(1, 2);
    match c {
        Corner::Q1 => [r(0), h2 + h3, h2 + h3],
        Corner::P1 => [half * h2, h3, h3],
        Corner::O => {
            let v = q(1, 4) * h2 + half * h3;
            [v, v, v]
        }
        Corner::S1 => [h3 - half * h2, h2, h2],
        Corner::T1 => [half * h3, h2, h2],
        Corner::S4 => [half * h2, h2, h3],
        Corner::T4 => [h3, h2, h2 - h3],
        Corner::S10 => [half * h2, half * h2 + h3, half * h2],
    }
}

/// The four cases with their representative profiles and labelled corners.
fn cases() -> Vec<(&'static str, i64, i64, Vec<Corner>)> {
    use Corner::*;
    vec![
        ("i", 4, 8, vec![Q1, P1, O]),
        ("ii", 4, 5, vec![Q1, P1, S1]),
        ("iii", 2, 2, vec![Q1, T1, S4]),
        ("iv", 4, 1, vec![Q1, T1, T4, S10]),
    ]
}

fn corner_instance(cs: CornerScheme, l2: usize, l3: usize) -> Result<SchemeInstance, String> {
    let p = SourceProfile::new(3, 2, field(2), vec![0, l2, l3], Mode::Mss).map_err(|e| e.to_string())?;
    SchemeInstance::new(SchemeKind::Corner(cs), p).map_err(|e| e.to_string())
}

fn c4_corners() -> Check {
    let mut audited = BTreeSet::new();
    let mut largest = 0;
    let mut skipped = Vec::new();
    for (case, l2, l3, corners) in cases() {
        for c in corners {
            if c.conditions(l2 as usize, l3 as usize).is_err() {
                skipped.push(format!("{c}@{case}"));
                continue;
            }
            let inst = corner_instance(c.into(), l2 as usize, l3 as usize)?;
            let rep = full_audit_with_cap(&inst, OracleMode::Exhaustive, 1 << 20);
            audit_ok(&rep)?;
            zero_leakage(&rep)?;
            let measured: Vec<Rational> = rep.measured_rates.iter().map(|&n| r(n as i64)).collect();
            ensure!(measured == label(c, l2, l3), "{c} at case {case}: rates {measured:?}");
            largest = largest.max(rep.rows[0].enumeration_size.unwrap_or(0));
            audited.insert(c);
        }
    }
    ensure!(audited.len() == Corner::ALL.len(), "only {audited:?} audited");
    Ok(format!(
        "8/8 corners exact over GF(2), largest enumeration 2^{}; not realizable at their case profile: {}",
        63 - largest.leading_zeros(),
        skipped.join(", ")
    ))
}

fn permutations(p: &[Rational; 3]) -> Vec<RateTuple> {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
        .iter()
        .map(|ix| ix.iter().map(|&i| p[i]).collect())
        .collect()
}

fn c5_regions() -> Check {
    let mut total = 0;
    for (case, h2, h3, corners) in cases() {
        let reg = region_mss32(r(h2), r(h3));
        let found: BTreeSet<RateTuple> = corners3(&reg).map_err(|e| e.to_string())?.into_iter().collect();
        let want: BTreeSet<RateTuple> = corners.iter().flat_map(|&c| permutations(&label(c, h2, h3))).collect();
        ensure!(found == want, "case {case}: corners3 {found:?} vs labels {want:?}");
        total += want.len();
    }
    Ok(format!("{total} labelled corners and images, sets equal"))
}

fn c6_gaps() -> Check {
    let mut gaps = Vec::new();
    for (l, s) in [(3usize, 2usize), (4, 2), (4, 3), (5, 3)] {
        let h: Vec<Rational> = (1..=l).map(|a| if a < s { r(0) } else { r(1) }).collect();
        let min = min_sum_rate(s, &h, Mode::Mss).unwrap();
        let sup = sup_sum_rate(s, &h, Mode::Mss).unwrap();
        // closed forms: sum_{a>=s} L/a and (L-s+1) L/s
        let want_min: Rational = (s..=l).map(|a| q(l as i64, a as i64)).sum();
        let want_sup = q(l as i64, s as i64) * r((l - s + 1) as i64);
        ensure!(min == want_min && sup == want_sup, "({l},{s}): {min} {sup}");
        ensure!(sup > min, "no gap at ({l},{s})");
        gaps.push(format!("({l},{s}):{}", sup - min));
    }
    let star = region_mss32(r(1), r(1));
    let sup2 = region_sup2(3, 2, &[r(0), r(1), r(1)]);
    let inner = contains3(&star, &sup2).map_err(|e| e.to_string())?;
    ensure!(inner.contained, "sup region not inside R1*: {:?}", inner.witness);
    let outer = contains3(&sup2, &star).map_err(|e| e.to_string())?;
    let w = outer.witness.ok_or("no witness")?;
    ensure!(star.member(&w).unwrap() && !sup2.member(&w).unwrap(), "witness {w:?}");
    ensure!(corners3(&star).unwrap().contains(&w), "witness is not a corner");
    Ok(format!(
        "gaps {}; witness {:?}",
        gaps.join(" "),
        w.iter().map(|x| x.to_string()).collect::<Vec<_>>()
    ))
}

fn c7_sliding() -> Check {
    let p = SourceProfile::new(3, 2, field(5), vec![1, 2, 3], Mode::Sliding).unwrap();
    let inst = SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::Chain), p).map_err(|e| e.to_string())?;
    let rep = full_audit_with_cap(&inst, OracleMode::Exhaustive, 1 << 20);
    audit_ok(&rep)?;
    zero_leakage(&rep)?;
    ensure!(
        rep.rows[0].enumeration_size == Some(5u64.pow(6)),
        "states {:?}",
        rep.rows[0].enumeration_size
    );
    ensure!(rep.measured_rates == vec![3, 3, 3], "rates {:?}", rep.measured_rates);
    let sum_bound = q(3, 1) * r(1) + q(3, 2) * r(2) + q(3, 3) * r(3);
    ensure!(sum_bound == r(9), "bound {sum_bound}");
    let tuple: Vec<Rational> = vec![r(3); 3];
    let reg = region_smdc32(r(1), r(2), r(3));
    ensure!(reg.member(&tuple).unwrap(), "not in region");
    let tight = reg
        .tight_rows(&tuple)
        .iter()
        .any(|row| row.coeffs == vec![r(1); 3] && row.rhs == sum_bound);
    ensure!(tight, "sum bound not met with equality");
    Ok(format!("{} rows pass over 5^6 states; sum 9 tight", rep.rows.len()))
}

fn c8_sup1() -> Check {
    let p = SourceProfile::new(3, 1, field(5), vec![1, 1, 1], Mode::Mss).unwrap();
    let inst = SchemeInstance::new(SchemeKind::Sup1, p).map_err(|e| e.to_string())?;
    let rep = full_audit(&inst, OracleMode::Both);
    audit_ok(&rep)?;
    zero_leakage(&rep)?;
    // secrecy for every |A| <= alpha - 1
    let want: usize = (2..=3)
        .map(|a| (1..a).map(|k| subsets(3, k).len()).sum::<usize>())
        .sum();
    ensure!(
        rep.count(RowKind::Secrecy) == want,
        "{} secrecy rows",
        rep.count(RowKind::Secrecy)
    );
    ensure!(rep.measured_rates == vec![3, 3, 3], "rates {:?}", rep.measured_rates);
    Ok(format!("{} secrecy rows, rate 3 = sum H", want))
}

fn c9_pads() -> Check {
    let mut runs = 0;
    for qq in [2u32, 5] {
        let f = field(qq);
        for n in 1..=3usize {
            // C hidden by X = A + C, Y = A + B
            let shared_pad = FnEncoder {
                field: f,
                source_lengths: vec![n],
                key_len: 2 * n,
                f: move |z: &[Symbol]| {
                    let (c, a, b) = (&z[..n], &z[n..2 * n], &z[2 * n..]);
                    let mut w: SymbolSeq = (0..n).map(|i| f.add(a[i], c[i])).collect();
                    w.extend((0..n).map(|i| f.add(a[i], b[i])));
                    vec![w]
                },
            };
            let en = Enumeration::new(&shared_pad, 1 << 27).map_err(|e| e.to_string())?;
            let jc = en.joint_counts(&[0], 1);
            ensure!(
                jc.independent() && jc.mutual_information_bits() == 0.0,
                "shared pad q={qq} n={n}"
            );

            // A hidden by (C, D = A + B)
            let side_key = FnEncoder {
                field: f,
                source_lengths: vec![n],
                key_len: n + 1,
                f: move |z: &[Symbol]| {
                    let (a, b, c) = (&z[..n], &z[n..2 * n], z[2 * n]);
                    let mut w = vec![c];
                    w.extend((0..n).map(|i| f.add(a[i], b[i])));
                    vec![w]
                },
            };
            let en = Enumeration::new(&side_key, 1 << 27).map_err(|e| e.to_string())?;
            let jc = en.joint_counts(&[0], 1);
            ensure!(
                jc.independent() && jc.mutual_information_bits() == 0.0,
                "side key q={qq} n={n}"
            );

            // control: revealing B as well breaks the side-key pad
            let leaky = FnEncoder {
                field: f,
                source_lengths: vec![n],
                key_len: n,
                f: move |z: &[Symbol]| {
                    let mut w: SymbolSeq = (0..n).map(|i| f.add(z[i], z[n + i])).collect();
                    w.extend_from_slice(&z[n..]);
                    vec![w]
                },
            };
            let en = Enumeration::new(&leaky, 1 << 27).map_err(|e| e.to_string())?;
            ensure!(
                !en.joint_counts(&[0], 1).independent(),
                "control q={qq} n={n} looks secret"
            );
            runs += 2;
        }
    }
    Ok(format!("{runs} exact independence runs, controls detected"))
}

/// Every constructible scheme instance small enough to enumerate.
fn scheme_matrix() -> Vec<SchemeInstance> {
    let mut out = Vec::new();
    let mut push = |inst: Option<SchemeInstance>| out.extend(inst);
    let f5 = field(5);
    for l in 2..=4 {
        for k in 1..=l {
            for len in 1..=2 {
                push(SchemeInstance::threshold(k, l, len, f5).ok());
                for c in 0..k {
                    push(SchemeInstance::ramp(c, k, l, len * (k - c), f5).ok());
                }
            }
        }
    }
    for lengths in [vec![1, 1], vec![1, 0, 1], vec![1, 1, 1]] {
        let p = SourceProfile::new(lengths.len(), 1, f5, lengths, Mode::Mss).unwrap();
        push(SchemeInstance::new(SchemeKind::Sup1, p).ok());
    }
    for (v, l, s, lengths, qq) in [
        (MssVariant::Chain, 3, 2, vec![0, 2, 3], 5),
        (MssVariant::Chain, 3, 2, vec![0, 2, 2], 5),
        (MssVariant::Chain, 3, 3, vec![0, 0, 3], 5),
        (MssVariant::General, 3, 3, vec![0, 0, 6], 5),
        (MssVariant::Hybrid, 3, 2, vec![0, 2, 3], 5),
        (MssVariant::Hybrid, 3, 2, vec![0, 2, 4], 5),
        (MssVariant::Chain, 3, 2, vec![0, 2, 3], 7),
    ] {
        let p = SourceProfile::new(l, s, field(qq), lengths, Mode::Mss).unwrap();
        push(SchemeInstance::new(SchemeKind::Mss(v), p).ok());
    }
    for lengths in [vec![1, 2, 3], vec![1, 2, 2]] {
        let p = SourceProfile::new(3, 2, f5, lengths, Mode::Sliding).unwrap();
        push(SchemeInstance::new(SchemeKind::PseudoSup(MssVariant::Chain), p).ok());
    }
    for (l2, l3) in [(2, 2), (2, 1), (2, 3), (2, 4), (4, 1), (4, 5), (2, 7)] {
        for c in Corner::ALL {
            for cs in CornerScheme::all_permutations(c) {
                push(corner_instance(cs, l2, l3).ok());
            }
        }
    }
    out.retain(|i| smdc::verifier::microstates(i.field().order(), i.input_len()).is_some_and(|s| s <= 1 << 16));
    out
}

/// A random linear encoder on the (3,2) shape, which usually fails rows.
fn random_linear(rng: &mut ChaCha8Rng, qq: u32) -> (LinearEncoderMatrix, SourceProfile) {
    let f = field(qq);
    let lengths = vec![0, 1, 2];
    let n = 3 + rng.gen_range(0..3);
    let encoders = (0..3)
        .map(|_| {
            let rows = rng.gen_range(0..3);
            let mut m = FieldMatrix::zeros(rows, n);
            for i in 0..rows {
                for j in 0..n {
                    m.set(i, j, rng.gen_range(0..qq) as Symbol);
                }
            }
            m
        })
        .collect();
    let mut selectors = Vec::new();
    let mut off = 0;
    for &len in &lengths {
        let mut s = FieldMatrix::zeros(len, n);
        for i in 0..len {
            s.set(i, off + i, 1);
        }
        off += len;
        selectors.push(s);
    }
    let mat = LinearEncoderMatrix {
        field: f,
        input_len: n,
        encoders,
        selectors,
    };
    (mat, SourceProfile::new(3, 2, f, lengths, Mode::Mss).unwrap())
}

fn c10_oracles() -> Check {
    let instances = scheme_matrix();
    let mut rows = 0;
    for inst in &instances {
        let rep = full_audit(inst, OracleMode::Both);
        ensure!(
            rep.oracles_agree,
            "{} {:?}: oracles disagree",
            inst.kind,
            inst.profile.lengths
        );
        ensure!(
            rep.rows.iter().all(|r| r.oracle == OracleUsed::Both),
            "{}: a row ran one oracle",
            inst.kind
        );
        audit_ok(&rep)?;
        rows += rep.rows.len();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut random_rows, mut failing) = (0, 0);
    for t in 0..60 {
        let (mat, prof) = random_linear(&mut rng, if t % 2 == 0 { 2 } else { 3 });
        let en = Enumeration::new(&mat, 1 << 16).map_err(|e| e.to_string())?;
        for (kind, alpha, set) in audit_rows(&prof) {
            let (e, k) = match kind {
                RowKind::Lossless => (en.lossless(&set, alpha), rank_check_lossless(&mat, &set, alpha)),
                RowKind::Secrecy => (
                    en.joint_counts(&set, alpha).independent(),
                    rank_check_secrecy(&mat, &set, alpha),
                ),
            };
            ensure!(e == k, "random encoder {t}: {kind:?} {alpha} {set:?}");
            random_rows += 1;
            failing += usize::from(!e);
        }
    }
    // the plan matrices used above are the scheme's own linear image
    let plan = plan_matrix(&chain32()).map_err(|e| e.to_string())?;
    ensure!(plan.input_len == chain32().input_len(), "plan shape");
    Ok(format!(
        "{} instances, {rows} rows; {random_rows} random-encoder rows ({failing} failing) all agree",
        instances.len()
    ))
}

type Criterion = (&'static str, fn() -> Check, Duration);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("MDS correctness", c1_mds, Duration::from_secs(5)),
        (
            "chain (3,2) l=(0,2,3) exhaustive audit",
            c2_chain,
            Duration::from_secs(1),
        ),
        (
            "general (3,2) l=(0,36,18) rank audit",
            c3_general,
            Duration::from_secs(2),
        ),
        ("corner schemes over GF(2)", c4_corners, Duration::from_secs(10)),
        ("(3,2) region corners", c5_regions, Duration::from_secs(5)),
        ("superposition gaps", c6_gaps, Duration::from_secs(5)),
        ("sliding pseudo-superposition (3,2)", c7_sliding, Duration::from_secs(5)),
        ("(3,1) superposition witness", c8_sup1, Duration::from_secs(5)),
        ("one-time pad independence", c9_pads, Duration::from_secs(30)),
        ("oracle equivalence", c10_oracles, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name} [{took:.2?}] {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{took:.2?}] {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
