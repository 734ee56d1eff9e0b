//! Exhaustive joint-distribution oracle. Every input (sources and key) is
//! enumerated once, outputs are cached, and each check builds an exact
//! histogram from the cache.

use super::{Encoder, VerifierError};
use crate::field::Symbol;
use rayon::prelude::*;
use std::collections::HashMap;
use std::ops::Range;

/// Default microstate cap, `2^20`.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

/// Cap from `SMDC_ENUM_CAP` (decimal or `2^k`), else [`DEFAULT_ENUM_CAP`].
pub fn enum_cap() -> u64 {
    std::env::var("SMDC_ENUM_CAP")
        .ok()
        .and_then(|v| parse_cap(&v))
        .unwrap_or(DEFAULT_ENUM_CAP)
}

fn parse_cap(v: &str) -> Option<u64> {
    let v = v.trim();
    match v.split_once('^') {
        Some((b, e)) => b.trim().parse::<u64>().ok()?.checked_pow(e.trim().parse().ok()?),
        None => v.parse().ok(),
    }
}

/// `q^n`, or `None` on overflow.
pub fn microstates(q: u32, n: usize) -> Option<u64> {
    (q as u64).checked_pow(u32::try_from(n).ok()?)
}

/// `q^len` if it fits a `u128`, so that `len` symbols pack into one integer.
fn packed_span(q: u32, len: usize) -> Option<u128> {
    (q as u128).checked_pow(u32::try_from(len).ok()?)
}

/// Where the symbols of one observation live: offsets into a cached output
/// row, then input digits.
struct Probe {
    out: Vec<usize>,
    inp: Vec<usize>,
}

impl Probe {
    fn len(&self) -> usize {
        self.out.len() + self.inp.len()
    }
}

/// All `q^N` inputs with their cached encoder outputs.
pub struct Enumeration {
    q: u32,
    input_len: usize,
    states: u64,
    sources: Vec<Range<usize>>,
    /// Offsets of each encoder's output inside one cached row.
    out_ranges: Vec<Range<usize>>,
    out_stride: usize,
    outputs: Vec<Symbol>,
    /// `q^j` for every input digit `j`.
    pows: Vec<u64>,
}

impl Enumeration {
    pub fn new(enc: &dyn Encoder, cap: u64) -> Result<Self, VerifierError> {
        let q = enc.field().order();
        let n = enc.input_len();
        let states = match microstates(q, n) {
            Some(s) if s <= cap => s,
            other => return Err(VerifierError::TooLargeUseRankOracle { states: other, cap }),
        };
        let probe = enc.encode(&vec![0; n]);
        let mut out_ranges = Vec::with_capacity(probe.len());
        let mut off = 0;
        for w in &probe {
            out_ranges.push(off..off + w.len());
            off += w.len();
        }
        let stride = off;
        let mut outputs = vec![0 as Symbol; stride * states as usize];
        if stride > 0 {
            outputs.par_chunks_mut(stride).enumerate().for_each(|(i, row)| {
                let z = input_of(i as u64, q, n);
                let w = enc.encode(&z);
                let mut o = 0;
                for part in &w {
                    row[o..o + part.len()].copy_from_slice(part);
                    o += part.len();
                }
                debug_assert_eq!(o, row.len(), "encoder output length depends on input");
            });
        }
        Ok(Enumeration {
            q,
            input_len: n,
            states,
            sources: enc.source_ranges(),
            out_ranges,
            out_stride: stride,
            outputs,
            pows: (0..n).map(|j| (q as u64).pow(j as u32)).collect(),
        })
    }

    pub fn states(&self) -> u64 {
        self.states
    }

    fn row(&self, i: u64) -> &[Symbol] {
        &self.outputs[i as usize * self.out_stride..(i as usize + 1) * self.out_stride]
    }

    fn out_positions(&self, set: &[usize]) -> Vec<usize> {
        set.iter().flat_map(|&l| self.out_ranges[l].clone()).collect()
    }

    fn in_positions(&self, levels: Range<usize>) -> Vec<usize> {
        self.sources[levels].iter().flat_map(|r| r.clone()).collect()
    }

    /// Input digit `j` of state `i` (little-endian base `q`).
    fn digit(&self, i: u64, j: usize) -> Symbol {
        ((i / self.pows[j]) % self.q as u64) as Symbol
    }

    fn symbols<'a>(&'a self, i: u64, probe: &'a Probe) -> impl Iterator<Item = Symbol> + 'a {
        let row = self.row(i);
        probe
            .out
            .iter()
            .map(move |&p| row[p])
            .chain(probe.inp.iter().map(move |&j| self.digit(i, j)))
    }

    fn pack(&self, i: u64, probe: &Probe) -> u128 {
        let q = self.q as u128;
        self.symbols(i, probe).fold(0u128, |acc, v| acc * q + v as u128)
    }

    /// Sorted `(w, x)` keys packed as `w * q^|x| + x`, or `None` when they
    /// do not fit a `u128`.
    fn sorted_keys(&self, w: &Probe, x: &Probe) -> Option<(Vec<u128>, u128)> {
        packed_span(self.q, w.len() + x.len())?;
        let xspan = packed_span(self.q, x.len())?;
        let mut keys: Vec<u128> = (0..self.states)
            .into_par_iter()
            .map(|i| self.pack(i, w) * xspan + self.pack(i, x))
            .collect();
        keys.par_sort_unstable();
        Some((keys, xspan))
    }

    /// Whether `W_set` determines `X_1..X_alpha` (1-based `alpha`).
    pub fn lossless(&self, set: &[usize], alpha: usize) -> bool {
        let w = Probe {
            out: self.out_positions(set),
            inp: Vec::new(),
        };
        let x = Probe {
            out: Vec::new(),
            inp: self.in_positions(0..alpha),
        };
        match self.sorted_keys(&w, &x) {
            // a functional relation: equal w implies equal key
            Some((keys, xspan)) => keys.windows(2).all(|p| p[0] / xspan != p[1] / xspan || p[0] == p[1]),
            None => {
                let mut seen: HashMap<Vec<Symbol>, Vec<Symbol>> = HashMap::new();
                (0..self.states).all(|i| {
                    let wk: Vec<Symbol> = self.symbols(i, &w).collect();
                    let xk: Vec<Symbol> = self.symbols(i, &x).collect();
                    seen.entry(wk).or_insert_with(|| xk.clone()) == &xk
                })
            }
        }
    }

    /// Exact joint histogram of `(X_alpha, W_set)`.
    pub fn joint_counts(&self, set: &[usize], alpha: usize) -> JointCounts {
        let w = Probe {
            out: self.out_positions(set),
            inp: Vec::new(),
        };
        let x = Probe {
            out: Vec::new(),
            inp: self.in_positions(alpha - 1..alpha),
        };
        let cells: Vec<(u128, u128, u64)> = match self.sorted_keys(&w, &x) {
            Some((keys, xspan)) => {
                let mut cells = Vec::new();
                for run in keys.chunk_by(|a, b| a == b) {
                    cells.push((run[0] % xspan, run[0] / xspan, run.len() as u64));
                }
                cells
            }
            None => {
                // keys too wide to pack: intern them
                let mut ids: HashMap<Vec<Symbol>, u128> = HashMap::new();
                let mut joint: HashMap<(u128, u128), u64> = HashMap::new();
                for i in 0..self.states {
                    let mut id = |k: Vec<Symbol>| {
                        let n = ids.len() as u128;
                        *ids.entry(k).or_insert(n)
                    };
                    let xk = id(self.symbols(i, &x).collect());
                    let wk = id(self.symbols(i, &w).collect());
                    *joint.entry((xk, wk)).or_default() += 1;
                }
                joint.into_iter().map(|((x, w), c)| (x, w, c)).collect()
            }
        };
        JointCounts::from_cells(cells, self.states)
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }
}

fn input_of(mut i: u64, q: u32, n: usize) -> Vec<Symbol> {
    (0..n)
        .map(|_| {
            let d = (i % q as u64) as Symbol;
            i /= q as u64;
            d
        })
        .collect()
}

/// An exact two-variable histogram with its marginals.
pub struct JointCounts {
    total: u64,
    joint: Vec<(usize, usize, u64)>,
    x: Vec<u64>,
    w: Vec<u64>,
}

impl JointCounts {
    fn from_cells(cells: Vec<(u128, u128, u64)>, total: u64) -> Self {
        let mut xs: HashMap<u128, usize> = HashMap::new();
        let mut ws: HashMap<u128, usize> = HashMap::new();
        let mut x = Vec::new();
        let mut w = Vec::new();
        let mut joint = Vec::with_capacity(cells.len());
        for (kx, kw, c) in cells {
            let ix = *xs.entry(kx).or_insert_with(|| {
                x.push(0);
                x.len() - 1
            });
            let iw = *ws.entry(kw).or_insert_with(|| {
                w.push(0);
                w.len() - 1
            });
            x[ix] += c;
            w[iw] += c;
            joint.push((ix, iw, c));
        }
        JointCounts { total, joint, x, w }
    }

    /// Exact independence: every cell satisfies `c(x,w) T = c(x) c(w)` and
    /// the joint support is the full product of the marginal supports.
    pub fn independent(&self) -> bool {
        self.joint.len() == self.x.len() * self.w.len()
            && self
                .joint
                .iter()
                .all(|&(i, j, c)| c as u128 * self.total as u128 == self.x[i] as u128 * self.w[j] as u128)
    }

    /// `I(X; W)` in bits. Exactly `0.0` when [`JointCounts::independent`].
    pub fn mutual_information_bits(&self) -> f64 {
        let t = self.total as f64;
        self.joint
            .iter()
            .map(|&(i, j, c)| {
                let num = c as u128 * self.total as u128;
                let den = self.x[i] as u128 * self.w[j] as u128;
                if num == den {
                    0.0
                } else {
                    (c as f64 / t) * (num as f64 / den as f64).log2()
                }
            })
            .sum()
    }
}
