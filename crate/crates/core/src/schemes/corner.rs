//! Binary schemes achieving the corner points of the `(3, 2)` multilevel
//! secret sharing region. `X2` and `X3` are bit strings of lengths `l2`,
//! `l3`; `+` is XOR. Each scheme lists its segments explicitly.

use super::{Result, SchemeError, Segment, SourceProfile};
use crate::field::{Symbol, SymbolSeq};
use crate::regions::Mode;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    Q1,
    P1,
    O,
    S1,
    T1,
    S4,
    T4,
    S10,
}

impl Corner {
    pub const ALL: [Corner; 8] = [
        Corner::Q1,
        Corner::P1,
        Corner::O,
        Corner::S1,
        Corner::T1,
        Corner::S4,
        Corner::T4,
        Corner::S10,
    ];

    /// Length conditions; `Err` names the first one violated.
    pub fn conditions(self, l2: usize, l3: usize) -> std::result::Result<(), String> {
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };
        match self {
            Corner::Q1 => Ok(()),
            Corner::P1 => {
                need(l2.is_multiple_of(2), "l2 must be even")?;
                need(l3 >= l2, "needs l3 >= l2")
            }
            Corner::O => {
                need(l2.is_multiple_of(2), "l2 must be even")?;
                need(2 * l3 > 3 * l2, "needs 2 l3 > 3 l2")?;
                need((2 * l3 - 3 * l2).is_multiple_of(4), "needs (2 l3 - 3 l2)/4 integral")
            }
            Corner::S1 => {
                need(l2.is_multiple_of(2), "l2 must be even")?;
                need(l2 < l3 && 2 * l3 <= 3 * l2, "needs l2 < l3 <= 3 l2 / 2")
            }
            Corner::T1 => {
                need(l3.is_multiple_of(2), "l3 must be even")?;
                need(l3 <= l2, "needs l3 <= l2")
            }
            Corner::S4 => {
                need(l2.is_multiple_of(2), "l2 must be even")?;
                need(l2 <= 2 * l3 && l3 <= l2, "needs l2 / 2 <= l3 <= l2")
            }
            Corner::T4 => need(2 * l3 <= l2, "needs 2 l3 <= l2"),
            Corner::S10 => {
                need(l2.is_multiple_of(2), "l2 must be even")?;
                need(2 * l3 <= l2, "needs 2 l3 <= l2")
            }
        }
    }

    pub fn key_len(self, l2: usize, l3: usize) -> usize {
        match self {
            Corner::Q1 => l3,
            Corner::P1 => l3 - l2,
            Corner::O => (2 * l3 - 3 * l2) / 4,
            _ => 0,
        }
    }

    /// Bits per encoder, before any relabelling.
    pub fn rates(self, l2: usize, l3: usize) -> [usize; 3] {
        let h = l2 / 2;
        match self {
            Corner::Q1 => [0, l2 + l3, l2 + l3],
            Corner::P1 => [h, l3, l3],
            Corner::O => {
                let r = l2 + (2 * l3 - 3 * l2) / 4;
                [r, r, r]
            }
            Corner::S1 => [l3 - h, l2, l2],
            Corner::T1 => [l3 / 2, l2, l2],
            Corner::S4 => [h, l2, l3],
            Corner::T4 => [l3, l2, l2 - l3],
            Corner::S10 => [h, h + l3, h],
        }
    }

    /// `(W1, W2, W3)` for inputs satisfying [`Corner::conditions`].
    fn encode(self, x2: &[Symbol], x3: &[Symbol], z: &[Symbol]) -> [Vec<Segment>; 3] {
        let (l2, l3) = (x2.len(), x3.len());
        let h = l2 / 2;
        let seg = |level: usize, tag: &str, v: SymbolSeq| Segment::new(level, tag, v);
        match self {
            Corner::Q1 => [
                vec![],
                vec![seg(2, "X2", x2.to_vec()), seg(0, "Z1", z.to_vec())],
                vec![seg(2, "X2", x2.to_vec()), seg(3, "X3+Z1", xor(x3, z))],
            ],
            Corner::P1 => {
                let (a2, b2) = x2.split_at(h);
                let (a3, b3, c3) = (&x3[..h], &x3[h..l2], &x3[l2..]);
                [
                    vec![seg(2, "A2+B2", xor(a2, b2))],
                    vec![
                        seg(2, "A2", a2.to_vec()),
                        seg(3, "A3+B2", xor(a3, b2)),
                        seg(0, "Z2", z.to_vec()),
                    ],
                    vec![
                        seg(2, "B2", b2.to_vec()),
                        seg(3, "B3+A2", xor(b3, a2)),
                        seg(3, "C3+Z2", xor(c3, z)),
                    ],
                ]
            }
            Corner::O => {
                let d = z.len();
                let (a2, b2) = x2.split_at(h);
                let (a3, b3, c3) = (&x3[..h], &x3[h..2 * h], &x3[2 * h..3 * h]);
                let (d3, e3) = (&x3[3 * h..3 * h + d], &x3[3 * h + d..]);
                [
                    vec![
                        seg(2, "A2+B2", xor(a2, b2)),
                        seg(3, "A3+A2", xor(a3, a2)),
                        seg(0, "Z3", z.to_vec()),
                    ],
                    vec![
                        seg(2, "A2", a2.to_vec()),
                        seg(3, "B3+B2", xor(b3, b2)),
                        seg(3, "D3+Z3", xor(d3, z)),
                    ],
                    vec![
                        seg(2, "B2", b2.to_vec()),
                        seg(3, "C3+A2", xor(c3, a2)),
                        seg(3, "E3+Z3", xor(e3, z)),
                    ],
                ]
            }
            Corner::S1 => {
                let (a2, b2) = x2.split_at(h);
                let (a3, b3, c3) = (&x3[..h], &x3[h..l2], &x3[l2..]);
                [
                    vec![seg(2, "A2+B2", xor(a2, b2)), seg(3, "C3+A2^1", xor(c3, &a2[..l3 - l2]))],
                    vec![seg(2, "A2", a2.to_vec()), seg(3, "A3+B2", xor(a3, b2))],
                    vec![seg(2, "B2", b2.to_vec()), seg(3, "B3+A2", xor(b3, a2))],
                ]
            }
            Corner::T1 => {
                let k = l3 / 2;
                let (a2, b2, c2) = (&x2[..k], &x2[k..2 * k], &x2[2 * k..]);
                let (a3, b3) = x3.split_at(k);
                [
                    vec![seg(2, "A2+B2", xor(a2, b2))],
                    vec![
                        seg(2, "A2", a2.to_vec()),
                        seg(2, "C2", c2.to_vec()),
                        seg(3, "A3+B2", xor(a3, b2)),
                    ],
                    vec![
                        seg(2, "B2", b2.to_vec()),
                        seg(2, "C2", c2.to_vec()),
                        seg(3, "B3+A2", xor(b3, a2)),
                    ],
                ]
            }
            Corner::S4 => {
                let (a2, b2) = x2.split_at(h);
                let (a3, b3) = x3.split_at(h);
                [
                    vec![seg(2, "A2+B2", xor(a2, b2))],
                    vec![seg(2, "A2", a2.to_vec()), seg(3, "A3+B2", xor(a3, b2))],
                    vec![seg(2, "B2", b2.to_vec()), seg(3, "B3+A2^1", xor(b3, &a2[..l3 - h]))],
                ]
            }
            Corner::T4 => {
                let (a2, b2, c2) = (&x2[..l3], &x2[l3..2 * l3], &x2[2 * l3..]);
                [
                    vec![seg(2, "A2+B2", xor(a2, b2))],
                    vec![
                        seg(2, "A2", a2.to_vec()),
                        seg(2, "C2", c2.to_vec()),
                        seg(3, "X3+B2", xor(x3, b2)),
                    ],
                    vec![seg(2, "B2", b2.to_vec()), seg(2, "C2", c2.to_vec())],
                ]
            }
            Corner::S10 => {
                let (a2, b2) = x2.split_at(h);
                [
                    vec![seg(2, "A2+B2", xor(a2, b2))],
                    vec![seg(2, "A2", a2.to_vec()), seg(3, "X3+B2^1", xor(x3, &b2[..l3]))],
                    vec![seg(2, "B2", b2.to_vec())],
                ]
            }
        }
    }
}

fn xor(a: &[Symbol], b: &[Symbol]) -> SymbolSeq {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Corner {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        Corner::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| SchemeError::WrongScheme(format!("unknown corner {s:?}")))
    }
}

/// A corner scheme with its outputs relabelled: encoder `i` emits the
/// base scheme's `W_{perm[i]}`. Relabelling reaches the symmetric corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CornerScheme {
    pub corner: Corner,
    pub perm: [usize; 3],
}

impl From<Corner> for CornerScheme {
    fn from(corner: Corner) -> Self {
        CornerScheme {
            corner,
            perm: [0, 1, 2],
        }
    }
}

impl CornerScheme {
    pub fn permuted(corner: Corner, perm: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return Err(SchemeError::WrongScheme(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(CornerScheme { corner, perm })
    }

    /// All six relabellings.
    pub fn all_permutations(corner: Corner) -> Vec<CornerScheme> {
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
            .into_iter()
            .map(|perm| CornerScheme { corner, perm })
            .collect()
    }

    pub(crate) fn check(&self, p: &SourceProfile) -> Result<()> {
        if p.encoders != 3 || p.s != 2 || p.field.order() != 2 || p.mode != Mode::Mss {
            return Err(SchemeError::CornerUnavailable {
                corner: self.corner,
                reason: "corner schemes are binary (3, 2) multilevel secret sharing schemes".into(),
            });
        }
        self.corner
            .conditions(p.lengths[1], p.lengths[2])
            .map_err(|reason| SchemeError::CornerUnavailable {
                corner: self.corner,
                reason,
            })
    }

    pub fn key_len(&self, l2: usize, l3: usize) -> usize {
        self.corner.key_len(l2, l3)
    }

    pub fn rates(&self, l2: usize, l3: usize) -> [usize; 3] {
        let r = self.corner.rates(l2, l3);
        self.perm.map(|i| r[i])
    }

    pub(crate) fn encode(&self, x2: &[Symbol], x3: &[Symbol], key: &[Symbol]) -> Result<Vec<Vec<Segment>>> {
        if let Err(reason) = self.corner.conditions(x2.len(), x3.len()) {
            return Err(SchemeError::CornerUnavailable {
                corner: self.corner,
                reason,
            });
        }
        let w = self.corner.encode(x2, x3, key);
        Ok(self.perm.iter().map(|&i| w[i].clone()).collect())
    }
}

impl fmt::Display for CornerScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.corner)?;
        if self.perm != [0, 1, 2] {
            write!(f, ":{}{}{}", self.perm[0] + 1, self.perm[1] + 1, self.perm[2] + 1)?;
        }
        Ok(())
    }
}

impl FromStr for CornerScheme {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, perm) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let corner: Corner = name.parse()?;
        let Some(p) = perm else {
            return Ok(corner.into());
        };
        let digits: Vec<usize> = p
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).unwrap_or(0))
            .collect();
        if digits.len() != 3 || digits.contains(&0) {
            return Err(SchemeError::WrongScheme(format!("bad permutation {p:?}")));
        }
        Self::permuted(corner, [digits[0] - 1, digits[1] - 1, digits[2] - 1])
    }
}
