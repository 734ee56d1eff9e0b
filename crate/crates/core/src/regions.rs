//! Rate regions as exact rational inequality systems.
//!
//! Every region here is a polyhedron `{R : a·R >= b for each row}` whose
//! rows have nonnegative coefficients, so its recession cone is the
//! nonnegative orthant. Membership is decided with exact rationals; corner
//! enumeration is provided for the three-encoder regions only.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = Rational64;

/// Per-encoder rates `(R_1, .., R_L)`.
pub type RateTuple = Vec<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("{0} is outside the domain {{1, 2, 3}}")]
    DomainError(u8),
    #[error("entropy profile is degenerate: {0}")]
    DegenerateProfile(String),
    #[error("dimension mismatch: region has {expected} rates, got {got}")]
    ShapeError { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Which problem a sum-rate bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Multilevel secret sharing: sources `X_1..X_{s-1}` are empty.
    Mss,
    /// Sliding secure SMDC: all `L` sources present.
    Sliding,
}

/// One row `coeffs · R >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    /// Which family of constraints the row belongs to.
    pub tag: String,
}

impl Inequality {
    pub fn holds(&self, r: &[Rational]) -> bool {
        dot(&self.coeffs, r) >= self.rhs
    }

    fn is_tight(&self, r: &[Rational]) -> bool {
        dot(&self.coeffs, r) == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub dim: usize,
    pub label: String,
    pub rows: Vec<Inequality>,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn half(x: Rational) -> Rational {
    x / int(2)
}

impl RegionSpec {
    fn new(dim: usize, label: impl Into<String>) -> Self {
        let mut reg = RegionSpec {
            dim,
            label: label.into(),
            rows: Vec::new(),
        };
        for i in 0..dim {
            reg.push_sparse(&[(i, 1)], Rational::zero(), "nonnegativity");
        }
        reg
    }

    fn push_sparse(&mut self, terms: &[(usize, i64)], rhs: Rational, tag: &str) {
        let mut coeffs = vec![Rational::zero(); self.dim];
        for &(i, c) in terms {
            coeffs[i] += int(c);
        }
        self.rows.push(Inequality {
            coeffs,
            rhs,
            tag: tag.to_string(),
        });
    }

    pub fn member(&self, r: &[Rational]) -> Result<bool, RegionError> {
        if r.len() != self.dim {
            return Err(RegionError::ShapeError {
                expected: self.dim,
                got: r.len(),
            });
        }
        Ok(self.rows.iter().all(|row| row.holds(r)))
    }

    /// The first row `r` violates, if any.
    pub fn violated_row(&self, r: &[Rational]) -> Option<&Inequality> {
        self.rows.iter().find(|row| !row.holds(r))
    }

    /// Rows satisfied with equality at `r`.
    pub fn tight_rows(&self, r: &[Rational]) -> Vec<&Inequality> {
        self.rows.iter().filter(|row| row.is_tight(r)).collect()
    }
}

/// Free-function form of [`RegionSpec::member`].
pub fn member(reg: &RegionSpec, r: &[Rational]) -> Result<bool, RegionError> {
    reg.member(r)
}

/// `[x]^+`
pub fn pos_part(x: Rational) -> Rational {
    if x.is_positive() {
        x
    } else {
        Rational::zero()
    }
}

/// Cyclic addition on `{1, 2, 3}`.
pub fn odot(x: u8, y: u8) -> Result<u8, RegionError> {
    for v in [x, y] {
        if !(1..=3).contains(&v) {
            return Err(RegionError::DomainError(v));
        }
    }
    let s = x + y;
    Ok(if s <= 3 { s } else { s - 3 })
}

/// `m = max(H2, H2/2 + H3)`
pub fn m_value(h2: Rational, h3: Rational) -> Rational {
    h2.max(half(h2) + h3)
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

/// `R(L, k, H)`: every `k` encoders together carry at least `H`.
pub fn region_rss(encoders: usize, k: usize, h: Rational) -> RegionSpec {
    assert!(k >= 1 && k <= encoders, "need 1 <= k <= L");
    let mut reg = RegionSpec::new(encoders, format!("R({encoders},{k},{h})"));
    for set in subsets(encoders, k) {
        let terms: Vec<(usize, i64)> = set.iter().map(|&i| (i, 1)).collect();
        reg.push_sparse(&terms, h, "subset-sum");
    }
    reg
}

/// Superposition region of the `(L, 1)` problem: `R_i >= sum H_alpha`.
pub fn region_sup1(encoders: usize, entropies: &[Rational]) -> RegionSpec {
    let total: Rational = entropies.iter().sum();
    let mut reg = RegionSpec::new(encoders, "R_sup^1");
    if !total.is_zero() {
        for i in 0..encoders {
            reg.push_sparse(&[(i, 1)], total, "sum-entropy");
        }
    }
    reg
}

/// Superposition region of the `(L, s)` multilevel secret sharing problem,
/// `R(L, s, sum_{alpha >= s} H_alpha)`.
pub fn region_sup2(encoders: usize, s: usize, entropies: &[Rational]) -> RegionSpec {
    let total: Rational = entropies.iter().skip(s - 1).sum();
    let mut reg = region_rss(encoders, s, total);
    reg.label = "R_sup^2".into();
    reg
}

/// Appends the `(3,2)` rows with `H2`, `H3` offset by the constant
/// contributed by `X_1` (zero for the multilevel secret sharing region).
fn push_mss32_rows(reg: &mut RegionSpec, h1: Rational, h2: Rational, h3: Rational) {
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                reg.push_sparse(&[(i, 2), (j, 1)], int(3) * h1 + h2 + h3, "2Ri+Rj");
            }
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        reg.push_sparse(&[(i, 1), (j, 1)], int(2) * h1 + half(h2) + h3, "Ri+Rj-secret");
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        reg.push_sparse(&[(i, 1), (j, 1)], int(2) * h1 + h2, "Ri+Rj-smdc");
    }
    reg.push_sparse(&[(0, 1), (1, 1), (2, 1)], int(3) * h1 + int(3) * half(h2) + h3, "sum");
    for i in 1..=3u8 {
        let a = odot(i, 1).unwrap();
        let b = odot(i, 2).unwrap();
        reg.push_sparse(
            &[(i as usize - 1, 2), (a as usize - 1, 1), (b as usize - 1, 1)],
            int(4) * h1 + int(2) * h2 + h3,
            "2Ri+Ri⊙1+Ri⊙2",
        );
    }
}

/// The `(3,2)` multilevel secret sharing region.
pub fn region_mss32(h2: Rational, h3: Rational) -> RegionSpec {
    let mut reg = RegionSpec::new(3, "R_1*");
    push_mss32_rows(&mut reg, Rational::zero(), h2, h3);
    reg
}

/// The `(3,2)` sliding secure SMDC region.
pub fn region_smdc32(h1: Rational, h2: Rational, h3: Rational) -> RegionSpec {
    let mut reg = RegionSpec::new(3, "R_2*");
    for i in 0..3 {
        reg.push_sparse(&[(i, 1)], h1, "Ri>=H1");
    }
    push_mss32_rows(&mut reg, h1, h2, h3);
    reg
}

/// The four shapes the `(3,2)` multilevel secret sharing region takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mss32Case {
    /// `H2 < 2/3 H3`
    I,
    /// `2/3 H3 <= H2 < H3`
    Ii,
    /// `H3 <= H2 < 2 H3`
    Iii,
    /// `2 H3 <= H2`
    Iv,
}

pub fn mss32_case(h2: Rational, h3: Rational) -> Result<Mss32Case, RegionError> {
    if h2.is_negative() || h3.is_negative() {
        return Err(RegionError::DegenerateProfile("negative entropy".into()));
    }
    if h2.is_zero() && h3.is_zero() {
        return Err(RegionError::DegenerateProfile("H2 = H3 = 0".into()));
    }
    let case = if h2 < int(2) * h3 / int(3) {
        Mss32Case::I
    } else if h2 < h3 {
        Mss32Case::Ii
    } else if h2 < int(2) * h3 {
        Mss32Case::Iii
    } else {
        Mss32Case::Iv
    };
    Ok(case)
}

fn check_mss_profile(s: usize, entropies: &[Rational]) -> Result<(), RegionError> {
    if s == 0 || s > entropies.len() {
        return Err(RegionError::DegenerateProfile(format!(
            "need 1 <= s <= L, got s = {s}, L = {}",
            entropies.len()
        )));
    }
    if entropies[..s - 1].iter().any(|h| !h.is_zero()) {
        return Err(RegionError::DegenerateProfile(
            "multilevel secret sharing needs H_1..H_{s-1} = 0".into(),
        ));
    }
    Ok(())
}

/// Minimum sum rate `sum_alpha (L/alpha) H_alpha`; the sum runs over
/// `alpha = s..L` for [`Mode::Mss`] and `alpha = 1..L` for [`Mode::Sliding`].
pub fn min_sum_rate(s: usize, entropies: &[Rational], mode: Mode) -> Result<Rational, RegionError> {
    let l = entropies.len() as i64;
    let first = match mode {
        Mode::Mss => {
            check_mss_profile(s, entropies)?;
            s
        }
        Mode::Sliding => 1,
    };
    Ok((first..=entropies.len())
        .map(|a| int(l) / int(a as i64) * entropies[a - 1])
        .sum())
}

/// Sum-rate bound of the superposition region where each source is coded on
/// its own.
pub fn sup_sum_rate(s: usize, entropies: &[Rational], mode: Mode) -> Result<Rational, RegionError> {
    let l = int(entropies.len() as i64);
    if mode == Mode::Mss {
        check_mss_profile(s, entropies)?;
    }
    Ok(entropies
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let a = i as i64 + 1;
            if (a as usize) < s {
                l / int(a) * h
            } else {
                l / int(s as i64) * h
            }
        })
        .sum())
}

fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// All extreme points of a three-dimensional region.
///
/// Each triple of rows with linearly independent normals is intersected;
/// the intersection point is kept when it satisfies every row.
pub fn corners3(reg: &RegionSpec) -> Result<Vec<RateTuple>, RegionError> {
    if reg.dim != 3 {
        return Err(RegionError::Unsupported(format!(
            "corner enumeration needs 3 rates, region has {}",
            reg.dim
        )));
    }
    let rows = &reg.rows;
    let mut out: Vec<RateTuple> = Vec::new();
    for set in subsets(rows.len(), 3) {
        let a: [[Rational; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| rows[set[r]].coeffs[c]));
        let b: [Rational; 3] = std::array::from_fn(|r| rows[set[r]].rhs);
        let d = det3(&a);
        if d.is_zero() {
            continue;
        }
        // Cramer's rule
        let point: RateTuple = (0..3)
            .map(|c| {
                let mut m = a;
                for r in 0..3 {
                    m[r][c] = b[r];
                }
                det3(&m) / d
            })
            .collect();
        if reg.rows.iter().all(|row| row.holds(&point)) {
            out.push(point);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub contained: bool,
    /// A corner of the inner region that lies outside the outer one.
    pub witness: Option<RateTuple>,
}

/// Whether `inner ⊆ outer`, for three-dimensional regions whose recession
/// cone is the nonnegative orthant: it suffices that every corner of
/// `inner` satisfies every row of `outer`.
pub fn contains3(outer: &RegionSpec, inner: &RegionSpec) -> Result<Containment, RegionError> {
    if outer.dim != 3 || inner.dim != 3 {
        return Err(RegionError::Unsupported(
            "containment is decided for 3 rates only".into(),
        ));
    }
    for reg in [outer, inner] {
        if reg.rows.iter().any(|r| r.coeffs.iter().any(|c| c.is_negative())) {
            return Err(RegionError::Unsupported(format!(
                "{} has a row with a negative coefficient",
                reg.label
            )));
        }
    }
    let witness = corners3(inner)?
        .into_iter()
        .find(|c| !outer.rows.iter().all(|row| row.holds(c)));
    Ok(Containment {
        contained: witness.is_none(),
        witness,
    })
}

/// Parses `"3"`, `"-2"`, `"1/2"` or a finite decimal like `"0.4"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        return (d != 0).then(|| Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
            return None;
        }
        let neg = whole.starts_with('-');
        let w: i64 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().ok()?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().ok()?;
        let mag = w.abs() * den + f;
        return Some(Rational::new(if neg { -mag } else { mag }, den));
    }
    s.parse::<i64>().ok().map(int)
}

/// `a/b` for fractions, `a` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn t(v: [(i64, i64); 3]) -> RateTuple {
        v.iter().map(|&(n, d)| r(n, d)).collect()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn pos_part_examples() {
        assert_eq!(pos_part(int(3)), int(3));
        assert_eq!(pos_part(int(-2)), int(0));
        assert_eq!(pos_part(int(0)), int(0));
    }

    #[test]
    fn odot_examples() {
        assert_eq!(odot(1, 2), Ok(3));
        assert_eq!(odot(2, 2), Ok(1));
        assert_eq!(odot(3, 3), Ok(3));
        assert_eq!(odot(0, 1), Err(RegionError::DomainError(0)));
        assert_eq!(odot(1, 4), Err(RegionError::DomainError(4)));
    }

    #[test]
    fn m_value_examples() {
        assert_eq!(m_value(int(1), int(1)), r(3, 2));
        assert_eq!(m_value(int(2), int(0)), int(2));
        assert_eq!(m_value(int(4), int(1)), int(4));
    }

    #[test]
    fn rss_rows() {
        let reg = region_rss(3, 2, int(1));
        let sums: Vec<_> = reg.rows.iter().filter(|x| x.tag == "subset-sum").collect();
        assert_eq!(sums.len(), 3);
        assert_eq!(sums[0].coeffs, ints(&[1, 1, 0]));
        assert_eq!(sums[2].coeffs, ints(&[0, 1, 1]));
        assert_eq!(region_rss(3, 3, int(1)).rows.len(), 4);
        let single = region_rss(4, 1, int(2));
        assert!(single.member(&ints(&[2, 2, 2, 2])).unwrap());
        assert!(!single.member(&ints(&[2, 2, 1, 2])).unwrap());
    }

    #[test]
    fn sup1_rows() {
        let reg = region_sup1(2, &ints(&[1, 1]));
        assert!(reg.member(&ints(&[2, 2])).unwrap());
        assert!(!reg.member(&[int(2), r(3, 2)]).unwrap());
        assert_eq!(region_sup1(3, &ints(&[0, 0, 0])).rows.len(), 3);
        let reg = region_sup1(3, &ints(&[1, 2, 3]));
        assert!(reg.member(&ints(&[6, 6, 6])).unwrap());
        assert!(!reg.member(&ints(&[6, 5, 6])).unwrap());
    }

    #[test]
    fn mss32_membership() {
        let reg = region_mss32(int(1), int(1));
        // 3 nonnegativity + 6 + 3 + 3 + 1 + 3
        assert_eq!(reg.rows.len(), 19);
        assert!(reg.member(&ints(&[0, 2, 2])).unwrap());
        let p = [r(2, 5), int(1), int(1)];
        assert!(!reg.member(&p).unwrap());
        assert_eq!(reg.violated_row(&p).unwrap().coeffs, ints(&[2, 1, 0]));
        assert!(matches!(
            reg.member(&ints(&[1, 1])),
            Err(RegionError::ShapeError { .. })
        ));

        let orthant = region_mss32(int(0), int(0));
        assert_eq!(corners3(&orthant).unwrap(), vec![ints(&[0, 0, 0])]);
    }

    #[test]
    fn mss32_odot_rows() {
        let reg = region_mss32(int(1), int(1));
        let rows: Vec<_> = reg.rows.iter().filter(|x| x.tag.starts_with("2Ri+Ri⊙")).collect();
        assert_eq!(rows[0].coeffs, ints(&[2, 1, 1]));
        assert_eq!(rows[1].coeffs, ints(&[1, 2, 1]));
        assert_eq!(rows[2].coeffs, ints(&[1, 1, 2]));
    }

    #[test]
    fn case_split() {
        assert_eq!(mss32_case(int(1), int(3)), Ok(Mss32Case::I));
        assert_eq!(mss32_case(int(1), int(1)), Ok(Mss32Case::Iii));
        assert_eq!(mss32_case(int(4), int(1)), Ok(Mss32Case::Iv));
        assert_eq!(mss32_case(r(2, 3), int(1)), Ok(Mss32Case::Ii));
        assert_eq!(mss32_case(int(2), int(1)), Ok(Mss32Case::Iv));
        assert!(matches!(
            mss32_case(int(0), int(0)),
            Err(RegionError::DegenerateProfile(_))
        ));
    }

    #[test]
    fn smdc32_reduces_to_mss32() {
        let a = region_smdc32(int(0), int(2), int(3));
        let b = region_mss32(int(2), int(3));
        for row in &b.rows {
            assert!(a.rows.contains(row));
        }
        let reg = region_smdc32(int(1), int(1), int(1));
        assert!(reg.member(&ints(&[1, 3, 3])).unwrap());
        let only_h1 = region_smdc32(int(1), int(0), int(0));
        assert_eq!(corners3(&only_h1).unwrap(), vec![ints(&[1, 1, 1])]);
    }

    #[test]
    fn sum_rate_examples() {
        assert_eq!(min_sum_rate(2, &ints(&[0, 2, 3]), Mode::Mss), Ok(int(6)));
        assert_eq!(min_sum_rate(2, &ints(&[1, 2, 3]), Mode::Sliding), Ok(int(9)));
        assert_eq!(min_sum_rate(4, &ints(&[0, 0, 0, 4]), Mode::Mss), Ok(int(4)));
        assert!(min_sum_rate(2, &ints(&[1, 2, 3]), Mode::Mss).is_err());

        assert_eq!(sup_sum_rate(2, &ints(&[0, 2, 3]), Mode::Mss), Ok(r(15, 2)));
        assert_eq!(sup_sum_rate(2, &ints(&[1, 2, 3]), Mode::Sliding), Ok(r(21, 2)));
        let h = ints(&[0, 0, 0, 5]);
        assert_eq!(sup_sum_rate(4, &h, Mode::Mss), min_sum_rate(4, &h, Mode::Mss));
    }

    #[test]
    fn corner_examples() {
        let c = corners3(&region_mss32(int(1), int(1))).unwrap();
        for p in [
            t([(1, 2), (1, 1), (1, 1)]),
            t([(1, 1), (1, 1), (1, 2)]),
            t([(0, 1), (2, 1), (2, 1)]),
        ] {
            assert!(c.contains(&p), "missing {p:?}");
        }
        let c = corners3(&region_rss(3, 2, int(1))).unwrap();
        assert_eq!(
            c,
            vec![
                t([(0, 1), (1, 1), (1, 1)]),
                t([(1, 2), (1, 2), (1, 2)]),
                t([(1, 1), (0, 1), (1, 1)]),
                t([(1, 1), (1, 1), (0, 1)]),
            ]
        );
        assert!(corners3(&region_rss(4, 2, int(1))).is_err());
    }

    #[test]
    fn containment_examples() {
        let mss = region_mss32(int(1), int(1));
        let sup = region_rss(3, 2, int(2));
        assert!(contains3(&mss, &sup).unwrap().contained);
        let rev = contains3(&sup, &mss).unwrap();
        assert!(!rev.contained);
        // every uncovered corner is of the (1/2, 1, 1) family
        let w = rev.witness.unwrap();
        assert!(w.contains(&r(1, 2)));
        assert!(contains3(&mss, &mss).unwrap().contained);
        assert!(contains3(&region_rss(4, 2, int(1)), &mss).is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/2"), Some(r(1, 2)));
        assert_eq!(parse_rational(" 3 "), Some(int(3)));
        assert_eq!(parse_rational("0.4"), Some(r(2, 5)));
        assert_eq!(parse_rational("-1.25"), Some(r(-5, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&r(7, 10)), "7/10");
        assert_eq!(format_rational(&int(4)), "4");
    }
}
