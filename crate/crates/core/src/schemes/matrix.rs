use super::{Result, SchemeError, SchemeInstance};
use crate::field::{Field, FieldMatrix, Symbol, SymbolSeq};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// Exact linear image of a scheme. Inputs are laid out as all source
/// symbols (`X_1` first) followed by all key symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearEncoderMatrix {
    pub field: Field,
    pub input_len: usize,
    /// `M_l`: one row per output symbol of encoder `l`.
    pub encoders: Vec<FieldMatrix>,
    /// `S_a`: one unit row per symbol of `X_a`.
    pub selectors: Vec<FieldMatrix>,
}

const SELF_CHECK_INPUTS: usize = 100;

/// Builds the matrices by encoding unit vectors, then checks the result
/// against the encoder on random inputs.
pub fn plan_matrix(inst: &SchemeInstance) -> Result<LinearEncoderMatrix> {
    let n = inst.input_len();
    let l = inst.encoders();
    let field = *inst.field();
    let rates = inst.declared_rates();
    let zero = inst.encode_flat(&vec![0; n])?;
    if zero.iter().any(|w| w.iter().any(|&v| v != 0)) {
        return Err(SchemeError::NonLinear("zero input gives nonzero output".into()));
    }
    let mut cols: Vec<FieldMatrix> = rates.iter().map(|&r| FieldMatrix::zeros(r, n)).collect();
    let mut e = vec![0; n];
    for j in 0..n {
        e[j] = 1;
        let w = inst.encode_flat(&e)?;
        e[j] = 0;
        for (m, wl) in cols.iter_mut().zip(&w) {
            for (r, &v) in wl.iter().enumerate() {
                m.set(r, j, v);
            }
        }
    }
    let mut selectors = Vec::with_capacity(l);
    let mut off = 0;
    for &len in &inst.profile.lengths {
        let mut s = FieldMatrix::zeros(len, n);
        for i in 0..len {
            s.set(i, off + i, 1);
        }
        off += len;
        selectors.push(s);
    }
    let mat = LinearEncoderMatrix {
        field,
        input_len: n,
        encoders: cols,
        selectors,
    };
    mat.self_check(inst, SELF_CHECK_INPUTS, 0x5eed)?;
    Ok(mat)
}

impl LinearEncoderMatrix {
    /// Outputs `M_l z` for every encoder.
    pub fn apply(&self, z: &[Symbol]) -> Vec<SymbolSeq> {
        self.encoders.iter().map(|m| m.mul_vec(&self.field, z)).collect()
    }

    /// Compares `apply` with the scheme's encoder on `count` random inputs.
    pub fn self_check(&self, inst: &SchemeInstance, count: usize, seed: u64) -> Result<()> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q = self.field.order();
        for _ in 0..count {
            let z: Vec<Symbol> = (0..self.input_len).map(|_| rng.gen_range(0..q) as Symbol).collect();
            if inst.encode_flat(&z)? != self.apply(&z) {
                return Err(SchemeError::NonLinear(format!(
                    "matrix disagrees with encoder at {z:?}"
                )));
            }
        }
        Ok(())
    }

    /// `M_U`, the rows of the encoders in `set` stacked in order.
    pub fn stack_encoders(&self, set: &[usize]) -> FieldMatrix {
        FieldMatrix::vstack(self.input_len, set.iter().map(|&l| &self.encoders[l]))
    }

    /// Stacked selectors of the 1-based levels `levels`.
    pub fn stack_selectors(&self, levels: impl IntoIterator<Item = usize>) -> FieldMatrix {
        let parts: Vec<&FieldMatrix> = levels.into_iter().map(|a| &self.selectors[a - 1]).collect();
        FieldMatrix::vstack(self.input_len, parts)
    }

    /// Recovers every source at levels `1..=a` that the shares determine,
    /// `a` being the number of shares; levels below the first reconstruction
    /// level may come back empty. Fails if a required level is not
    /// determined.
    pub fn decode(&self, shares: &[(usize, &[Symbol])]) -> Result<Vec<SymbolSeq>> {
        let set: Vec<usize> = shares.iter().map(|&(l, _)| l).collect();
        let w: Vec<Symbol> = shares.iter().flat_map(|&(_, w)| w.iter().copied()).collect();
        let m = self.stack_encoders(&set);
        let got = shares.len();
        let mut out = Vec::with_capacity(got);
        for a in 1..=got {
            let target = &self.selectors[a - 1];
            match solve_left(&m, target, &self.field) {
                Some(c) => out.push(c.mul_vec(&self.field, &w)),
                None => return Err(SchemeError::Undecodable { level: a }),
            }
        }
        Ok(out)
    }
}

/// `C` with `C * m = target`, if the rows of `target` lie in the row space of `m`.
pub(crate) fn solve_left(m: &FieldMatrix, target: &FieldMatrix, f: &Field) -> Option<FieldMatrix> {
    let r = m.rows();
    let n = m.cols();
    let t = target.rows();
    // [m^T | target^T], n x (r + t)
    let mut aug = FieldMatrix::zeros(n, r + t);
    for i in 0..n {
        for j in 0..r {
            aug.set(i, j, m.get(j, i));
        }
        for j in 0..t {
            aug.set(i, r + j, target.get(j, i));
        }
    }
    let pivots = aug.rref(f);
    if pivots.iter().any(|&p| p >= r) {
        return None;
    }
    let mut c = FieldMatrix::zeros(t, r);
    for (row, &p) in pivots.iter().enumerate() {
        for j in 0..t {
            c.set(j, p, aug.get(row, r + j));
        }
    }
    Some(c)
}
