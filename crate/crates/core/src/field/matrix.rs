use super::{Field, FieldError, Symbol};
use serde::{Deserialize, Serialize};

/// Dense row-major matrix over GF(q). Entries are always reduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Symbol>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Symbol>) -> Result<Self, FieldError> {
        if entries.len() != rows * cols {
            return Err(FieldError::ShapeError(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(FieldMatrix { rows, cols, entries })
    }

    /// Builds a matrix from equal-length rows; `cols` disambiguates the empty case.
    pub fn from_rows<R: AsRef<[Symbol]>>(cols: usize, rows: &[R]) -> Result<Self, FieldError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(FieldError::ShapeError(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            entries.extend_from_slice(r);
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Symbol) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Symbol] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[Symbol]) {
        assert_eq!(row.len(), self.cols, "row length must match column count");
        self.entries.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Stacks matrices with a common column count on top of each other.
    pub fn vstack<'a, I>(cols: usize, parts: I) -> Self
    where
        I: IntoIterator<Item = &'a FieldMatrix>,
    {
        let mut out = Self::zeros(0, cols);
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.entries.extend_from_slice(&p.entries);
            out.rows += p.rows;
        }
        out
    }

    /// `M * v` for a column vector `v`.
    pub fn mul_vec(&self, f: &Field, v: &[Symbol]) -> Vec<Symbol> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let acc = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| acc + a as u64 * b as u64);
                f.reduce(acc)
            })
            .collect()
    }

    /// In-place reduced row-echelon form with leftmost-nonzero pivoting.
    /// Returns the pivot column of each nonzero row, in order.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            self.swap_rows(lead, p);
            let inv = f.inv(self.get(lead, c)).expect("pivot is nonzero");
            for k in 0..self.cols {
                let v = self.get(lead, k);
                self.set(lead, k, f.mul(v, inv));
            }
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let factor = self.get(r, c);
                if factor == 0 {
                    continue;
                }
                for k in c..self.cols {
                    let v = f.sub(self.get(r, k), f.mul(factor, self.get(lead, k)));
                    self.set(r, k, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().rref(f).len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.entries.swap(a * self.cols + k, b * self.cols + k);
        }
    }
}

/// Free-function form of [`FieldMatrix::rank`].
pub fn mat_rank(m: &FieldMatrix, f: &Field) -> usize {
    m.rank(f)
}
