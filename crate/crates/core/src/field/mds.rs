use super::{Field, FieldError, FieldMatrix, Symbol, SymbolSeq};

/// An `(L, alpha)` MDS code whose generator is the `alpha x L` Vandermonde
/// matrix with entry `(r, j) = b_j^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsCodebook {
    field: Field,
    alpha: usize,
    points: Vec<Symbol>,
    generator: FieldMatrix,
}

impl MdsCodebook {
    pub fn vandermonde(alpha: usize, points: &[Symbol], field: Field) -> Result<Self, FieldError> {
        let len = points.len();
        if alpha == 0 || alpha > len {
            return Err(FieldError::DegenerateCode(format!(
                "need 1 <= alpha <= L, got alpha = {alpha}, L = {len}"
            )));
        }
        if let Some(&p) = points.iter().find(|&&p| !field.contains(p)) {
            return Err(FieldError::DegenerateCode(format!(
                "point {p} is not an element of GF({})",
                field.order()
            )));
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].contains(a) {
                return Err(FieldError::DegenerateCode(format!("duplicate evaluation point {a}")));
            }
        }
        let mut generator = FieldMatrix::zeros(alpha, len);
        for (j, &b) in points.iter().enumerate() {
            for r in 0..alpha {
                generator.set(r, j, field.pow(b, r as u32));
            }
        }
        Ok(MdsCodebook {
            field,
            alpha,
            points: points.to_vec(),
            generator,
        })
    }

    /// The codebook every scheme uses: points `b_j = j` for `j = 1..=L`.
    pub fn standard(alpha: usize, encoders: usize, field: Field) -> Result<Self, FieldError> {
        if encoders as u32 >= field.order() {
            return Err(FieldError::DegenerateCode(format!(
                "GF({}) has fewer than {encoders} nonzero points",
                field.order()
            )));
        }
        let points: Vec<Symbol> = (1..=encoders as Symbol).collect();
        Self::vandermonde(alpha, &points, field)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Symbol] {
        &self.points
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.generator
    }

    /// Generator entry `b_share^row`.
    #[inline]
    pub fn coefficient(&self, row: usize, share: usize) -> Symbol {
        self.generator.get(row, share)
    }

    /// `(Y^1..Y^L) = (X^1..X^alpha) * V`, applied symbolwise.
    pub fn encode(&self, stripes: &[SymbolSeq]) -> Result<Vec<SymbolSeq>, FieldError> {
        let width = self.stripe_width(stripes)?;
        let f = &self.field;
        Ok((0..self.len())
            .map(|j| {
                let mut share = vec![0; width];
                for (r, stripe) in stripes.iter().enumerate() {
                    f.axpy(&mut share, self.coefficient(r, j), stripe);
                }
                share
            })
            .collect())
    }

    /// Recovers the message from any `alpha` or more shares (0-based indices).
    /// Extra shares are checked for consistency.
    pub fn decode(&self, shares: &[(usize, &[Symbol])]) -> Result<Vec<SymbolSeq>, FieldError> {
        let mut distinct: Vec<(usize, &[Symbol])> = Vec::new();
        for &(j, s) in shares {
            if j >= self.len() {
                return Err(FieldError::ShapeError(format!("share index {j} out of range")));
            }
            match distinct.iter().find(|(k, _)| *k == j) {
                Some((_, prev)) if *prev != s => return Err(FieldError::CorruptShare),
                Some(_) => {}
                None => distinct.push((j, s)),
            }
        }
        if distinct.len() < self.alpha {
            return Err(FieldError::InsufficientShares {
                needed: self.alpha,
                got: distinct.len(),
            });
        }
        distinct.sort_by_key(|(j, _)| *j);
        let width = distinct[0].1.len();
        if distinct.iter().any(|(_, s)| s.len() != width) {
            return Err(FieldError::ShapeError("shares differ in length".into()));
        }

        let (basis, extra) = distinct.split_at(self.alpha);
        let cols: Vec<usize> = basis.iter().map(|(j, _)| *j).collect();
        let inverse = self.inverse_of_columns(&cols)?;
        let f = &self.field;

        // m_r = sum_j inverse[r][j] * y_j
        let message: Vec<SymbolSeq> = (0..self.alpha)
            .map(|r| {
                let mut stripe = vec![0; width];
                for (k, (_, y)) in basis.iter().enumerate() {
                    f.axpy(&mut stripe, inverse.get(r, k), y);
                }
                stripe
            })
            .collect();

        for &(j, y) in extra {
            let mut expect = vec![0; width];
            for (r, stripe) in message.iter().enumerate() {
                f.axpy(&mut expect, self.coefficient(r, j), stripe);
            }
            if expect != y {
                return Err(FieldError::CorruptShare);
            }
        }
        Ok(message)
    }

    /// Inverse of the transposed `alpha x alpha` generator submatrix on `cols`,
    /// i.e. the map from those shares back to the message symbols.
    fn inverse_of_columns(&self, cols: &[usize]) -> Result<FieldMatrix, FieldError> {
        let n = cols.len();
        let sub = self.generator.select_columns(cols).transpose();
        let mut aug = FieldMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, sub.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let pivots = aug.rref(&self.field);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(FieldError::DegenerateCode("singular column submatrix".into()));
        }
        let mut inv = FieldMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(inv)
    }

    fn stripe_width(&self, stripes: &[SymbolSeq]) -> Result<usize, FieldError> {
        if stripes.len() != self.alpha {
            return Err(FieldError::ShapeError(format!(
                "expected {} message stripes, got {}",
                self.alpha,
                stripes.len()
            )));
        }
        let width = stripes[0].len();
        if stripes.iter().any(|s| s.len() != width) {
            return Err(FieldError::ShapeError("message stripes differ in length".into()));
        }
        Ok(width)
    }
}
