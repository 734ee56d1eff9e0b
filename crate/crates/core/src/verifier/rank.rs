//! Rank oracle for linear encoders. For `z` uniform on GF(q)^N and linear
//! maps `S`, `M`: `I(Sz; Mz) = (rank S + rank M - rank [S; M]) log2 q`, and
//! `Sz` is a function of `Mz` iff `rank [M; S] = rank M`.

use crate::field::FieldMatrix;
use crate::schemes::LinearEncoderMatrix;

/// Whether `W_set` determines `X_1..X_alpha` (1-based `alpha`, 0-based `set`).
pub fn rank_check_lossless(mat: &LinearEncoderMatrix, set: &[usize], alpha: usize) -> bool {
    let m = mat.stack_encoders(set);
    let s = mat.stack_selectors(1..=alpha);
    let both = FieldMatrix::vstack(mat.input_len, [&m, &s]);
    both.rank(&mat.field) == m.rank(&mat.field)
}

/// Dimension of the dependence between `X_alpha` and `W_set`, in symbols.
pub fn dependent_dimension(mat: &LinearEncoderMatrix, set: &[usize], alpha: usize) -> usize {
    let f = &mat.field;
    let m = mat.stack_encoders(set);
    let s = &mat.selectors[alpha - 1];
    let both = FieldMatrix::vstack(mat.input_len, [s, &m]);
    s.rank(f) + m.rank(f) - both.rank(f)
}

/// Whether `X_alpha` is independent of `W_set`.
pub fn rank_check_secrecy(mat: &LinearEncoderMatrix, set: &[usize], alpha: usize) -> bool {
    dependent_dimension(mat, set, alpha) == 0
}

/// `I(X_alpha; W_set)` in bits.
pub fn rank_mutual_information_bits(mat: &LinearEncoderMatrix, set: &[usize], alpha: usize) -> f64 {
    dependent_dimension(mat, set, alpha) as f64 * (mat.field.order() as f64).log2()
}
