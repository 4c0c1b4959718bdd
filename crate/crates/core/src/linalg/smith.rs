//! Smith normal form with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `left * original * right` is the diagonal matrix carrying `diag`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// d_1 | d_2 | ... over min(rows, cols) entries, nonnegative, zeros at the tail.
    pub diag: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }

    /// The diagonal embedded in a matrix of the original shape.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(self.left.rows(), self.right.cols(), &self.diag)
    }
}

/// Position of a nonzero entry of least absolute value in the block `[t.., t..]`.
fn min_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            let abs = v.abs();
            if best.as_ref().is_none_or(|(_, _, b)| abs < *b) {
                let unit = abs == BigInt::from(1);
                best = Some((i, j, abs));
                if unit {
                    return best.map(|(i, j, _)| (i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smith normal form of an arbitrary (possibly empty or rectangular) integer matrix.
///
/// Pivots on the entry of least absolute value in the remaining block, which keeps
/// intermediate coefficients small for the matrices produced in this crate.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        while let Some((pi, pj)) = min_pivot(&a, t) {
            a.swap_rows(t, pi);
            left.swap_rows(t, pi);
            a.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let pivot = a[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&pivot);
                a.row_axpy(i, t, &q);
                left.row_axpy(i, t, &q);
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&pivot);
                a.col_axpy(j, t, &q);
                right.col_axpy(j, t, &q);
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                // a smaller remainder now sits in the pivot row or column
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    // row t += row i, then the next pass produces a smaller pivot
                    let minus_one = BigInt::from(-1);
                    a.row_axpy(t, i, &minus_one);
                    left.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
    }

    let diag = (0..rows.min(cols)).map(|i| a[(i, i)].clone()).collect();
    SmithForm { diag, left, right }
}
