use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `u * m * v = d` with unimodular `u`, `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal entries `d[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

/// Smith normal form by repeated pivoting on the entry of smallest absolute
/// value in the working submatrix (ties: lowest row, then lowest column).
///
/// Diagonal entries come out nonnegative with `d[i] | d[i+1]` and zeros last.
/// Signs are fixed by negating columns of `v`, so `u` only ever sees swaps and
/// elementary row additions.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = pivot(&a, t) else {
                return finish(a, u, v);
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = a.get(t, t).clone();
            let mut remainder_left = false;
            for i in t + 1..rows {
                let (q, r) = a.get(i, t).div_mod_floor(&p);
                if !q.is_zero() {
                    let neg = -q;
                    a.add_row_multiple(i, t, &neg);
                    u.add_row_multiple(i, t, &neg);
                }
                remainder_left |= !r.is_zero();
            }
            for j in t + 1..cols {
                let (q, r) = a.get(t, j).div_mod_floor(&p);
                if !q.is_zero() {
                    let neg = -q;
                    a.add_col_multiple(j, t, &neg);
                    v.add_col_multiple(j, t, &neg);
                }
                remainder_left |= !r.is_zero();
            }
            if remainder_left {
                // a smaller remainder now sits in row/column t; re-pivot on it
                continue;
            }

            let bad_row =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad_row {
                Some(i) => {
                    let one = BigInt::from(1);
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
    }
    finish(a, u, v)
}

fn pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let abs = x.abs();
            if best.as_ref().is_none_or(|(_, b)| abs < *b) {
                best = Some(((i, j), abs));
            }
        }
    }
    best.map(|(idx, _)| idx)
}

fn finish(mut a: IntMatrix, u: IntMatrix, mut v: IntMatrix) -> SnfResult {
    for t in 0..a.rows().min(a.cols()) {
        if a.get(t, t).is_negative() {
            a.negate_col(t);
            v.negate_col(t);
        }
    }
    SnfResult { d: a, u, v }
}
