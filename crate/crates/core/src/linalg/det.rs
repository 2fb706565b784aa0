use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::IntMatrix;
use crate::error::Result;

/// Exact determinant. Cofactor expansion below 4x4, fraction-free Bareiss
/// elimination otherwise.
pub fn det(m: &IntMatrix) -> Result<BigInt> {
    m.ensure_square()?;
    Ok(if m.rows() < 4 {
        cofactor(m)
    } else {
        bareiss(m)
    })
}

fn cofactor(m: &IntMatrix) -> BigInt {
    let e = |i, j| m.get(i, j);
    match m.rows() {
        1 => e(0, 0).clone(),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        _ => unreachable!("cofactor path is only used below 4x4"),
    }
}

pub(crate) fn bareiss(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    let mut a = m.row_vecs();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                // Bareiss: the division is exact.
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
