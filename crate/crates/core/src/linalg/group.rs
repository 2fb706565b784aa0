use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

/// Finitely generated abelian group `Z/d1 + ... + Z/dk + Z^r` in invariant
/// factor form: every `di >= 2` and `di | d(i+1)`.
///
/// Two values are isomorphic groups exactly when they compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    torsion: Vec<BigInt>,
    free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self {
            torsion: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        Self::from_orders(&[n.into()])
    }

    /// Builds the canonical form of `Z/n1 + Z/n2 + ...` for arbitrary orders.
    /// An order of 0 contributes a free summand; orders 1 and -1 vanish.
    pub fn from_orders(orders: &[BigInt]) -> Self {
        if orders.is_empty() {
            return Self::trivial();
        }
        let snf = smith_normal_form(&IntMatrix::diagonal(orders));
        Self::from_snf_diagonal(&snf.diagonal(), 0)
    }

    /// Canonical form from an SNF diagonal (already a divisibility chain).
    /// `extra_free` counts rows of the presentation beyond the diagonal.
    pub(crate) fn from_snf_diagonal(diag: &[BigInt], extra_free: usize) -> Self {
        let torsion = diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        let free_rank = diag.iter().filter(|d| d.is_zero()).count() + extra_free;
        Self { torsion, free_rank }
    }

    /// Accepts already-canonical data, rejecting anything that is not.
    pub fn from_invariant_factors(torsion: Vec<BigInt>, free_rank: usize) -> Result<Self> {
        for (i, d) in torsion.iter().enumerate() {
            if d < &BigInt::from(2) {
                return Err(Error::BadElement(format!(
                    "invariant factor {d} must be >= 2"
                )));
            }
            if let Some(next) = torsion.get(i + 1) {
                if !next.is_multiple_of(d) {
                    return Err(Error::BadElement(format!("{d} does not divide {next}")));
                }
            }
        }
        Ok(Self { torsion, free_rank })
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Number of coordinates used for an element (torsion then free).
    pub fn coordinate_len(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sends integer vectors to their class coordinates in `coker(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelMap {
    u: IntMatrix,
    torsion_rows: Vec<(usize, BigInt)>,
    free_rows: Vec<usize>,
}

impl CokernelMap {
    /// Coordinates of the class of `x`: `(u x)_i mod d_i` for each torsion
    /// factor, then the free coordinates. Equal classes give equal output.
    pub fn coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let ux = self.u.apply(x)?;
        let mut out: Vec<BigInt> = self
            .torsion_rows
            .iter()
            .map(|(i, d)| ux[*i].mod_floor(d))
            .collect();
        out.extend(self.free_rows.iter().map(|&i| ux[i].clone()));
        Ok(out)
    }

    pub fn ambient_dim(&self) -> usize {
        self.u.cols()
    }
}

/// `coker(m) = Z^rows / m Z^cols` with its coordinate map.
pub fn cokernel(m: &IntMatrix) -> (AbelianGroup, CokernelMap) {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let mut torsion_rows = Vec::new();
    let mut free_rows = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d.is_zero() {
            free_rows.push(i);
        } else if !d.is_one() {
            torsion_rows.push((i, d.abs()));
        }
    }
    free_rows.extend(diag.len()..m.rows());
    let group = AbelianGroup::from_snf_diagonal(&diag, m.rows() - diag.len());
    (
        group,
        CokernelMap {
            u: snf.u,
            torsion_rows,
            free_rows,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imat;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn golden_mean_cokernel_is_trivial() {
        let (g, _) = cokernel(&imat![[0, -1], [-1, 1]]);
        assert!(g.is_trivial());
    }

    #[test]
    fn cuntz_cokernel() {
        let (g, map) = cokernel(&imat![[1 - 4]]);
        assert_eq!(g, AbelianGroup::cyclic(3));
        assert_eq!(map.coordinates(&ints(&[1])).unwrap(), ints(&[1]));
    }

    #[test]
    fn zero_cokernel_is_free() {
        let (g, map) = cokernel(&imat![[0]]);
        assert_eq!(g.free_rank(), 1);
        assert!(g.torsion().is_empty());
        assert_eq!(map.coordinates(&ints(&[5])).unwrap(), ints(&[5]));
    }

    #[test]
    fn rectangular_extra_rows_are_free() {
        // Z^3 / <(2,0,0)> = Z/2 + Z^2
        let (g, _) = cokernel(&imat![[2], [0], [0]]);
        assert_eq!(g.to_string(), "Z/2 + Z^2");
    }

    #[test]
    fn coordinates_identify_classes() {
        let m = imat![[2, 1], [0, 4]];
        let (g, map) = cokernel(&m);
        assert_eq!(g, AbelianGroup::cyclic(8));
        // x and x + m*e_j lie in the same class
        let x = ints(&[3, -5]);
        for j in 0..2 {
            let shifted: Vec<BigInt> = (0..2).map(|i| &x[i] + m.get(i, j)).collect();
            assert_eq!(
                map.coordinates(&x).unwrap(),
                map.coordinates(&shifted).unwrap()
            );
        }
    }

    #[test]
    fn canonical_from_orders() {
        let g = AbelianGroup::from_orders(&ints(&[4, 6, 0, 1]));
        assert_eq!(g.torsion(), &ints(&[2, 12])[..]);
        assert_eq!(g.free_rank(), 1);
        assert_eq!(g.to_string(), "Z/2 + Z/12 + Z");
        assert_eq!(
            AbelianGroup::from_orders(&ints(&[2, 3])),
            AbelianGroup::cyclic(6)
        );
    }

    #[test]
    fn invariant_factor_validation() {
        assert!(AbelianGroup::from_invariant_factors(ints(&[2, 4]), 0).is_ok());
        assert!(AbelianGroup::from_invariant_factors(ints(&[1]), 0).is_err());
        assert!(AbelianGroup::from_invariant_factors(ints(&[4, 6]), 0).is_err());
    }
}
