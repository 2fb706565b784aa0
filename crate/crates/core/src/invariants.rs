//! The Bowen–Franks group together with `det(I - A)`, which classify
//! irreducible non-permutation shifts up to flow equivalence, and the K₀ group
//! with the class of the unit.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::linalg::{cokernel, det, AbelianGroup};
use crate::shift::MarkovShift;

/// `(coker(I - A), det(I - A))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlowInvariant {
    pub bf: AbelianGroup,
    pub det_value: BigInt,
}

/// `coker(I - Aᵗ)` and the coordinates of the class of `(1, ..., 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Class {
    pub group: AbelianGroup,
    pub unit: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowComparison {
    pub left: FlowInvariant,
    pub right: FlowInvariant,
    pub bf_match: bool,
    pub det_match: bool,
}

impl FlowComparison {
    pub fn equivalent(&self) -> bool {
        self.bf_match && self.det_match
    }
}

/// Bowen–Franks group `Z^N / (I - A) Z^N`.
pub fn bowen_franks(shift: &MarkovShift) -> Result<AbelianGroup> {
    let (group, _) = cokernel(&shift.matrix().identity_minus()?);
    Ok(group)
}

/// `det(I - A)`.
pub fn det_invariant(shift: &MarkovShift) -> Result<BigInt> {
    det(&shift.matrix().identity_minus()?)
}

pub fn flow_invariant(shift: &MarkovShift) -> Result<FlowInvariant> {
    let inv = FlowInvariant {
        bf: bowen_franks(shift)?,
        det_value: det_invariant(shift)?,
    };
    debug_assert!(match inv.bf.order() {
        Some(order) => order == inv.det_value.abs(),
        None => inv.det_value.is_zero(),
    });
    Ok(inv)
}

/// Decides flow equivalence: isomorphic Bowen–Franks groups and equal
/// determinants. For irreducible non-permutation matrices this is also
/// relative Morita equivalence of the Cuntz–Krieger pairs.
pub fn flow_equivalent(a: &MarkovShift, b: &MarkovShift) -> Result<(bool, FlowComparison)> {
    let left = flow_invariant(a)?;
    let right = flow_invariant(b)?;
    let cmp = FlowComparison {
        bf_match: left.bf == right.bf,
        det_match: left.det_value == right.det_value,
        left,
        right,
    };
    Ok((cmp.equivalent(), cmp))
}

/// K₀ of the Cuntz–Krieger algebra as `coker(I - Aᵗ)`, with the unit class
/// `[1]` of the all-ones vector.
///
/// The all-ones vector represents the unit for edge-weighted matrices too:
/// in the edge algebra the vertex classes `Σ_{s(e)=v} [S_e S_e*]` satisfy the
/// same relations as the vertex generators of a 0-1 matrix.
pub fn k0_with_unit(shift: &MarkovShift) -> Result<K0Class> {
    let m = shift.matrix().transpose().identity_minus()?;
    let (group, map) = cokernel(&m);
    let ones = vec![BigInt::from(1); shift.size()];
    let unit = map.coordinates(&ones)?;
    Ok(K0Class { group, unit })
}
