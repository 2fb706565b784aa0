//! Automorphisms of finite abelian groups in invariant-factor coordinates,
//! the stabilizer of the unit class, and the Picard quotient
//! `Aut(K₀) / Aut₁(K₀)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::invariants::{k0_with_unit, K0Class};
use crate::linalg::{AbelianGroup, IntMatrix};
use crate::shift::MarkovShift;

/// Default cap on the number of automorphisms materialized.
pub const DEFAULT_AUT_LIMIT: usize = 1_000_000;

/// Groups larger than this are not enumerated element by element.
pub const MAX_ENUMERATED_ORDER: u64 = 1 << 22;

/// A finite abelian group `Z/d1 + ... + Z/dk` with machine-word factors,
/// elements addressed by mixed-radix index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    factors: Vec<u64>,
    order: u64,
}

impl FiniteGroup {
    pub fn new(g: &AbelianGroup) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InfiniteGroup {
                free_rank: g.free_rank(),
            });
        }
        let factors: Vec<u64> = g
            .torsion()
            .iter()
            .map(|d| {
                d.to_u64().ok_or_else(|| {
                    Error::ResourceLimit(format!("invariant factor {d} is too large"))
                })
            })
            .collect::<Result<_>>()?;
        let order = factors
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .filter(|&o| o <= MAX_ENUMERATED_ORDER)
            .ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "group {g} has more than {MAX_ENUMERATED_ORDER} elements"
                ))
            })?;
        Ok(Self { factors, order })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn encode(&self, x: &[u64]) -> usize {
        let mut idx = 0u64;
        for (xi, d) in x.iter().zip(&self.factors) {
            idx = idx * d + xi;
        }
        idx as usize
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut x = vec![0u64; self.factors.len()];
        for (xi, &d) in x.iter_mut().zip(&self.factors).rev() {
            *xi = idx as u64 % d;
            idx /= d as usize;
        }
        x
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), d)| ((*a as u128 + *b as u128) % *d as u128) as u64)
            .collect()
    }

    pub fn scale(&self, k: u64, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.factors)
            .map(|(a, d)| ((*a as u128 * k as u128) % *d as u128) as u64)
            .collect()
    }

    /// Order of an element: lcm of `d / gcd(x_i, d)`.
    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.factors)
            .fold(1u64, |acc, (&xi, &d)| acc.lcm(&(d / xi.gcd(&d))))
    }

    /// Reduces arbitrary integer coordinates into `[0, d_i)`.
    pub fn reduce(&self, x: &[BigInt]) -> Result<Vec<u64>> {
        if x.len() != self.factors.len() {
            return Err(Error::BadElement(format!(
                "element has {} coordinates, group has {} factors",
                x.len(),
                self.factors.len()
            )));
        }
        Ok(x.iter()
            .zip(&self.factors)
            .map(|(xi, &d)| {
                xi.mod_floor(&BigInt::from(d))
                    .to_u64()
                    .expect("reduced below d")
            })
            .collect())
    }

    fn generator(&self, j: usize) -> Vec<u64> {
        let mut e = vec![0u64; self.rank()];
        e[j] = 1 % self.factors[j];
        e
    }
}

/// An automorphism given by the images of the standard generators: column `j`
/// of the matrix is the image of `e_j`, row `i` reduced mod `d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupAutomorphism {
    images: Vec<Vec<u64>>,
}

impl GroupAutomorphism {
    pub fn identity(group: &FiniteGroup) -> Self {
        Self {
            images: (0..group.rank()).map(|j| group.generator(j)).collect(),
        }
    }

    /// Validates a matrix as an automorphism: each column must be killed by
    /// its generator's order, and a two-sided inverse must exist.
    pub fn from_matrix(group: &FiniteGroup, matrix: &IntMatrix) -> Result<Self> {
        let r = group.rank();
        if r == 0 {
            return Ok(Self { images: Vec::new() });
        }
        if matrix.rows() != r || matrix.cols() != r {
            return Err(Error::DimensionMismatch(format!(
                "automorphism of a rank-{r} group needs an {r}x{r} matrix"
            )));
        }
        let images: Vec<Vec<u64>> = (0..r)
            .map(|j| {
                let col: Vec<BigInt> = (0..r).map(|i| matrix.get(i, j).clone()).collect();
                group.reduce(&col)
            })
            .collect::<Result<_>>()?;
        for (j, img) in images.iter().enumerate() {
            if group.scale(group.factors[j], img).iter().any(|&x| x != 0) {
                return Err(Error::BadElement(format!(
                    "column {j} is not killed by {}",
                    group.factors[j]
                )));
            }
        }
        let xi = Self { images };
        if xi.inverse(group).is_none() {
            return Err(Error::BadElement(
                "matrix is not invertible on the group".into(),
            ));
        }
        Ok(xi)
    }

    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    /// Matrix form: entry `(i, j)` is coordinate `i` of the image of `e_j`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let r = self.images.len();
        (0..r)
            .map(|i| (0..r).map(|j| self.images[j][i]).collect())
            .collect()
    }

    pub fn apply(&self, group: &FiniteGroup, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; group.rank()];
        for (xj, img) in x.iter().zip(&self.images) {
            out = group.add(&out, &group.scale(*xj, img));
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, group: &FiniteGroup, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|y| self.apply(group, y)).collect(),
        }
    }

    /// Two-sided inverse, found by searching preimages of the generators.
    pub fn inverse(&self, group: &FiniteGroup) -> Option<Self> {
        let r = group.rank();
        let mut pre: Vec<Option<Vec<u64>>> = vec![None; r];
        for idx in 0..group.order() as usize {
            let x = group.decode(idx);
            let y = self.apply(group, &x);
            for (j, slot) in pre.iter_mut().enumerate() {
                if slot.is_none() && y == group.generator(j) {
                    *slot = Some(x.clone());
                }
            }
        }
        let images: Vec<Vec<u64>> = pre.into_iter().collect::<Option<_>>()?;
        let inv = Self { images };
        // the candidate must itself be a homomorphism and invert on both sides
        let hom = inv
            .images
            .iter()
            .zip(&group.factors)
            .all(|(img, &d)| group.scale(d, img).iter().all(|&x| x == 0));
        let id = Self::identity(group);
        (hom && inv.compose(group, self) == id && self.compose(group, &inv) == id).then_some(inv)
    }
}

/// `|Aut(g)|` for a finite abelian group, by the Hillar–Rhea formula applied
/// to each primary component.
pub fn aut_order(g: &AbelianGroup) -> Result<BigInt> {
    if !g.is_finite() {
        return Err(Error::InfiniteGroup {
            free_rank: g.free_rank(),
        });
    }
    // prime -> exponents across the invariant factors
    let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for d in g.torsion() {
        let d = d
            .to_u64()
            .ok_or_else(|| Error::ResourceLimit(format!("cannot factor {d}")))?;
        for (p, e) in factorize(d) {
            primary.entry(p).or_default().push(e);
        }
    }
    let mut total = BigInt::one();
    for (p, mut exps) in primary {
        exps.sort_unstable();
        total *= p_group_aut_order(p, &exps);
    }
    Ok(total)
}

/// Hillar–Rhea: for `Z/p^e1 + ... + Z/p^en` with `e1 <= ... <= en`,
/// `|Aut| = Π (p^{d_k} - p^{k-1}) · Π (p^{e_j})^{n - d_j} · Π (p^{e_i - 1})^{n - c_i + 1}`
/// where `d_k = max{l : e_l = e_k}` and `c_k = min{l : e_l = e_k}` (1-based).
fn p_group_aut_order(p: u64, exps: &[u32]) -> BigInt {
    let n = exps.len();
    let p = BigInt::from(p);
    let mut total = BigInt::one();
    for k in 0..n {
        let d_k = (k..n).rev().find(|&l| exps[l] == exps[k]).unwrap() + 1;
        let c_k = (0..=k).find(|&l| exps[l] == exps[k]).unwrap() + 1;
        total *= p.pow(d_k as u32) - p.pow(k as u32);
        total *= p.pow(exps[k] * (n - d_k) as u32);
        total *= p.pow((exps[k] - 1) * (n - c_k + 1) as u32);
    }
    total
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Every automorphism, in lexicographic order of generator images.
///
/// An automorphism is a tuple `(g_1, ..., g_k)` of images of the standard
/// generators with `ord(g_j) = d_j` that generates the group. Partial tuples
/// are pruned by requiring `|<g_1, ..., g_j>| = d_1 ⋯ d_j`, which every prefix
/// of a basis satisfies.
pub fn aut_enumerate(g: &AbelianGroup, limit: usize) -> Result<Vec<GroupAutomorphism>> {
    let order = aut_order(g)?;
    if order > BigInt::from(limit) {
        return Err(Error::ResourceLimit(format!(
            "|Aut({g})| = {order} exceeds the enumeration limit {limit}"
        )));
    }
    let group = FiniteGroup::new(g)?;
    let mut out = Vec::with_capacity(order.to_usize().unwrap_or(0));
    let mut chosen = Vec::new();
    let mut member = vec![false; group.order() as usize];
    member[0] = true;
    enumerate_rec(&group, 0, &mut chosen, &[0], &mut member, &mut out);
    debug_assert_eq!(BigInt::from(out.len()), order);
    Ok(out)
}

fn enumerate_rec(
    group: &FiniteGroup,
    j: usize,
    chosen: &mut Vec<Vec<u64>>,
    subgroup: &[usize],
    member: &mut Vec<bool>,
    out: &mut Vec<GroupAutomorphism>,
) {
    if j == group.rank() {
        out.push(GroupAutomorphism {
            images: chosen.clone(),
        });
        return;
    }
    let d = group.factors[j];
    for idx in 0..group.order() as usize {
        let x = group.decode(idx);
        if group.element_order(&x) != d {
            continue;
        }
        // <H, x> = H + <x>; its size must be |H| * d, i.e. <x> ∩ H = 0
        if (1..d).any(|k| member[group.encode(&group.scale(k, &x))]) {
            continue;
        }
        let mut grown = Vec::with_capacity(subgroup.len() * d as usize);
        let mut multiple = vec![0u64; group.rank()];
        for _ in 0..d {
            for &h in subgroup {
                let y = group.encode(&group.add(&group.decode(h), &multiple));
                grown.push(y);
            }
            multiple = group.add(&multiple, &x);
        }
        for &y in &grown {
            member[y] = true;
        }
        chosen.push(x);
        enumerate_rec(group, j + 1, chosen, &grown, member, out);
        chosen.pop();
        for &y in &grown {
            member[y] = false;
        }
        for &h in subgroup {
            member[h] = true;
        }
    }
}

/// `Aut₁ = {ξ : ξ(unit) = unit}` and its order.
pub fn stabilizer_aut1(
    g: &AbelianGroup,
    unit: &[BigInt],
    limit: usize,
) -> Result<(Vec<GroupAutomorphism>, usize)> {
    let group = FiniteGroup::new(g)?;
    let u = group.reduce(unit)?;
    let stab: Vec<GroupAutomorphism> = aut_enumerate(g, limit)?
        .into_iter()
        .filter(|xi| xi.apply(&group, &u) == u)
        .collect();
    let n = stab.len();
    Ok((stab, n))
}

/// `Aut(K₀) / Aut₁(K₀)` for a shift: one representative per coset `ξ Aut₁`,
/// i.e. per point in the orbit of the unit class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardQuotient {
    pub k0: K0Class,
    pub aut_order: BigInt,
    pub aut1_order: BigInt,
    pub quotient_order: BigInt,
    /// First automorphism (in enumeration order) of each coset, paired with
    /// the image of the unit that labels the coset.
    pub representatives: Vec<(GroupAutomorphism, Vec<u64>)>,
}

pub fn picard_quotient(shift: &MarkovShift, limit: usize) -> Result<PicardQuotient> {
    let k0 = k0_with_unit(shift)?;
    let group = FiniteGroup::new(&k0.group)?;
    let u = group.reduce(&k0.unit)?;
    let all = aut_enumerate(&k0.group, limit)?;
    let aut_order = BigInt::from(all.len());
    let mut seen = BTreeMap::new();
    let mut representatives = Vec::new();
    let mut aut1 = 0usize;
    for xi in all {
        let image = xi.apply(&group, &u);
        if image == u {
            aut1 += 1;
        }
        if !seen.contains_key(&image) {
            seen.insert(image.clone(), representatives.len());
            representatives.push((xi, image));
        }
    }
    let quotient_order = BigInt::from(representatives.len());
    debug_assert_eq!(&quotient_order * aut1, aut_order);
    Ok(PicardQuotient {
        k0,
        aut_order,
        aut1_order: BigInt::from(aut1),
        quotient_order,
        representatives,
    })
}

/// The group-theoretic side of the Picard sequence for the Cuntz algebra
/// `O_n`, i.e. the full shift `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuntzPicard {
    pub n: u64,
    /// `K₀(O_n) = Z/(n-1)`.
    pub group: AbelianGroup,
    pub unit: Vec<BigInt>,
    pub aut_order: BigInt,
    pub aut1_order: BigInt,
    pub quotient_order: BigInt,
    /// Isomorphism type of `Aut(Z/(n-1)) / Aut₁`.
    pub quotient: AbelianGroup,
    /// `Some(n - 2)` exactly when `n - 1` is prime, in which case the quotient
    /// is cyclic of that order.
    pub cyclic_quotient_order: Option<u64>,
}

pub fn cuntz_picard(n: u64) -> Result<CuntzPicard> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let shift = MarkovShift::validate(IntMatrix::new(1, 1, vec![BigInt::from(n)])?)?;
    let k0 = k0_with_unit(&shift)?;
    let aut_order = aut_order(&k0.group)?;
    let m = n - 1;
    // Aut(Z/m) acts on an element of order t through its orbit of all
    // φ(t) elements of order t.
    let unit_class = match k0.unit.first() {
        Some(u) => u.to_u64().expect("reduced mod n - 1"),
        None => 0,
    };
    let unit_order = m / unit_class.gcd(&m);
    let orbit = BigInt::from(euler_phi(unit_order));
    let aut1_order = &aut_order / &orbit;
    // the unit generates Z/m, so Aut₁ is trivial and the quotient is the
    // unit group (Z/m)^×
    debug_assert!(aut1_order.is_one());
    let quotient = unit_group(m);
    let prime = m >= 2 && factorize(m) == vec![(m, 1)];
    Ok(CuntzPicard {
        n,
        group: k0.group,
        unit: k0.unit,
        aut_order,
        aut1_order,
        quotient_order: orbit,
        quotient,
        cyclic_quotient_order: prime.then_some(n - 2),
    })
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `(Z/m)^×` in invariant-factor form.
pub fn unit_group(m: u64) -> AbelianGroup {
    let mut orders: Vec<BigInt> = Vec::new();
    for (p, e) in factorize(m) {
        if p == 2 {
            match e {
                1 => {}
                2 => orders.push(2.into()),
                _ => {
                    orders.push(2.into());
                    orders.push(BigInt::from(2u64.pow(e - 2)));
                }
            }
        } else {
            orders.push(BigInt::from(p.pow(e - 1) * (p - 1)));
        }
    }
    AbelianGroup::from_orders(&orders)
}
