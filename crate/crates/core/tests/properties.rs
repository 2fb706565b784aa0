mod common;

use std::sync::Arc;

use ckflow::aut::{aut_enumerate, aut_order, picard_quotient, stabilizer_aut1, FiniteGroup};
use ckflow::cylinder::{sum, Alphabet, WordOperator};
use ckflow::invariants::{bowen_franks, flow_equivalent, flow_invariant, k0_with_unit};
use ckflow::linalg::{cokernel, det, smith_normal_form};
use ckflow::moves::{
    apply_move_chain, contract_matrix, elementary_split, expand_at_vertex, expand_matrix,
    Direction, MoveWitness, Step,
};
use ckflow::{AbelianGroup, IntMatrix, MarkovShift, Word};
use num_bigint::BigInt;
use proptest::prelude::*;

use common::{det_leibniz, snf_contract};

fn int_matrix(max_dim: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(lo..=hi, r * c).prop_map(move |v| {
            IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn square(max_dim: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim).prop_flat_map(move |n| {
        prop::collection::vec(lo..=hi, n * n).prop_map(move |v| {
            IntMatrix::new(n, n, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn shift(max_dim: usize, max_entry: i64) -> impl Strategy<Value = MarkovShift> {
    square(max_dim, 0, max_entry).prop_filter_map("irreducible non-permutation", |a| {
        MarkovShift::validate(a).ok()
    })
}

fn zero_one_shift(max_dim: usize) -> impl Strategy<Value = MarkovShift> {
    shift(max_dim, 1)
}

/// Unimodular matrix as a product of random elementary operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut u = IntMatrix::identity(n);
        for (i, j, k, swap) in ops {
            let mut e = IntMatrix::identity(n);
            if swap {
                e.set(i, i, 0.into());
                e.set(j, j, 0.into());
                e.set(i, j, 1.into());
                e.set(j, i, 1.into());
            } else if i != j {
                e.set(i, j, k.into());
            }
            u = e.multiply(&u).unwrap();
        }
        u
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn snf_contract_holds(m in int_matrix(6, -9, 9)) {
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf_contract(&m, &snf), Ok(()));
    }

    #[test]
    fn det_matches_leibniz(m in square(6, -9, 9)) {
        prop_assert_eq!(det(&m).unwrap(), det_leibniz(&m));
    }

    #[test]
    fn sylvester_identity(
        (c, d) in (1usize..=5, 1usize..=5).prop_flat_map(|(n, k)| {
            (
                prop::collection::vec(-4i64..=4, n * k),
                prop::collection::vec(-4i64..=4, k * n),
            ).prop_map(move |(x, y)| {
                (
                    IntMatrix::new(n, k, x.into_iter().map(BigInt::from).collect()).unwrap(),
                    IntMatrix::new(k, n, y.into_iter().map(BigInt::from).collect()).unwrap(),
                )
            })
        })
    ) {
        let cd = c.multiply(&d).unwrap().identity_minus().unwrap();
        let dc = d.multiply(&c).unwrap().identity_minus().unwrap();
        prop_assert_eq!(det(&cd).unwrap(), det(&dc).unwrap());
    }

    /// The cokernel only depends on the lattice spanned by the columns and
    /// the ambient coordinates: `coker(U M V) ≅ coker(M)` for unimodular
    /// `U`, `V`.
    #[test]
    fn cokernel_is_canonical(
        (m, u, v) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
            (
                prop::collection::vec(-6i64..=6, r * c).prop_map(move |x| {
                    IntMatrix::new(r, c, x.into_iter().map(BigInt::from).collect()).unwrap()
                }),
                unimodular(r),
                unimodular(c),
            )
        })
    ) {
        let twisted = u.multiply(&m).unwrap().multiply(&v).unwrap();
        prop_assert_eq!(cokernel(&twisted).0, cokernel(&m).0);
    }

    /// `Z^n / MZ^n` and `Z^n / MᵗZ^n` are isomorphic, so BF and K₀ agree as
    /// groups.
    #[test]
    fn bowen_franks_matches_k0_group(a in shift(4, 3)) {
        prop_assert_eq!(bowen_franks(&a).unwrap(), k0_with_unit(&a).unwrap().group);
    }

    #[test]
    fn bf_order_matches_determinant(a in shift(5, 2)) {
        use num_traits::{Signed, Zero};
        let inv = flow_invariant(&a).unwrap();
        match inv.bf.order() {
            Some(n) => prop_assert_eq!(n, inv.det_value.abs()),
            None => prop_assert!(inv.det_value.is_zero()),
        }
    }

    #[test]
    fn expansion_preserves_invariants(a in zero_one_shift(5), v in 0usize..5) {
        let v = v % a.size();
        let e = expand_at_vertex(&a, v).unwrap();
        prop_assert_eq!(flow_invariant(&a).unwrap(), flow_invariant(&e).unwrap());
        prop_assert_eq!(&contract_matrix(e.matrix(), v).unwrap(), a.matrix());
    }

    #[test]
    fn elementary_move_preserves_invariants(
        (c, d) in (1usize..=4, 1usize..=4).prop_flat_map(|(n, k)| {
            (
                prop::collection::vec(0i64..=2, n * k),
                prop::collection::vec(0i64..=2, k * n),
            ).prop_map(move |(x, y)| {
                (
                    IntMatrix::new(n, k, x.into_iter().map(BigInt::from).collect()).unwrap(),
                    IntMatrix::new(k, n, y.into_iter().map(BigInt::from).collect()).unwrap(),
                )
            })
        })
    ) {
        let a = c.multiply(&d).unwrap();
        let (b, _) = elementary_split(&a, &c, &d).unwrap();
        // both sides need to be valid shifts for the invariants to apply
        if let (Ok(sa), Ok(sb)) = (MarkovShift::validate(a), MarkovShift::validate(b)) {
            prop_assert!(flow_equivalent(&sa, &sb).unwrap().0);
        }
    }

    #[test]
    fn witness_chains_replay_and_reverse(a in zero_one_shift(4), vs in prop::collection::vec(0usize..8, 1..4)) {
        let mut witness = MoveWitness::new();
        let mut current = a.matrix().clone();
        for v in vs {
            let v = v % current.rows();
            witness.push(Step::Expansion { vertex: v, direction: Direction::Forward });
            current = expand_matrix(&current, v).unwrap();
        }
        let end = apply_move_chain(a.matrix(), &witness).unwrap();
        prop_assert_eq!(&end, &current);
        prop_assert_eq!(&apply_move_chain(&end, &witness.reversed()).unwrap(), a.matrix());
        // splitting a chain and concatenating the halves changes nothing
        let steps = witness.steps();
        let mid = steps.len() / 2;
        let left = MoveWitness::from_steps(steps[..mid].to_vec());
        let right = MoveWitness::from_steps(steps[mid..].to_vec());
        prop_assert_eq!(apply_move_chain(a.matrix(), &left.concat(&right)).unwrap(), end);
    }
}

fn finite_group() -> impl Strategy<Value = AbelianGroup> {
    prop::collection::vec(2u64..=12, 1..=3)
        .prop_map(|orders| {
            AbelianGroup::from_orders(&orders.into_iter().map(BigInt::from).collect::<Vec<_>>())
        })
        .prop_filter("small enough to enumerate", |g| {
            g.order().unwrap() <= BigInt::from(200)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn aut_formula_matches_enumeration(g in finite_group()) {
        let n = aut_order(&g).unwrap();
        if n <= BigInt::from(50_000) {
            prop_assert_eq!(BigInt::from(aut_enumerate(&g, 50_000).unwrap().len()), n);
        }
    }

    /// The stabilizer of an element is a subgroup: it contains the identity
    /// and is closed under composition and inverses.
    #[test]
    fn aut1_is_a_subgroup(g in finite_group(), seed in any::<u64>()) {
        prop_assume!(aut_order(&g).unwrap() <= BigInt::from(5_000));
        let group = FiniteGroup::new(&g).unwrap();
        let unit = group.decode((seed % group.order()) as usize);
        let unit_big: Vec<BigInt> = unit.iter().map(|&x| BigInt::from(x)).collect();
        let (stab, n) = stabilizer_aut1(&g, &unit_big, 5_000).unwrap();
        prop_assert!(n >= 1);
        prop_assert!(aut_order(&g).unwrap() % BigInt::from(n) == BigInt::from(0));
        for x in &stab {
            let inv = x.inverse(&group).unwrap();
            prop_assert!(stab.contains(&inv));
            for y in stab.iter().take(20) {
                prop_assert!(stab.contains(&x.compose(&group, y)));
            }
        }
    }

    #[test]
    fn picard_orbit_stabilizer(a in shift(3, 3)) {
        if let Ok(pq) = picard_quotient(&a, 50_000) {
            prop_assert_eq!(&pq.quotient_order * &pq.aut1_order, pq.aut_order);
        }
    }
}

/// The unit class moves under symbol expansion, so the orbit size of the
/// unit (the order of `Aut / Aut₁`) is not a flow invariant even though the
/// group and `Aut` are.
#[test]
fn picard_quotient_order_is_not_a_flow_invariant() {
    let j4 = MarkovShift::validate(common::m(&[
        &[1, 1, 1, 1],
        &[1, 1, 1, 1],
        &[1, 1, 1, 1],
        &[1, 1, 1, 1],
    ]))
    .unwrap();
    let twice = expand_at_vertex(&expand_at_vertex(&j4, 0).unwrap(), 0).unwrap();
    assert!(flow_equivalent(&j4, &twice).unwrap().0);

    let before = picard_quotient(&j4, 1_000).unwrap();
    let after = picard_quotient(&twice, 1_000).unwrap();
    assert_eq!(before.k0.group, AbelianGroup::cyclic(3));
    assert_eq!(after.k0.group, AbelianGroup::cyclic(3));
    assert_eq!(before.aut_order, after.aut_order);
    assert_eq!(after.k0.unit, vec![BigInt::from(0)]);
    assert_eq!(before.quotient_order, BigInt::from(2));
    assert_eq!(after.quotient_order, BigInt::from(1));
}

#[test]
fn flow_equivalence_is_an_equivalence_relation() {
    let corpus = common::corpus();
    let eq = |a: &MarkovShift, b: &MarkovShift| flow_equivalent(a, b).unwrap().0;
    for a in &corpus {
        assert!(eq(a, a));
        for b in &corpus {
            assert_eq!(eq(a, b), eq(b, a));
            if eq(a, b) {
                for c in &corpus {
                    if eq(b, c) {
                        assert!(eq(a, c));
                    }
                }
            }
        }
    }
}

// Word-operator algebra over a fixed alphabet.

fn alphabet() -> Arc<Alphabet> {
    let a = MarkovShift::validate(common::m(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]])).unwrap();
    Alphabet::edges(&a).unwrap()
}

/// Golden-mean vertex generators: the two symbols have different followers.
fn vertex_alphabet() -> Arc<Alphabet> {
    let a = MarkovShift::validate(common::m(&[&[1, 1], &[1, 0]])).unwrap();
    Alphabet::vertices(&a).unwrap()
}

fn pick_alphabet(vertices: bool) -> Arc<Alphabet> {
    if vertices {
        vertex_alphabet()
    } else {
        alphabet()
    }
}

/// An admissible word steered by `choices`.
fn steer(a: &Alphabet, choices: &[usize]) -> Word {
    let mut w: Vec<usize> = Vec::with_capacity(choices.len());
    for &c in choices {
        let next = match w.last() {
            None => c % a.size(),
            Some(&l) => a.successors(l)[c % a.successors(l).len()],
        };
        w.push(next);
    }
    Word(w)
}

fn operator() -> impl Strategy<Value = Vec<(i64, Vec<usize>, Vec<usize>)>> {
    prop::collection::vec(
        (
            -2i64..=2,
            prop::collection::vec(0usize..6, 0..3),
            prop::collection::vec(0usize..6, 0..3),
        ),
        1..4,
    )
}

fn build(a: &Arc<Alphabet>, spec: &[(i64, Vec<usize>, Vec<usize>)]) -> WordOperator {
    let terms: Vec<WordOperator> = spec
        .iter()
        .map(|(c, mu, nu)| WordOperator::term(a, *c, steer(a, mu), steer(a, nu)).unwrap())
        .collect();
    sum(a, &terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn multiplication_is_associative(x in operator(), y in operator(), z in operator(), vertices in any::<bool>()) {
        let a = pick_alphabet(vertices);
        let (x, y, z) = (build(&a, &x), build(&a, &y), build(&a, &z));
        prop_assert!((&(&x * &y) * &z).equals(&(&x * &(&y * &z))).unwrap());
    }

    #[test]
    fn multiplication_distributes(x in operator(), y in operator(), z in operator()) {
        let a = alphabet();
        let (x, y, z) = (build(&a, &x), build(&a, &y), build(&a, &z));
        prop_assert!((&x * &(&y + &z)).equals(&(&(&x * &y) + &(&x * &z))).unwrap());
    }

    #[test]
    fn adjoint_is_an_anti_involution(x in operator(), y in operator(), vertices in any::<bool>()) {
        let a = pick_alphabet(vertices);
        let (x, y) = (build(&a, &x), build(&a, &y));
        prop_assert!(x.adjoint().adjoint().equals(&x).unwrap());
        prop_assert!((&x * &y).adjoint().equals(&(&y.adjoint() * &x.adjoint())).unwrap());
    }

    /// Expanding a summand into its one-step refinement gives an equal
    /// operator, and products respect the equality.
    #[test]
    fn equality_is_a_congruence(x in operator(), z in operator(), pick in 0usize..4, vertices in any::<bool>()) {
        let a = pick_alphabet(vertices);
        let x_op = build(&a, &x);
        let (c, mu, nu) = &x[pick % x.len()];
        let (mu, nu) = (steer(&a, mu), steer(&a, nu));
        let term = WordOperator::term(&a, *c, mu.clone(), nu.clone()).unwrap();
        let refined_terms: Vec<WordOperator> = (0..a.size())
            .filter(|&e| {
                mu.last().is_none_or(|l| a.allows(l, e)) && nu.last().is_none_or(|l| a.allows(l, e))
            })
            .map(|e| WordOperator::term(&a, *c, mu.push(e), nu.push(e)).unwrap())
            .collect();
        let refined = sum(&a, &refined_terms);
        prop_assert!(term.equals(&refined).unwrap());
        let y_op = &(&x_op - &term) + &refined;
        prop_assert!(x_op.equals(&y_op).unwrap());
        let z_op = build(&a, &z);
        prop_assert!((&x_op * &z_op).equals(&(&y_op * &z_op)).unwrap());
        prop_assert!((&z_op * &x_op).equals(&(&z_op * &y_op)).unwrap());
        prop_assert!(x_op.adjoint().equals(&y_op.adjoint()).unwrap());
    }

    /// Normalizing to depth `k` and then to `k + 1` agrees with going to
    /// `k + 1` directly.
    #[test]
    fn normalization_is_confluent(x in operator(), extra in 0usize..2) {
        let a = alphabet();
        let x = build(&a, &x);
        let k = 2 + extra;
        let staged_terms: Vec<WordOperator> = x
            .normalize(k)
            .into_iter()
            .map(|((mu, nu), c)| WordOperator::term(&a, c, mu, nu).unwrap())
            .collect();
        let staged = sum(&a, &staged_terms);
        prop_assert_eq!(staged.normalize(k + 1), x.normalize(k + 1));
    }

    #[test]
    fn range_projections_are_projections(w in prop::collection::vec(0usize..6, 0..4)) {
        let a = alphabet();
        let p = WordOperator::projection(&a, &steer(&a, &w)).unwrap();
        prop_assert!((&p * &p).equals(&p).unwrap());
        prop_assert!(p.adjoint().equals(&p).unwrap());
    }

    /// `p ≤ q` as `pq = p` is reflexive, antisymmetric and transitive on
    /// range projections of words.
    #[test]
    fn projection_order(
        u in prop::collection::vec(0usize..6, 0..4),
        v in prop::collection::vec(0usize..6, 0..4),
        w in prop::collection::vec(0usize..6, 0..4),
    ) {
        let a = alphabet();
        let p = |x: &[usize]| WordOperator::projection(&a, &steer(&a, x)).unwrap();
        let (p, q, r) = (p(&u), p(&v), p(&w));
        prop_assert!(p.is_subprojection_of(&p).unwrap());
        if p.is_subprojection_of(&q).unwrap() && q.is_subprojection_of(&p).unwrap() {
            prop_assert!(p.equals(&q).unwrap());
        }
        if p.is_subprojection_of(&q).unwrap() && q.is_subprojection_of(&r).unwrap() {
            prop_assert!(p.is_subprojection_of(&r).unwrap());
        }
    }
}
