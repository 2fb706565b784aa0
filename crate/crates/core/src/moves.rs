//! The generating moves of flow equivalence: elementary equivalence
//! (`A = CD`, `B = DC`) and symbol expansion, plus replayable witness chains
//! and a bounded search for elementary factorizations.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::shift::MarkovShift;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `CD -> DC` for elementary steps, `A -> Ã` for expansions.
    Forward,
    /// `DC -> CD` for elementary steps, `Ã -> A` for expansions.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    ElementaryEq {
        c: IntMatrix,
        d: IntMatrix,
        direction: Direction,
    },
    Expansion {
        vertex: usize,
        direction: Direction,
    },
}

impl Step {
    /// Applies this step to `current`.
    pub fn apply(&self, current: &IntMatrix) -> Result<IntMatrix> {
        match self {
            Step::ElementaryEq { c, d, direction } => match direction {
                Direction::Forward => elementary_split(current, c, d).map(|(b, _)| b),
                Direction::Backward => {
                    // current = DC, next = CD
                    elementary_split(current, d, c).map(|(b, _)| b)
                }
            },
            Step::Expansion { vertex, direction } => match direction {
                Direction::Forward => expand_matrix(current, *vertex),
                Direction::Backward => contract_matrix(current, *vertex),
            },
        }
    }
}

/// Ordered chain of moves from a start matrix to an end matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveWitness {
    steps: Vec<Step>,
}

impl MoveWitness {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn concat(&self, other: &MoveWitness) -> MoveWitness {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Self { steps }
    }

    /// The chain read backwards with every step inverted.
    pub fn reversed(&self) -> MoveWitness {
        let flip = |d: Direction| match d {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match s {
                Step::ElementaryEq { c, d, direction } => Step::ElementaryEq {
                    c: c.clone(),
                    d: d.clone(),
                    direction: flip(*direction),
                },
                Step::Expansion { vertex, direction } => Step::Expansion {
                    vertex: *vertex,
                    direction: flip(*direction),
                },
            })
            .collect();
        Self { steps }
    }
}

/// Given `a = c·d`, returns `b = d·c` and the step recording the move.
pub fn elementary_split(a: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> Result<(IntMatrix, Step)> {
    for m in [c, d] {
        if let Some((row, col)) = m.first_negative() {
            return Err(Error::NegativeEntry { row, col });
        }
    }
    if c.rows() != a.rows() || d.cols() != a.cols() || c.cols() != d.rows() {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, D is {}x{}, A is {}x{}",
            c.rows(),
            c.cols(),
            d.rows(),
            d.cols(),
            a.rows(),
            a.cols()
        )));
    }
    if &c.multiply(d)? != a {
        return Err(Error::FactorizationMismatch);
    }
    let b = d.multiply(c)?;
    let step = Step::ElementaryEq {
        c: c.clone(),
        d: d.clone(),
        direction: Direction::Forward,
    };
    Ok((b, step))
}

/// The block matrix `Z = [[0, C], [D, 0]]`, whose square is
/// `diag(CD, DC)`.
pub fn linking_matrix(c: &IntMatrix, d: &IntMatrix) -> Result<IntMatrix> {
    let (n, m) = (c.rows(), c.cols());
    if d.rows() != m || d.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "C is {n}x{m} so D must be {m}x{n}, got {}x{}",
            d.rows(),
            d.cols()
        )));
    }
    let mut z = IntMatrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..m {
            z.set(i, n + j, c.get(i, j).clone());
        }
    }
    for i in 0..m {
        for j in 0..n {
            z.set(n + i, j, d.get(i, j).clone());
        }
    }
    let square = z.multiply(&z)?;
    let expected = IntMatrix::block_diagonal(&c.multiply(d)?, &d.multiply(c)?);
    assert_eq!(square, expected, "linking matrix squares to diag(CD, DC)");
    Ok(z)
}

/// Expansion of a 0-1 matrix at vertex `v` (0-based): a new vertex is
/// inserted at position `v`, taking over the outgoing edges of the old
/// vertex, and the old vertex (now at `v + 1`) points only to it.
///
/// At `v = 0` this is the layout
/// ```text
/// [ 0  A(1,1) ... A(1,N) ]
/// [ 1  0      ... 0      ]
/// [ 0  A(2,1) ... A(2,N) ]
/// [ ...                  ]
/// ```
pub fn expand_matrix(a: &IntMatrix, v: usize) -> Result<IntMatrix> {
    a.ensure_square()?;
    if !a.is_zero_one() {
        return Err(Error::NotZeroOne);
    }
    let n = a.rows();
    if v >= n {
        return Err(Error::BadVertex { vertex: v, size: n });
    }
    // old index -> new index
    let pos = |i: usize| if i < v { i } else { i + 1 };
    let mut out = IntMatrix::zeros(n + 1, n + 1);
    for j in 0..n {
        out.set(v, pos(j), a.get(v, j).clone());
    }
    out.set(pos(v), v, BigInt::from(1));
    for i in (0..n).filter(|&i| i != v) {
        for j in 0..n {
            out.set(pos(i), pos(j), a.get(i, j).clone());
        }
    }
    Ok(out)
}

/// Expansion of a validated shift; the result is again validated.
pub fn expand_at_vertex(shift: &MarkovShift, v: usize) -> Result<MarkovShift> {
    MarkovShift::validate(expand_matrix(shift.matrix(), v)?)
}

/// Inverse of [`expand_matrix`]: recovers `A` from `Ã` when `Ã` really is the
/// expansion of some matrix at `v`.
pub fn contract_matrix(expanded: &IntMatrix, v: usize) -> Result<IntMatrix> {
    expanded.ensure_square()?;
    if !expanded.is_zero_one() {
        return Err(Error::NotZeroOne);
    }
    let size = expanded.rows();
    if size < 2 || v + 1 >= size {
        return Err(Error::BadVertex { vertex: v, size });
    }
    let n = size - 1;
    let pos = |i: usize| if i < v { i } else { i + 1 };
    let mut a = IntMatrix::zeros(n, n);
    for i in 0..n {
        let src = if i == v { v } else { pos(i) };
        for j in 0..n {
            a.set(i, j, expanded.get(src, pos(j)).clone());
        }
    }
    if &expand_matrix(&a, v)? != expanded {
        return Err(Error::NotAnExpansion(v));
    }
    Ok(a)
}

/// Replays a witness chain from `start`. The first failing step is reported
/// with its index.
pub fn apply_move_chain(start: &IntMatrix, witness: &MoveWitness) -> Result<IntMatrix> {
    Ok(trace_move_chain(start, witness)?
        .pop()
        .unwrap_or_else(|| start.clone()))
}

/// Every intermediate matrix of a replay, starting with `start`.
pub fn trace_move_chain(start: &IntMatrix, witness: &MoveWitness) -> Result<Vec<IntMatrix>> {
    let mut trace = vec![start.clone()];
    for (index, step) in witness.steps().iter().enumerate() {
        let next = step
            .apply(trace.last().expect("trace is never empty"))
            .map_err(|e| Error::StepFailed {
                index,
                source: Box::new(e),
            })?;
        trace.push(next);
    }
    Ok(trace)
}

/// Bounds for [`search_elementary_factorizations`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest inner dimension `m` tried.
    pub max_inner: usize,
    /// Largest entry allowed in `C` and `D`.
    pub max_entry: u64,
    /// Maximum number of search nodes before giving up.
    pub node_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_inner: 3,
            max_entry: 2,
            node_budget: 50_000_000,
        }
    }
}

/// All nonnegative factorizations `a = C·D` with inner dimension at most
/// `max_inner` and entries at most `max_entry`.
///
/// A factorization is a multiset of rank-one terms `c_k d_kᵀ` (column `k` of
/// `C` times row `k` of `D`), so results are reported once per simultaneous
/// permutation of the inner index, with the terms in nonincreasing order.
/// Terms with a zero column in `C` or a zero row in `D` are excluded: they
/// contribute nothing to `CD` and leave a dead vertex in `DC`.
///
/// Output is sorted by inner dimension, then lexicographically by terms.
pub fn search_elementary_factorizations(
    a: &IntMatrix,
    limits: &SearchLimits,
) -> Result<Vec<(IntMatrix, IntMatrix)>> {
    a.ensure_square()?;
    if let Some((row, col)) = a.first_negative() {
        return Err(Error::NegativeEntry { row, col });
    }
    let n = a.rows();
    let mut target = vec![vec![0u64; n]; n];
    for (i, row) in target.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a.get(i, j).to_u64().ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "entry ({i}, {j}) too large for factorization search"
                ))
            })?;
        }
    }
    let total: u64 = target.iter().flatten().sum();

    let mut search = FactorSearch {
        n,
        max_entry: limits.max_entry,
        budget: limits.node_budget,
        nodes: 0,
        terms: Vec::new(),
        found: Vec::new(),
    };
    for m in 1..=limits.max_inner {
        // each rank-one term removes at least 1 from the entry sum
        if (m as u64) > total {
            break;
        }
        search.descend(&mut target.clone(), m)?;
    }
    Ok(search
        .found
        .into_iter()
        .map(|terms| terms_to_matrices(n, &terms))
        .collect())
}

type Term = (Vec<u64>, Vec<u64>);

struct FactorSearch {
    n: usize,
    max_entry: u64,
    budget: u64,
    nodes: u64,
    terms: Vec<Term>,
    found: Vec<Vec<Term>>,
}

impl FactorSearch {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceLimit(format!(
                "factorization search exceeded {} nodes",
                self.budget
            )));
        }
        Ok(())
    }

    /// Chooses the remaining `left` terms so that they sum to `rest`.
    fn descend(&mut self, rest: &mut [Vec<u64>], left: usize) -> Result<()> {
        let remaining_sum: u64 = rest.iter().flatten().sum();
        if remaining_sum < left as u64 {
            return Ok(());
        }
        let n = self.n;
        let mut c = vec![0u64; n];
        // iterate c over [0, max_entry]^n in lexicographic order
        loop {
            if !advance(&mut c, self.max_entry) {
                break;
            }
            self.tick()?;
            if let Some(prev) = self.terms.last() {
                if c > prev.0 {
                    continue;
                }
            }
            // upper bound for each d_j given c
            let mut bound = vec![self.max_entry; n];
            for (j, b) in bound.iter_mut().enumerate() {
                for (i, &ci) in c.iter().enumerate() {
                    if let Some(q) = rest[i][j].checked_div(ci) {
                        *b = (*b).min(q);
                    }
                }
            }
            if bound.iter().all(|&b| b == 0) {
                continue;
            }
            if left == 1 {
                self.close(rest, &c, &bound);
                continue;
            }
            let mut d = vec![0u64; n];
            loop {
                if !advance_bounded(&mut d, &bound) {
                    break;
                }
                self.tick()?;
                if let Some(prev) = self.terms.last() {
                    if (&c, &d) > (&prev.0, &prev.1) {
                        continue;
                    }
                }
                subtract(rest, &c, &d);
                self.terms.push((c.clone(), d.clone()));
                let r = self.descend(rest, left - 1);
                self.terms.pop();
                add(rest, &c, &d);
                r?;
            }
        }
        Ok(())
    }

    /// Last term: `rest` must be exactly `c dᵀ`.
    fn close(&mut self, rest: &[Vec<u64>], c: &[u64], bound: &[u64]) {
        let n = self.n;
        let Some(pivot) = c.iter().position(|&x| x > 0) else {
            return;
        };
        let mut d = vec![0u64; n];
        for j in 0..n {
            if !rest[pivot][j].is_multiple_of(c[pivot]) {
                return;
            }
            d[j] = rest[pivot][j] / c[pivot];
            if d[j] > bound[j] {
                return;
            }
        }
        if d.iter().all(|&x| x == 0) {
            return;
        }
        for i in 0..n {
            for j in 0..n {
                if rest[i][j] != c[i] * d[j] {
                    return;
                }
            }
        }
        if let Some(prev) = self.terms.last() {
            if (c, d.as_slice()) > (prev.0.as_slice(), prev.1.as_slice()) {
                return;
            }
        }
        let mut terms = self.terms.clone();
        terms.push((c.to_vec(), d));
        self.found.push(terms);
    }
}

/// Next vector in lexicographic order over `[0, max]^n`, skipping zero.
/// Starts from the zero vector. Returns false when exhausted.
fn advance(v: &mut [u64], max: u64) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < max {
            v[i] += 1;
            for x in &mut v[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

fn advance_bounded(v: &mut [u64], bound: &[u64]) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < bound[i] {
            v[i] += 1;
            for x in &mut v[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

fn subtract(rest: &mut [Vec<u64>], c: &[u64], d: &[u64]) {
    for (i, &ci) in c.iter().enumerate() {
        for (j, &dj) in d.iter().enumerate() {
            rest[i][j] -= ci * dj;
        }
    }
}

fn add(rest: &mut [Vec<u64>], c: &[u64], d: &[u64]) {
    for (i, &ci) in c.iter().enumerate() {
        for (j, &dj) in d.iter().enumerate() {
            rest[i][j] += ci * dj;
        }
    }
}

fn terms_to_matrices(n: usize, terms: &[Term]) -> (IntMatrix, IntMatrix) {
    let m = terms.len();
    let mut c = IntMatrix::zeros(n, m);
    let mut d = IntMatrix::zeros(m, n);
    for (k, (col, row)) in terms.iter().enumerate() {
        for i in 0..n {
            if col[i] != 0 {
                c.set(i, k, BigInt::from(col[i]));
            }
            if row[i] != 0 {
                d.set(k, i, BigInt::from(row[i]));
            }
        }
    }
    (c, d)
}

/// True when `c` has a zero column or `d` a zero row.
pub fn has_dead_inner_index(c: &IntMatrix, d: &IntMatrix) -> bool {
    (0..c.cols()).any(|k| (0..c.rows()).all(|i| c.get(i, k).is_zero()))
        || (0..d.rows()).any(|k| d.row(k).iter().all(Zero::is_zero))
}
