//! Topological Markov shifts given by nonnegative integer matrices.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Default cap on the number of words a single enumeration may produce.
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlphabetKind {
    /// 0-1 matrix; symbols are vertices.
    Vertex,
    /// General nonnegative matrix; symbols are the edges of its graph.
    EdgeWeighted,
}

/// A validated transition matrix: square, nonnegative, irreducible and not a
/// permutation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkovShift {
    matrix: IntMatrix,
    kind: AlphabetKind,
}

impl MarkovShift {
    /// Checks the standing hypotheses in order (shape, sign, irreducibility,
    /// permutation) and reports the first one that fails.
    pub fn validate(matrix: IntMatrix) -> Result<Self> {
        matrix.ensure_square()?;
        if let Some((row, col)) = matrix.first_negative() {
            return Err(Error::NegativeEntry { row, col });
        }
        if !is_irreducible(&matrix)? {
            return Err(Error::Reducible);
        }
        if is_permutation(&matrix) {
            return Err(Error::PermutationMatrix);
        }
        let kind = if matrix.is_zero_one() {
            AlphabetKind::Vertex
        } else {
            AlphabetKind::EdgeWeighted
        };
        Ok(Self { matrix, kind })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }
}

/// Strong connectivity of the support digraph, where every vertex must also
/// reach itself by a path of positive length. A 1x1 zero matrix is therefore
/// reducible.
pub fn is_irreducible(matrix: &IntMatrix) -> Result<bool> {
    matrix.ensure_square()?;
    let n = matrix.rows();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| !matrix.get(i, j).is_zero()).collect())
        .collect();
    let mut pred = vec![Vec::new(); n];
    for (i, s) in succ.iter().enumerate() {
        for &j in s {
            pred[j].push(i);
        }
    }
    // vertex 0 must reach everything and be reached from everything, via
    // positive-length paths
    Ok(reach_all(&succ) && reach_all(&pred))
}

fn reach_all(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = adj[0].iter().copied().collect();
    for &j in &adj[0] {
        seen[j] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// 0-1 with exactly one 1 in every row and every column.
pub fn is_permutation(matrix: &IntMatrix) -> bool {
    if !matrix.is_square() || !matrix.is_zero_one() {
        return false;
    }
    let n = matrix.rows();
    let mut col_count = vec![0usize; n];
    for i in 0..n {
        let mut row_count = 0;
        for (j, c) in col_count.iter_mut().enumerate() {
            if !matrix.get(i, j).is_zero() {
                row_count += 1;
                *c += 1;
            }
        }
        if row_count != 1 {
            return false;
        }
    }
    col_count.into_iter().all(|c| c == 1)
}

/// One edge of the graph of a matrix: the `index`-th parallel edge from
/// `source` to `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub index: usize,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}{}", self.source + 1, self.target + 1)?;
        if self.index > 0 {
            write!(f, "#{}", self.index + 1)?;
        }
        Ok(())
    }
}

/// Edges of the graph with `A(i, j)` parallel edges from `i` to `j`, ordered
/// by (source, target, parallel index).
pub fn edges_of(matrix: &IntMatrix) -> Result<Vec<Edge>> {
    matrix.ensure_square()?;
    let n = matrix.rows();
    let mut edges = Vec::new();
    for source in 0..n {
        for target in 0..n {
            let count = matrix.get(source, target).to_usize().ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "entry ({source}, {target}) = {} is too large to expand into edges",
                    matrix.get(source, target)
                ))
            })?;
            edges.extend((0..count).map(|index| Edge {
                source,
                target,
                index,
            }));
        }
    }
    Ok(edges)
}

/// The 0-1 transition matrix between edges: `1` iff `t(e) = s(f)`.
pub fn edge_transition_matrix(edges: &[Edge]) -> Result<IntMatrix> {
    if edges.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let n = edges.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, e) in edges.iter().enumerate() {
        for (j, f) in edges.iter().enumerate() {
            if e.target == f.source {
                m.set(i, j, BigInt::from(1));
            }
        }
    }
    Ok(m)
}

/// Edge shift of `shift` together with the edge labels, in row order.
pub fn edge_matrix(shift: &MarkovShift) -> Result<(MarkovShift, Vec<Edge>)> {
    let edges = edges_of(shift.matrix())?;
    let m = edge_transition_matrix(&edges)?;
    Ok((MarkovShift::validate(m)?, edges))
}

/// A finite sequence of symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, symbol: usize) -> Word {
        let mut v = self.0.clone();
        v.push(symbol);
        Word(v)
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|r| Word(r.to_vec()))
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

/// All admissible words of length `k` over the edge alphabet of `shift`,
/// in lexicographic order of edge indices. Errors with `ResourceLimit` if
/// there would be more than `cap` of them.
pub fn admissible_words(shift: &MarkovShift, k: usize, cap: usize) -> Result<Vec<Word>> {
    let edges = edges_of(shift.matrix())?;
    let follow = successor_lists(&edge_transition_matrix(&edges)?);
    words_over(&follow, k, cap)
}

/// Successor lists of a 0-1 (or nonnegative) transition matrix.
pub(crate) fn successor_lists(m: &IntMatrix) -> Vec<Vec<usize>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).filter(|&j| !m.get(i, j).is_zero()).collect())
        .collect()
}

/// Words of length `k` in the graph given by successor lists.
pub(crate) fn words_over(follow: &[Vec<usize>], k: usize, cap: usize) -> Result<Vec<Word>> {
    if k == 0 {
        return Ok(vec![Word::empty()]);
    }
    let count = count_words(follow, k);
    if count > BigInt::from(cap) {
        return Err(Error::ResourceLimit(format!(
            "{count} words of length {k} exceed the cap of {cap}"
        )));
    }
    let mut out: Vec<Word> = (0..follow.len()).map(|s| Word(vec![s])).collect();
    for _ in 1..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = w.last().expect("nonempty");
                follow[last].iter().map(move |&s| w.push(s))
            })
            .collect();
    }
    Ok(out)
}

fn count_words(follow: &[Vec<usize>], k: usize) -> BigInt {
    let mut ending: Vec<BigInt> = vec![BigInt::from(1); follow.len()];
    for _ in 1..k {
        let mut next = vec![BigInt::zero(); follow.len()];
        for (i, succ) in follow.iter().enumerate() {
            for &j in succ {
                next[j] += &ending[i];
            }
        }
        ending = next;
    }
    ending.into_iter().sum()
}
