//! Integer combinations of Cuntz–Krieger word operators `S_μ S_ν*` with an
//! exact equality test.
//!
//! Every operator is a finite sum `Σ c · S_μ S_ν*` over admissible words of a
//! 0-1 transition matrix. The only rewrite needed is
//!
//! ```text
//! S_μ S_ν* = Σ_e S_{μe} S_{νe}*     (e following both μ and ν)
//! ```
//!
//! which is `1 = Σ_e S_e S_e*` inserted between the two factors. Expanding
//! every term until `min(|μ|, |ν|)` reaches a common depth and discarding
//! terms whose last symbols have no common follower gives a canonical form:
//! the surviving `S_μ S_ν*` are linearly independent, so two operators are
//! equal iff their canonical forms agree term by term.

mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::shift::{
    edge_transition_matrix, edges_of, successor_lists, words_over, MarkovShift, Word,
};

pub use verify::{
    verify_ck_relations, verify_corner_transfer, verify_expansion_identities, verify_sse_basis,
    Check, VerificationReport, DEFAULT_CORNER_MAX_LEN,
};

/// The generating symbols of a Cuntz–Krieger algebra and their 0-1
/// transition matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    follow: Vec<Vec<bool>>,
    successors: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl Alphabet {
    /// Symbols are the rows of a square 0-1 matrix with no zero row.
    pub fn from_transition(m: &IntMatrix, labels: Vec<String>) -> Result<Self> {
        m.ensure_square()?;
        if !m.is_zero_one() {
            return Err(Error::NotZeroOne);
        }
        if labels.len() != m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} symbols",
                labels.len(),
                m.rows()
            )));
        }
        let successors = successor_lists(m);
        if let Some(i) = successors.iter().position(Vec::is_empty) {
            return Err(Error::InvalidArgument(format!(
                "symbol {} has no follower, so its generator vanishes",
                labels[i]
            )));
        }
        let n = m.rows();
        let follow = (0..n)
            .map(|i| (0..n).map(|j| !m.get(i, j).is_zero()).collect())
            .collect();
        Ok(Self {
            follow,
            successors,
            labels,
        })
    }

    /// Vertex generators of a 0-1 shift, labelled `1..N`.
    pub fn vertices(shift: &MarkovShift) -> Result<Arc<Self>> {
        let labels = (1..=shift.size()).map(|i| i.to_string()).collect();
        Self::from_transition(shift.matrix(), labels).map(Arc::new)
    }

    /// Edge generators `S_e`, `e ∈ E_A`, with `A^G` as transition matrix.
    pub fn edges(shift: &MarkovShift) -> Result<Arc<Self>> {
        let edges = edges_of(shift.matrix())?;
        let m = edge_transition_matrix(&edges)?;
        Self::from_transition(&m, edges.iter().map(ToString::to_string).collect()).map(Arc::new)
    }

    pub fn size(&self) -> usize {
        self.follow.len()
    }

    pub fn label(&self, symbol: usize) -> &str {
        &self.labels[symbol]
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.follow[from][to]
    }

    pub fn successors(&self, symbol: usize) -> &[usize] {
        &self.successors[symbol]
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        w.symbols().iter().all(|&s| s < self.size())
            && w.symbols().windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// `w · s` is admissible, given that `w` is.
    fn extends(&self, w: &Word, s: usize) -> bool {
        w.last().is_none_or(|l| self.allows(l, s))
    }

    /// `u · v` is admissible, given that both are.
    fn joins(&self, u: &Word, v: &Word) -> bool {
        match (u.last(), v.first()) {
            (Some(a), Some(b)) => self.allows(a, b),
            _ => true,
        }
    }

    /// Admissible words of length `k`, lexicographic.
    pub fn words(&self, k: usize, cap: usize) -> Result<Vec<Word>> {
        words_over(&self.successors, k, cap)
    }

    pub fn render_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        w.symbols()
            .iter()
            .map(|&s| self.labels[s].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Symbols that may follow `w`: everything after the empty word.
    fn followers(&self, w: &Word) -> Vec<usize> {
        match w.last() {
            Some(l) => self.successors[l].clone(),
            None => (0..self.size()).collect(),
        }
    }
}

type TermMap = BTreeMap<(Word, Word), BigInt>;

/// A finite integer combination `Σ c · S_μ S_ν*` over one alphabet.
#[derive(Clone)]
pub struct WordOperator {
    alphabet: Arc<Alphabet>,
    terms: TermMap,
}

impl WordOperator {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        Self {
            alphabet: Arc::clone(alphabet),
            terms: TermMap::new(),
        }
    }

    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        Self::monomial(alphabet, BigInt::one(), Word::empty(), Word::empty())
    }

    /// `coef · S_μ S_ν*`; both words must be admissible.
    pub fn term(
        alphabet: &Arc<Alphabet>,
        coef: impl Into<BigInt>,
        mu: Word,
        nu: Word,
    ) -> Result<Self> {
        for w in [&mu, &nu] {
            if !alphabet.is_admissible(w) {
                return Err(Error::InadmissibleWord(w.symbols().to_vec()));
            }
        }
        Ok(Self::monomial(alphabet, coef.into(), mu, nu))
    }

    fn monomial(alphabet: &Arc<Alphabet>, coef: BigInt, mu: Word, nu: Word) -> Self {
        let mut terms = TermMap::new();
        if !coef.is_zero() {
            terms.insert((mu, nu), coef);
        }
        Self {
            alphabet: Arc::clone(alphabet),
            terms,
        }
    }

    /// The generator `S_s`.
    pub fn generator(alphabet: &Arc<Alphabet>, s: usize) -> Result<Self> {
        Self::term(alphabet, 1, Word(vec![s]), Word::empty())
    }

    /// `S_w` for an admissible word.
    pub fn isometry(alphabet: &Arc<Alphabet>, w: &Word) -> Result<Self> {
        Self::term(alphabet, 1, w.clone(), Word::empty())
    }

    /// Range projection `S_w S_w*`.
    pub fn projection(alphabet: &Arc<Alphabet>, w: &Word) -> Result<Self> {
        Self::term(alphabet, 1, w.clone(), w.clone())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Terms as stored (not normalized).
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, &BigInt)> {
        self.terms.iter().map(|((m, n), c)| (m, n, c))
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    fn accumulate(terms: &mut TermMap, key: (Word, Word), coef: BigInt) {
        if coef.is_zero() {
            return;
        }
        let entry = terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            Self::accumulate(&mut terms, k.clone(), c.clone());
        }
        Ok(Self {
            alphabet: Arc::clone(&self.alphabet),
            terms,
        })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut terms = TermMap::new();
        if !k.is_zero() {
            for (key, c) in &self.terms {
                terms.insert(key.clone(), c * k);
            }
        }
        Self {
            alphabet: Arc::clone(&self.alphabet),
            terms,
        }
    }

    /// Bilinear product. On monomials,
    /// `S_μ S_ν* · S_α S_β*` is `S_{μγ} S_β*` when `α = νγ`,
    /// `S_μ S_{βγ}*` when `ν = αγ`, and `0` when neither word extends the
    /// other. For `α = ν ≠ ε` the middle factor `S_ν* S_ν = Σ_j A(ν, j) S_j S_j*`
    /// is expanded.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let alpha = &self.alphabet;
        let mut terms = TermMap::new();
        for ((mu, nu), a) in &self.terms {
            for ((al, be), b) in &other.terms {
                let coef = a * b;
                if let Some(gamma) = al.strip_prefix(nu) {
                    if gamma.is_empty() {
                        match nu.last() {
                            None => Self::accumulate(&mut terms, (mu.clone(), be.clone()), coef),
                            Some(l) => {
                                for &j in alpha.successors(l) {
                                    if alpha.extends(mu, j) && alpha.extends(be, j) {
                                        Self::accumulate(
                                            &mut terms,
                                            (mu.push(j), be.push(j)),
                                            coef.clone(),
                                        );
                                    }
                                }
                            }
                        }
                    } else if alpha.joins(mu, &gamma) {
                        Self::accumulate(&mut terms, (mu.concat(&gamma), be.clone()), coef);
                    }
                } else if let Some(gamma) = nu.strip_prefix(al) {
                    if alpha.joins(be, &gamma) {
                        Self::accumulate(&mut terms, (mu.clone(), be.concat(&gamma)), coef);
                    }
                }
            }
        }
        Ok(Self {
            alphabet: Arc::clone(alpha),
            terms,
        })
    }

    /// `(S_μ S_ν*)* = S_ν S_μ*`, extended linearly.
    pub fn adjoint(&self) -> Self {
        Self {
            alphabet: Arc::clone(&self.alphabet),
            terms: self
                .terms
                .iter()
                .map(|((m, n), c)| ((n.clone(), m.clone()), c.clone()))
                .collect(),
        }
    }

    fn depth(&self) -> usize {
        self.terms
            .keys()
            .map(|(m, n)| m.len().min(n.len()))
            .max()
            .unwrap_or(0)
    }

    /// Canonical form at `depth`: every term expanded until
    /// `min(|μ|, |ν|) = depth`, vanishing terms dropped. Requires `depth` to
    /// be at least the current maximum of `min(|μ|, |ν|)`.
    pub fn normalize(&self, depth: usize) -> BTreeMap<(Word, Word), BigInt> {
        let mut out = TermMap::new();
        for ((mu, nu), c) in &self.terms {
            self.expand_into(mu.clone(), nu.clone(), c, depth, &mut out);
        }
        out
    }

    fn expand_into(&self, mu: Word, nu: Word, c: &BigInt, depth: usize, out: &mut TermMap) {
        let alpha = &self.alphabet;
        if mu.len().min(nu.len()) >= depth {
            let vanishes = match (mu.last(), nu.last()) {
                (Some(a), Some(b)) => !alpha.successors(a).iter().any(|&j| alpha.allows(b, j)),
                _ => false,
            };
            if !vanishes {
                Self::accumulate(out, (mu, nu), c.clone());
            }
            return;
        }
        for e in alpha.followers(&mu) {
            if alpha.extends(&nu, e) {
                self.expand_into(mu.push(e), nu.push(e), c, depth, out);
            }
        }
    }

    /// Exact equality in the algebra.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.same_ambient(other)?;
        let depth = self.depth().max(other.depth());
        Ok(self.normalize(depth) == other.normalize(depth))
    }

    pub fn is_zero(&self) -> bool {
        self.normalize(self.depth()).is_empty()
    }

    /// True when the operator lies in the diagonal, i.e. its canonical form
    /// only has terms `S_μ S_μ*`.
    pub fn is_diagonal(&self) -> bool {
        self.normalize(self.depth()).keys().all(|(m, n)| m == n)
    }

    /// `self ≤ other` for projections, tested as `self · other = self`.
    pub fn is_subprojection_of(&self, other: &Self) -> Result<bool> {
        self.checked_mul(other)?.equals(self)
    }

    pub fn is_projection(&self) -> bool {
        (self * self).equals(self).unwrap_or(false) && self.adjoint().equals(self).unwrap_or(false)
    }
}

impl fmt::Debug for WordOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WordOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let a = &self.alphabet;
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((m, n), c)| {
                let body = match (m.is_empty(), n.is_empty()) {
                    (true, true) => "1".to_string(),
                    (false, true) => format!("S[{}]", a.render_word(m)),
                    (true, false) => format!("S[{}]*", a.render_word(n)),
                    (false, false) => format!("S[{}]S[{}]*", a.render_word(m), a.render_word(n)),
                };
                if c.is_one() {
                    body
                } else {
                    format!("{c}·{body}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// Operator sugar for code that builds identities over a single alphabet.
// These panic on mismatched alphabets; use the `checked_*` methods otherwise.

impl Add for &WordOperator {
    type Output = WordOperator;

    fn add(self, rhs: &WordOperator) -> WordOperator {
        self.checked_add(rhs)
            .expect("operators over the same alphabet")
    }
}

impl Sub for &WordOperator {
    type Output = WordOperator;

    fn sub(self, rhs: &WordOperator) -> WordOperator {
        self.checked_add(&-rhs)
            .expect("operators over the same alphabet")
    }
}

impl Neg for &WordOperator {
    type Output = WordOperator;

    fn neg(self) -> WordOperator {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &WordOperator {
    type Output = WordOperator;

    fn mul(self, rhs: &WordOperator) -> WordOperator {
        self.checked_mul(rhs)
            .expect("operators over the same alphabet")
    }
}

/// Sum of a list of operators over `alphabet`.
pub fn sum<'a>(
    alphabet: &Arc<Alphabet>,
    ops: impl IntoIterator<Item = &'a WordOperator>,
) -> WordOperator {
    ops.into_iter()
        .fold(WordOperator::zero(alphabet), |acc, x| &acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imat;

    fn edge_alphabet(m: IntMatrix) -> Arc<Alphabet> {
        Alphabet::edges(&MarkovShift::validate(m).unwrap()).unwrap()
    }

    fn w(s: &[usize]) -> Word {
        Word(s.to_vec())
    }

    fn proj(a: &Arc<Alphabet>, s: &[usize]) -> WordOperator {
        WordOperator::projection(a, &w(s)).unwrap()
    }

    fn gen(a: &Arc<Alphabet>, s: usize) -> WordOperator {
        WordOperator::generator(a, s).unwrap()
    }

    #[test]
    fn projection_idempotent() {
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        let p = proj(&a, &[0]);
        assert!((&p * &p).equals(&p).unwrap());
        assert!(p.is_projection());
    }

    #[test]
    fn source_projection_relation() {
        // S_e* S_e = Σ_f A^G(e, f) S_f S_f*
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        for e in 0..a.size() {
            let s = gen(&a, e);
            let lhs = &s.adjoint() * &s;
            let rhs = sum(
                &a,
                &a.successors(e)
                    .iter()
                    .map(|&f| proj(&a, &[f]))
                    .collect::<Vec<_>>(),
            );
            assert!(lhs.equals(&rhs).unwrap(), "edge {e}");
        }
    }

    #[test]
    fn orthogonal_ranges() {
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        assert!((&proj(&a, &[0]) * &proj(&a, &[1])).is_zero());
        assert!((&gen(&a, 0).adjoint() * &gen(&a, 1)).is_zero());
    }

    #[test]
    fn adjoint_rules() {
        let a = edge_alphabet(imat![[1, 1], [1, 1]]);
        let x = WordOperator::term(&a, 3, w(&[0, 1]), w(&[2])).unwrap();
        let y = WordOperator::term(&a, -2, w(&[1]), w(&[3, 2])).unwrap();
        assert!(x.adjoint().adjoint().equals(&x).unwrap());
        assert!((&x * &y)
            .adjoint()
            .equals(&(&y.adjoint() * &x.adjoint()))
            .unwrap());
        assert!((&x + &y)
            .adjoint()
            .equals(&(&x.adjoint() + &y.adjoint()))
            .unwrap());
        let id = WordOperator::identity(&a);
        assert!(id.adjoint().equals(&id).unwrap());
        let t = WordOperator::term(&a, 1, w(&[0]), w(&[2])).unwrap();
        let expected = WordOperator::term(&a, 1, w(&[2]), w(&[0])).unwrap();
        assert!(t.adjoint().equals(&expected).unwrap());
    }

    #[test]
    fn sum_of_range_projections_is_one() {
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        let total = sum(
            &a,
            &(0..a.size()).map(|e| proj(&a, &[e])).collect::<Vec<_>>(),
        );
        assert!(total.equals(&WordOperator::identity(&a)).unwrap());
        assert!(!proj(&a, &[0]).equals(&WordOperator::identity(&a)).unwrap());
    }

    #[test]
    fn term_equals_its_expansion() {
        let a = edge_alphabet(imat![[1, 1, 0], [0, 1, 1], [1, 0, 1]]);
        for mu in a.words(2, 100).unwrap() {
            let t = WordOperator::term(&a, 1, mu.clone(), mu.clone()).unwrap();
            let last = mu.last().unwrap();
            let expanded = sum(
                &a,
                &a.successors(last)
                    .iter()
                    .map(|&e| WordOperator::projection(&a, &mu.push(e)).unwrap())
                    .collect::<Vec<_>>(),
            );
            assert!(t.equals(&expanded).unwrap());
        }
    }

    #[test]
    fn vertex_alphabet_with_unequal_rows() {
        // golden mean on vertices: S_2* S_2 = S_1 S_1*, not 1
        let shift = MarkovShift::validate(imat![[1, 1], [1, 0]]).unwrap();
        let a = Alphabet::vertices(&shift).unwrap();
        let s2 = gen(&a, 1);
        assert!((&s2.adjoint() * &s2).equals(&proj(&a, &[0])).unwrap());
        // S_1 S_2* S_2 S_1* = S_1 S_1 S_1 S_1* ... = S_{11}S_{11}*
        let s1 = gen(&a, 0);
        let lhs = &(&s1 * &s2.adjoint()) * &(&s2 * &s1.adjoint());
        assert!(lhs.equals(&proj(&a, &[0, 0])).unwrap());
        // S_2 S_2 = 0
        assert!((&s2 * &s2).is_zero());
    }

    #[test]
    fn inadmissible_words_rejected() {
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        // e12 e12 is not admissible (t(e12) = 2, s(e12) = 1)
        assert_eq!(
            WordOperator::term(&a, 1, w(&[1, 1]), Word::empty()).unwrap_err(),
            Error::InadmissibleWord(vec![1, 1])
        );
    }

    #[test]
    fn ambient_mismatch() {
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        let b = edge_alphabet(imat![[2]]);
        let x = WordOperator::identity(&a);
        let y = WordOperator::identity(&b);
        assert_eq!(x.checked_mul(&y).unwrap_err(), Error::AmbientMismatch);
        assert_eq!(x.equals(&y).unwrap_err(), Error::AmbientMismatch);
    }

    #[test]
    fn subprojection_order() {
        let a = edge_alphabet(imat![[1, 1], [1, 0]]);
        let p0 = proj(&a, &[0]);
        let p01 = proj(&a, &[0, 1]);
        assert!(p01.is_subprojection_of(&p0).unwrap());
        assert!(!p0.is_subprojection_of(&p01).unwrap());
        assert!(p0.is_subprojection_of(&WordOperator::identity(&a)).unwrap());
    }
}
