//! Machine checks of the operator identities behind the flow-equivalence
//! moves: the defining relations, the expansion identities, the relative
//! bases of an elementary equivalence, and the corner transfer isometries.

use std::sync::Arc;

use super::{sum, Alphabet, WordOperator};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::moves::{expand_matrix, linking_matrix};
use crate::shift::{edge_transition_matrix, edges_of, MarkovShift, Word};

/// Longest `ν` tried by [`verify_corner_transfer`].
pub const DEFAULT_CORNER_MAX_LEN: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

/// Outcome of a verification: every identity checked, plus the words chosen
/// along the way (`(name, rendered word)`), which serve as certificates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub choices: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }

    fn check(&mut self, name: impl Into<String>, holds: bool) {
        self.checks.push(Check {
            name: name.into(),
            holds,
        });
    }

    fn check_eq(
        &mut self,
        name: impl Into<String>,
        x: &WordOperator,
        y: &WordOperator,
    ) -> Result<()> {
        let holds = x.equals(y)?;
        self.check(name, holds);
        Ok(())
    }
}

/// Edge alphabet of a matrix that need not be a valid shift on its own
/// (the linking matrix is periodic).
fn edge_alphabet_of(m: &IntMatrix) -> Result<(Arc<Alphabet>, Vec<crate::shift::Edge>)> {
    let edges = edges_of(m)?;
    let t = edge_transition_matrix(&edges)?;
    let labels = edges.iter().map(ToString::to_string).collect();
    Ok((Arc::new(Alphabet::from_transition(&t, labels)?), edges))
}

fn single(s: usize) -> Word {
    Word(vec![s])
}

/// `Σ_a S_a S_a* = 1` and `S_a* S_a = Σ_b A^G(a, b) S_b S_b*` in the edge
/// algebra.
pub fn verify_ck_relations(shift: &MarkovShift) -> Result<VerificationReport> {
    let a = Alphabet::edges(shift)?;
    let one = WordOperator::identity(&a);
    let ranges: Vec<WordOperator> = (0..a.size())
        .map(|e| WordOperator::projection(&a, &single(e)))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::default();
    report.check_eq("sum of range projections = 1", &sum(&a, &ranges), &one)?;
    for e in 0..a.size() {
        let s = WordOperator::generator(&a, e)?;
        let source = &s.adjoint() * &s;
        let rhs = sum(&a, a.successors(e).iter().map(|&f| &ranges[f]));
        report.check_eq(
            format!("S*S = sum of followers for {}", a.label(e)),
            &source,
            &rhs,
        )?;
        report.check(
            format!("S S* is a projection for {}", a.label(e)),
            ranges[e].is_projection(),
        );
    }
    Ok(report)
}

/// Identities in the algebra of the expansion `Ã` of a 0-1 matrix at `v`.
///
/// `S̃_0` is the inserted vertex and `S̃_1` the old vertex, which now points
/// only to it; `P` is the sum of the range projections of all vertices other
/// than the inserted one.
pub fn verify_expansion_identities(shift: &MarkovShift, v: usize) -> Result<VerificationReport> {
    let expanded = expand_matrix(shift.matrix(), v)?;
    let labels = (0..expanded.rows())
        .map(|i| match i.cmp(&v) {
            std::cmp::Ordering::Less => (i + 1).to_string(),
            std::cmp::Ordering::Equal => format!("{}'", v + 1),
            std::cmp::Ordering::Greater => i.to_string(),
        })
        .collect();
    let a = Arc::new(Alphabet::from_transition(&expanded, labels)?);
    let one = WordOperator::identity(&a);
    let s0 = WordOperator::generator(&a, v)?;
    let s1 = WordOperator::generator(&a, v + 1)?;
    let p0 = WordOperator::projection(&a, &single(v))?;
    let p = &one - &p0;

    let s1_p_s1 = &(&s1.adjoint() * &p) * &s1;
    let s1_s1 = &s1.adjoint() * &s1;
    let s0_s0 = &s0 * &s0.adjoint();

    let mut report = VerificationReport::default();
    report.check("P is a projection", p.is_projection());
    report.check_eq("S1* P S1 = S1* S1", &s1_p_s1, &s1_s1)?;
    report.check_eq("S1* S1 = S0 S0*", &s1_s1, &s0_s0)?;
    report.check_eq("P + S0 S0* = 1", &(&p + &s0_s0), &one)?;
    report.check_eq("P + S1* P S1 = 1", &(&p + &s1_p_s1), &one)?;
    let x1 = p.clone();
    let x2 = &p * &s1;
    let basis = &(&x1.adjoint() * &x1) + &(&x2.adjoint() * &x2);
    report.check_eq("x1* x1 + x2* x2 = 1", &basis, &one)?;
    Ok(report)
}

/// Relative bases of an elementary equivalence `A = CD`, `B = DC`, in the
/// edge algebra of the linking matrix `Z = [[0, C], [D, 0]]`.
///
/// `E_C` are the edges of `Z` leaving the `A` block and `E_D` those leaving
/// the `B` block. For each `d_k ∈ E_D` the lexicographically first
/// `c(k) ∈ E_C` with `c(k) d_k` admissible gives `x_k = S_{c(k)} S_{d_k} S_{d_k}*`,
/// and symmetrically `y_l = S_{d(l)} S_{c_l} S_{c_l}*`.
pub fn verify_sse_basis(c: &IntMatrix, d: &IntMatrix) -> Result<VerificationReport> {
    MarkovShift::validate(c.multiply(d)?)?;
    MarkovShift::validate(d.multiply(c)?)?;
    let z = linking_matrix(c, d)?;
    let (a, edges) = edge_alphabet_of(&z)?;
    let n = c.rows();
    let e_c: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].source < n).collect();
    let e_d: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].source >= n).collect();

    let mut report = VerificationReport::default();
    let pick = |from: &[usize], next: usize, what: &str| -> Result<usize> {
        from.iter()
            .copied()
            .find(|&e| a.allows(e, next))
            .ok_or_else(|| {
                Error::NoAdmissibleChoice(format!("no {what} edge composes with {}", a.label(next)))
            })
    };
    let mut xs = Vec::with_capacity(e_d.len());
    for (k, &dk) in e_d.iter().enumerate() {
        let ck = pick(&e_c, dk, "C")?;
        report
            .choices
            .push((format!("c({})", k + 1), a.render_word(&Word(vec![ck, dk]))));
        xs.push(WordOperator::term(&a, 1, Word(vec![ck, dk]), single(dk))?);
    }
    let mut ys = Vec::with_capacity(e_c.len());
    for (l, &cl) in e_c.iter().enumerate() {
        let dl = pick(&e_d, cl, "D")?;
        report
            .choices
            .push((format!("d({})", l + 1), a.render_word(&Word(vec![dl, cl]))));
        ys.push(WordOperator::term(&a, 1, Word(vec![dl, cl]), single(cl))?);
    }

    let range = |set: &[usize]| -> Result<WordOperator> {
        let ops = set
            .iter()
            .map(|&e| WordOperator::projection(&a, &single(e)))
            .collect::<Result<Vec<_>>>()?;
        Ok(sum(&a, &ops))
    };
    let p_a = range(&e_c)?;
    let p_b = range(&e_d)?;
    let one = WordOperator::identity(&a);
    report.check_eq("P_A + P_B = 1", &(&p_a + &p_b), &one)?;

    let gram = |ops: &[WordOperator]| {
        sum(
            &a,
            &ops.iter().map(|x| &x.adjoint() * x).collect::<Vec<_>>(),
        )
    };
    report.check_eq("sum x_k* x_k = P_B", &gram(&xs), &p_b)?;
    report.check_eq("sum y_l* y_l = P_A", &gram(&ys), &p_a)?;

    let mut in_corner = true;
    for x in &xs {
        in_corner &= (&(&p_a * x) * &p_b).equals(x)?;
    }
    report.check("x_k in P_A O_Z P_B", in_corner);
    let mut in_corner = true;
    for y in &ys {
        in_corner &= (&(&p_b * y) * &p_a).equals(y)?;
    }
    report.check("y_l in P_B O_Z P_A", in_corner);

    let sample = diagonal_sample(&a)?;
    report.check(
        "x_n* D x_m = 0 for n != m",
        cross_terms_vanish(&xs, &sample)?,
    );
    report.check(
        "y_n* D y_m = 0 for n != m",
        cross_terms_vanish(&ys, &sample)?,
    );
    report.check("x_k* D x_k is diagonal", conjugates_diagonal(&xs, &sample));
    report.check("y_l* D y_l is diagonal", conjugates_diagonal(&ys, &sample));
    Ok(report)
}

/// `1` and the range projections of all words of length one.
fn diagonal_sample(a: &Arc<Alphabet>) -> Result<Vec<WordOperator>> {
    let mut sample = vec![WordOperator::identity(a)];
    for e in 0..a.size() {
        sample.push(WordOperator::projection(a, &single(e))?);
    }
    Ok(sample)
}

fn cross_terms_vanish(ops: &[WordOperator], sample: &[WordOperator]) -> Result<bool> {
    let adjoints: Vec<WordOperator> = ops.iter().map(WordOperator::adjoint).collect();
    for delta in sample {
        let left: Vec<WordOperator> = adjoints.iter().map(|x| x * delta).collect();
        for (n, l) in left.iter().enumerate() {
            for (m, x) in ops.iter().enumerate() {
                if n != m && !l.checked_mul(x)?.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn conjugates_diagonal(ops: &[WordOperator], sample: &[WordOperator]) -> bool {
    ops.iter().all(|x| {
        let xa = x.adjoint();
        sample
            .iter()
            .all(|delta| (&(&xa * delta) * x).is_diagonal() && (&(x * delta) * &xa).is_diagonal())
    })
}

/// Transfer of a corner: `Q = Σ_k S_{μ(k)} S_{μ(k)}*` for equal-length words
/// of the edge alphabet and `P = 1 - Q`. For each `k` the shortest, then
/// lexicographically first, `ν(k)` with `S_ν S_ν* ≤ P` and `ν(k) μ(k)`
/// admissible gives `U_k = S_{ν(k)} S_{μ(k)} S_{μ(k)}*`, and the report checks
/// that the `U_k` move `Q` under `P`.
pub fn verify_corner_transfer(
    shift: &MarkovShift,
    q_words: &[Word],
    max_len: usize,
) -> Result<VerificationReport> {
    let a = Alphabet::edges(shift)?;
    let Some(first) = q_words.first() else {
        return Err(Error::BadProjection("no words given, so Q = 0".into()));
    };
    let len = first.len();
    if len == 0 {
        return Err(Error::BadProjection("the empty word gives Q = 1".into()));
    }
    for (i, w) in q_words.iter().enumerate() {
        if !a.is_admissible(w) {
            return Err(Error::InadmissibleWord(w.symbols().to_vec()));
        }
        if w.len() != len {
            return Err(Error::BadProjection("words must have equal length".into()));
        }
        if q_words[..i].contains(w) {
            return Err(Error::BadProjection(format!(
                "word {} is repeated, so the ranges overlap",
                a.render_word(w)
            )));
        }
    }
    let one = WordOperator::identity(&a);
    let projections = q_words
        .iter()
        .map(|w| WordOperator::projection(&a, w))
        .collect::<Result<Vec<_>>>()?;
    let q = sum(&a, &projections);
    if q.equals(&one)? {
        return Err(Error::BadProjection(
            "the words cover everything, so Q = 1 and P = 0".into(),
        ));
    }
    let p = &one - &q;

    let mut report = VerificationReport::default();
    let mut us = Vec::with_capacity(q_words.len());
    for (k, mu) in q_words.iter().enumerate() {
        let nu = find_transfer_word(&a, &p, mu, max_len)?;
        report
            .choices
            .push((format!("nu({})", k + 1), a.render_word(&nu)));
        us.push(WordOperator::term(&a, 1, nu.concat(mu), mu.clone())?);
    }

    let gram = sum(&a, &us.iter().map(|u| &u.adjoint() * u).collect::<Vec<_>>());
    report.check_eq("sum U_k* U_k = Q", &gram, &q)?;
    let mut below = true;
    for u in &us {
        below &= (u * &u.adjoint()).is_subprojection_of(&p)?;
    }
    report.check("U_k U_k* <= P", below);
    let mut orthogonal = true;
    for (k, u) in us.iter().enumerate() {
        for (l, v) in us.iter().enumerate() {
            if k != l {
                orthogonal &= u.checked_mul(&v.adjoint())?.is_zero();
            }
        }
    }
    report.check("U_k U_l* = 0 for k != l", orthogonal);
    Ok(report)
}

fn find_transfer_word(
    a: &Arc<Alphabet>,
    p: &WordOperator,
    mu: &Word,
    max_len: usize,
) -> Result<Word> {
    let head = mu.first().expect("words are nonempty");
    for len in 1..=max_len {
        for nu in a.words(len, crate::shift::DEFAULT_WORD_CAP)? {
            if !a.allows(nu.last().expect("len >= 1"), head) {
                continue;
            }
            if WordOperator::projection(a, &nu)?.is_subprojection_of(p)? {
                return Ok(nu);
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no word of length <= {max_len} leads into {} with range under P",
        a.render_word(mu)
    )))
}
