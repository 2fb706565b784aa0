//! Oracles and corpora shared by the integration suites. Nothing here calls
//! the routines it is used to check.

#![allow(dead_code)]

use ckflow::linalg::SnfResult;
use ckflow::{IntMatrix, MarkovShift};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(rows).unwrap()
}

/// Leibniz expansion over all permutations.
pub fn det_leibniz(a: &IntMatrix) -> BigInt {
    let n = a.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    loop {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut term = if inversions % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        for (i, &p) in perm.iter().enumerate() {
            term *= a.get(i, p);
        }
        total += term;
        if !next_permutation(&mut perm) {
            return total;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut s = BigInt::zero();
            for k in 0..a.cols() {
                s += a.get(i, k) * b.get(k, j);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Checks the full Smith normal form contract, returning the first
/// violation.
pub fn snf_contract(input: &IntMatrix, snf: &SnfResult) -> Result<(), String> {
    let (r, c) = (input.rows(), input.cols());
    if mul(&mul(&snf.u, input), &snf.v) != snf.d {
        return Err("U·M·V != D".into());
    }
    for (name, t, n) in [("U", &snf.u, r), ("V", &snf.v, c)] {
        if t.rows() != n || t.cols() != n {
            return Err(format!("{name} has the wrong shape"));
        }
        if det_leibniz(t).abs() != BigInt::one() {
            return Err(format!("|det {name}| != 1"));
        }
    }
    let mut diag = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let x = snf.d.get(i, j);
            if i == j {
                if x.is_negative() {
                    return Err(format!("negative diagonal entry {x}"));
                }
                diag.push(x.clone());
            } else if !x.is_zero() {
                return Err(format!("off-diagonal entry at ({i}, {j})"));
            }
        }
    }
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() {
            w[1].is_zero()
        } else {
            w[1].is_multiple_of(&w[0])
        };
        if !ok {
            return Err(format!("{} does not divide {}", w[0], w[1]));
        }
    }
    if r == c {
        let product: BigInt = diag.iter().product();
        if det_leibniz(input).abs() != product {
            return Err("|det M| != product of the diagonal".into());
        }
    }
    Ok(())
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> IntMatrix {
    let entries = (0..rows * cols)
        .map(|_| BigInt::from(rng.gen_range(lo..=hi)))
        .collect();
    IntMatrix::new(rows, cols, entries).unwrap()
}

/// Independent strong-connectivity test by transitive closure.
pub fn strongly_connected(a: &IntMatrix) -> bool {
    let n = a.rows();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| !a.get(i, j).is_zero()).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach.iter().all(|row| row.iter().all(|&x| x))
}

pub fn is_permutation(a: &IntMatrix) -> bool {
    let n = a.rows();
    (0..n).all(|i| {
        (0..n).filter(|&j| !a.get(i, j).is_zero()).count() == 1
            && a.row(i).iter().all(|x| x <= &BigInt::one())
    }) && (0..n).all(|j| (0..n).filter(|&i| !a.get(i, j).is_zero()).count() == 1)
}

/// Random irreducible non-permutation matrix with entries in `0..=max`.
pub fn random_shift(rng: &mut impl Rng, n: usize, max: i64) -> MarkovShift {
    loop {
        let a = random_matrix(rng, n, n, 0, max);
        if strongly_connected(&a) && !is_permutation(&a) {
            return MarkovShift::validate(a).expect("oracle agrees with validation");
        }
    }
}

/// Fixed corpus of irreducible non-permutation matrices up to 4x4, 0-1
/// first.
pub fn corpus() -> Vec<MarkovShift> {
    let rows: Vec<IntMatrix> = vec![
        m(&[&[1, 1], &[1, 0]]),
        m(&[&[1, 1], &[1, 1]]),
        m(&[&[0, 1], &[1, 1]]),
        m(&[&[1, 1, 0], &[0, 0, 1], &[1, 1, 1]]),
        m(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]),
        m(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]),
        m(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]),
        m(&[&[1, 1, 0], &[1, 0, 1], &[1, 1, 1]]),
        m(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 1, 0, 0]]),
        m(&[&[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 1]]),
        m(&[&[0, 1, 1, 0], &[1, 0, 0, 1], &[1, 0, 0, 1], &[0, 1, 1, 0]]),
        m(&[&[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]]),
        m(&[&[0, 1, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 1], &[1, 1, 1, 0]]),
        m(&[&[1, 0, 0, 1], &[1, 0, 1, 0], &[0, 1, 0, 1], &[0, 1, 1, 0]]),
        m(&[&[2]]),
        m(&[&[3]]),
        m(&[&[2, 1], &[1, 0]]),
        m(&[&[1, 2], &[1, 1]]),
        m(&[&[0, 2, 0], &[0, 0, 1], &[1, 0, 1]]),
        m(&[&[2, 1], &[1, 2]]),
    ];
    rows.into_iter()
        .map(|a| MarkovShift::validate(a).expect("corpus matrices are valid shifts"))
        .collect()
}

pub fn is_zero_one(a: &IntMatrix) -> bool {
    a.entries().iter().all(|x| x.is_zero() || x.is_one())
}

/// Euler's totient by counting units, for cross-checking.
pub fn phi_brute(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Invariant-factor lists `d_1 | d_2 | ... | d_k` (all `d_i ≥ 2`) of every
/// finite abelian group of order at most `max_order`, the trivial group
/// included as the empty list.
pub fn abelian_groups_up_to(max_order: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, order: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let start = prefix.last().copied().unwrap_or(1);
        let mut next = if start == 1 { 2 } else { start };
        while order * next <= max {
            if next % start == 0 {
                prefix.push(next);
                extend(prefix, order * next, max, out);
                prefix.pop();
            }
            next += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_order, &mut out);
    out
}

/// Number of automorphisms of `⊕ Z/d_j`, counted as the number of tuples
/// `(g_1, ..., g_k)` with `ord(g_j) = d_j` that generate the group: each
/// such tuple is the image of the standard generators under exactly one
/// automorphism. The count runs over the subgroup generated so far, with
/// memoization, so it never lists the tuples.
pub fn count_automorphisms(d: &[u64]) -> u128 {
    use std::collections::HashMap;

    let n: usize = d.iter().product::<u64>() as usize;
    assert!(n <= 256, "bitset holds at most 256 elements");
    let decode = |mut i: usize| -> Vec<u64> {
        let mut x = vec![0; d.len()];
        for j in (0..d.len()).rev() {
            x[j] = (i as u64) % d[j];
            i /= d[j] as usize;
        }
        x
    };
    let encode = |x: &[u64]| -> usize {
        x.iter()
            .zip(d)
            .fold(0, |acc, (&xi, &dj)| acc * dj as usize + xi as usize)
    };
    let elems: Vec<Vec<u64>> = (0..n).map(decode).collect();
    let add: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let s: Vec<u64> = (0..d.len())
                        .map(|j| (elems[a][j] + elems[b][j]) % d[j])
                        .collect();
                    encode(&s)
                })
                .collect()
        })
        .collect();
    let order: Vec<u64> = (0..n)
        .map(|a| {
            let mut k = 1;
            let mut y = a;
            while y != 0 {
                y = add[y][a];
                k += 1;
            }
            k
        })
        .collect();

    type Set = [u64; 4];
    let members =
        |s: &Set| -> Vec<usize> { (0..n).filter(|&i| s[i / 64] >> (i % 64) & 1 == 1).collect() };
    let join = |h: &Set, x: usize| -> Set {
        let hs = members(h);
        let mut out = *h;
        let mut y = x;
        while h[y / 64] >> (y % 64) & 1 == 0 {
            for &e in &hs {
                let z = add[e][y];
                out[z / 64] |= 1 << (z % 64);
            }
            y = add[y][x];
        }
        out
    };

    #[allow(clippy::too_many_arguments)]
    fn go(
        j: usize,
        h: Set,
        size: u64,
        d: &[u64],
        n: usize,
        order: &[u64],
        join: &dyn Fn(&Set, usize) -> Set,
        memo: &mut HashMap<(usize, Set), u128>,
    ) -> u128 {
        if j == d.len() {
            return 1;
        }
        if let Some(&c) = memo.get(&(j, h)) {
            return c;
        }
        let mut total = 0;
        for x in 0..n {
            if order[x] != d[j] {
                continue;
            }
            let g = join(&h, x);
            let g_size: u64 = g.iter().map(|w| w.count_ones() as u64).sum();
            if g_size == size * d[j] {
                total += go(j + 1, g, g_size, d, n, order, join, memo);
            }
        }
        memo.insert((j, h), total);
        total
    }

    let mut zero: Set = [0; 4];
    zero[0] = 1;
    go(0, zero, 1, d, n, &order, &join, &mut HashMap::new())
}
