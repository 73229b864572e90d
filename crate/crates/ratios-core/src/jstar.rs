//! The combinatorial sum J*(A, B) and its truncations J*_q.
//!
//! J*(A,B) = Σ_{S⊂A, T⊂B, |S|=|T|} e^{−N(ΣS+ΣT)} Z(S,T)Z(S⁻,T⁻)/(Z†(S,S⁻)Z†(T,T⁻))
//!           · Σ_{partitions of (A−S)+(B−T) into blocks W, |W| ≤ 2} Π H_{S,T}(W).
//!
//! The truncation J*_q keeps the layers with |S| = |T| < q.

use crate::partitions::{partition_blocks, BlockPartition};
use crate::zfun::{z_dagger, z_product, zlog_deriv, zlog_deriv_prime};
use crate::RatiosError;
use num_complex::Complex64;
use std::fmt::Write as _;

/// Ordered shift sets A (the z_K) and B (the −z_L) together with the matrix size N.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentSets {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub matrix_size: usize,
}

impl ArgumentSets {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>, matrix_size: usize) -> Self {
        ArgumentSets { a, b, matrix_size }
    }

    /// Checks the contour layout used in the integral representation: every shift has
    /// positive real part, and real parts increase strictly along each list.
    pub fn is_spread(&self) -> bool {
        let ok = |v: &[Complex64]| v.iter().all(|x| x.re > 0.0) && v.windows(2).all(|w| w[0].re < w[1].re);
        ok(&self.a) && ok(&self.b)
    }
}

/// A block W of a partition of (A − S) + (B − T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    Alpha(Complex64),
    Beta(Complex64),
    Pair(Complex64, Complex64),
    /// Any other block shape, for which H vanishes.
    Other,
}

/// H_{S,T}(W).
pub fn h_st(w: Block, s: &[Complex64], t: &[Complex64]) -> Result<Complex64, RatiosError> {
    let zero = Complex64::new(0.0, 0.0);
    match w {
        Block::Alpha(alpha) => {
            let mut acc = zero;
            for &ah in s {
                acc += zlog_deriv(alpha - ah)?;
            }
            for &bh in t {
                acc -= zlog_deriv(alpha + bh)?;
            }
            Ok(acc)
        }
        Block::Beta(beta) => {
            let mut acc = zero;
            for &bh in t {
                acc += zlog_deriv(beta - bh)?;
            }
            for &ah in s {
                acc -= zlog_deriv(beta + ah)?;
            }
            Ok(acc)
        }
        Block::Pair(alpha, beta) => zlog_deriv_prime(alpha + beta),
        Block::Other => Ok(zero),
    }
}

fn pick(v: &[Complex64], idx: &[usize]) -> Vec<Complex64> {
    idx.iter().map(|&i| v[i]).collect()
}

fn rest(len: usize, idx: &[usize]) -> Vec<usize> {
    (0..len).filter(|i| !idx.contains(i)).collect()
}

/// The prefactor e^{−N(ΣS+ΣT)} Z(S,T)Z(S⁻,T⁻)/(Z†(S,S⁻)Z†(T,T⁻)).
pub fn layer_prefactor(s: &[Complex64], t: &[Complex64], matrix_size: usize) -> Result<Complex64, RatiosError> {
    let s_neg: Vec<Complex64> = s.iter().map(|x| -x).collect();
    let t_neg: Vec<Complex64> = t.iter().map(|x| -x).collect();
    let sum: Complex64 = s.iter().chain(t).sum();
    let expo = (-(matrix_size as f64) * sum).exp();
    Ok(expo * z_product(s, t)? * z_product(&s_neg, &t_neg)? / (z_dagger(s, &s_neg)? * z_dagger(t, &t_neg)?))
}

/// Σ over partitions of Π H, summed recursively over partial matchings.
fn partition_sum(singles_a: &[Complex64], singles_b: &[Complex64], pair: &[Vec<Complex64>], a: usize, used: &mut [bool]) -> Complex64 {
    if a == singles_a.len() {
        let mut acc = Complex64::new(1.0, 0.0);
        for (j, hb) in singles_b.iter().enumerate() {
            if !used[j] {
                acc *= hb;
            }
        }
        return acc;
    }
    let mut total = singles_a[a] * partition_sum(singles_a, singles_b, pair, a + 1, used);
    for j in 0..singles_b.len() {
        if !used[j] {
            used[j] = true;
            total += pair[a][j] * partition_sum(singles_a, singles_b, pair, a + 1, used);
            used[j] = false;
        }
    }
    total
}

/// Contribution of one (S, T) selection, given as index lists into A and B.
pub fn jstar_term(args: &ArgumentSets, s_idx: &[usize], t_idx: &[usize]) -> Result<Complex64, RatiosError> {
    if s_idx.len() != t_idx.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = pick(&args.a, s_idx);
    let t = pick(&args.b, t_idx);
    let pre = layer_prefactor(&s, &t, args.matrix_size)?;
    let ra = pick(&args.a, &rest(args.a.len(), s_idx));
    let rb = pick(&args.b, &rest(args.b.len(), t_idx));
    let ha = ra.iter().map(|&x| h_st(Block::Alpha(x), &s, &t)).collect::<Result<Vec<_>, _>>()?;
    let hb = rb.iter().map(|&x| h_st(Block::Beta(x), &s, &t)).collect::<Result<Vec<_>, _>>()?;
    let pair = ra
        .iter()
        .map(|&x| rb.iter().map(|&y| h_st(Block::Pair(x, y), &s, &t)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut used = vec![false; rb.len()];
    Ok(pre * partition_sum(&ha, &hb, &pair, 0, &mut used))
}

/// All k-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The layer |S| = |T| = `size` of J*.
pub fn jstar_layer(args: &ArgumentSets, size: usize) -> Result<Complex64, RatiosError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for s in subsets(args.a.len(), size) {
        for t in subsets(args.b.len(), size) {
            acc += jstar_term(args, &s, &t)?;
        }
    }
    Ok(acc)
}

/// J*_q: the layers with |S| = |T| < q, for q ∈ {1, 2, 3}.
pub fn jstar_q(args: &ArgumentSets, q: usize) -> Result<Complex64, RatiosError> {
    if !(1..=3).contains(&q) {
        return Err(RatiosError::InvalidOrder(q));
    }
    jstar_truncated(args, q)
}

/// J* with layers |S| = |T| < `q` for any q. With q > min(|A|, |B|) this is the full sum.
pub fn jstar_truncated(args: &ArgumentSets, q: usize) -> Result<Complex64, RatiosError> {
    let top = args.a.len().min(args.b.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for size in 0..q.min(top + 1) {
        acc += jstar_layer(args, size)?;
    }
    Ok(acc)
}

/// The untruncated J*(A, B).
pub fn jstar_full(args: &ArgumentSets) -> Result<Complex64, RatiosError> {
    jstar_truncated(args, args.a.len().min(args.b.len()) + 1)
}

/// One leaf of the J* term tree.
#[derive(Debug, Clone, PartialEq)]
pub struct JStarTerm {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// Partition of the remaining elements, indexed into A − S and B − T.
    pub partition: BlockPartition,
    pub value: Complex64,
}

/// Every (S, T, partition) term of J*_q with its value, in deterministic order.
pub fn jstar_terms(args: &ArgumentSets, q: usize) -> Result<Vec<JStarTerm>, RatiosError> {
    let top = args.a.len().min(args.b.len());
    let mut out = Vec::new();
    for size in 0..q.min(top + 1) {
        for s_idx in subsets(args.a.len(), size) {
            for t_idx in subsets(args.b.len(), size) {
                let s = pick(&args.a, &s_idx);
                let t = pick(&args.b, &t_idx);
                let pre = layer_prefactor(&s, &t, args.matrix_size)?;
                let ra = pick(&args.a, &rest(args.a.len(), &s_idx));
                let rb = pick(&args.b, &rest(args.b.len(), &t_idx));
                for p in partition_blocks(ra.len(), rb.len()) {
                    let mut v = pre;
                    for &(i, j) in &p.pairs {
                        v *= h_st(Block::Pair(ra[i], rb[j]), &s, &t)?;
                    }
                    for &i in &p.singles_a {
                        v *= h_st(Block::Alpha(ra[i]), &s, &t)?;
                    }
                    for &j in &p.singles_b {
                        v *= h_st(Block::Beta(rb[j]), &s, &t)?;
                    }
                    out.push(JStarTerm { s: s_idx.clone(), t: t_idx.clone(), partition: p, value: v });
                }
            }
        }
    }
    Ok(out)
}

/// Plain-text dump of the term tree, one line per term.
pub fn format_terms(terms: &[JStarTerm]) -> String {
    let mut out = String::new();
    for term in terms {
        let _ = writeln!(
            out,
            "S={:?} T={:?} pairs={:?} singles_a={:?} singles_b={:?} value={:+.12e}{:+.12e}i",
            term.s, term.t, term.partition.pairs, term.partition.singles_a, term.partition.singles_b, term.value.re, term.value.im
        );
    }
    out
}
