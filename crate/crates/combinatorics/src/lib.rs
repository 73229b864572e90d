//! Index configurations of the n-level correlation formulas.
//!
//! Index sets are sorted lists over {1, …, n}. Every iterator is lazy and deterministic, and
//! every configuration carries its derived sets and sign.

use itertools::Itertools;
use std::fmt::Write as _;

/// Default cap on n for enumerations that grow combinatorially.
pub const DEFAULT_MAX_N: usize = 8;

/// A partition K + L + M = {1, …, n}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionKLM {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
    pub m: Vec<usize>,
}

impl PartitionKLM {
    pub fn n(&self) -> usize {
        self.k.len() + self.l.len() + self.m.len()
    }
}

/// A bijection K → L stored as pairs (k_j, l_j) with k₁ < k₂ < ⋯.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairingKL {
    pub pairs: Vec<(usize, usize)>,
}

impl PairingKL {
    /// The same pairing with its pairs sorted by the K element.
    pub fn canonical(&self) -> PairingKL {
        let mut pairs = self.pairs.clone();
        pairs.sort();
        PairingKL { pairs }
    }
}

/// One configuration of the second-layer sum: a pair of subsets R ⊊ K, Q ⊊ L, a pairing
/// (R:Q), splits R₁ ⊊ R^c and Q₁ ⊊ Q^c, and the chosen k ∈ R₁^c, l ∈ Q₁^c.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Q2Config {
    pub k_set: Vec<usize>,
    pub l_set: Vec<usize>,
    pub r: Vec<usize>,
    pub q: Vec<usize>,
    pub pairing: PairingKL,
    /// Complement of R in K.
    pub r_c: Vec<usize>,
    /// Complement of Q in L.
    pub q_c: Vec<usize>,
    pub r1: Vec<usize>,
    pub q1: Vec<usize>,
    /// Complement of R₁ in R^c.
    pub r1_c: Vec<usize>,
    /// Complement of Q₁ in Q^c.
    pub q1_c: Vec<usize>,
    pub k: usize,
    pub l: usize,
    pub r1_lt: Vec<usize>,
    pub r1_gt: Vec<usize>,
    pub q1_lt: Vec<usize>,
    pub q1_gt: Vec<usize>,
    /// R₁^c ∪ R₁^{>k} ∪ Q₁^{<l} ∪ {l}.
    pub s1: Vec<usize>,
    /// R₁^{<k} ∪ Q₁^{>l} ∪ (Q₁^c minus l).
    pub s2: Vec<usize>,
    /// (−1)^{|R₁^{>k} ∪ Q₁^{>l}|}.
    pub sign: i32,
}

impl Q2Config {
    /// Variables integrated over (0, ∞): (R^c minus k) ∪ (Q^c minus l).
    pub fn positive_vars(&self) -> Vec<usize> {
        union(&[&remove(&self.r_c, self.k), &remove(&self.q_c, self.l)])
    }
}

/// One configuration of the third-layer sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Q3Config {
    pub k_set: Vec<usize>,
    pub l_set: Vec<usize>,
    pub r: Vec<usize>,
    pub q: Vec<usize>,
    pub pairing: PairingKL,
    pub r_c: Vec<usize>,
    pub q_c: Vec<usize>,
    /// The four-way split R^c = R₁ ∪ R₁^c ∪ R₂ ∪ R₂^c, where R₁^c and R₂^c are named parts.
    pub r1: Vec<usize>,
    pub r1_c: Vec<usize>,
    pub r2: Vec<usize>,
    pub r2_c: Vec<usize>,
    /// The four-way split Q^c = Q₁ ∪ Q₁^c ∪ Q₂ ∪ Q₂^c.
    pub q1: Vec<usize>,
    pub q1_c: Vec<usize>,
    pub q2: Vec<usize>,
    pub q2_c: Vec<usize>,
    pub k1: usize,
    pub k2: usize,
    pub l1: usize,
    pub l2: usize,
    /// R₁ ∪ Q₁^c.
    pub big_k1: Vec<usize>,
    /// R₂ ∪ Q₂^c.
    pub big_k2: Vec<usize>,
    /// Q₁ ∪ R₁^c.
    pub big_l1: Vec<usize>,
    /// Q₂ ∪ R₂^c.
    pub big_l2: Vec<usize>,
    /// R₁^{<k₁} ∪ R₂^{<k₂} ∪ Q₁^{>l₁} ∪ Q₂^{>l₂} ∪ Q₁^c ∪ Q₂^c.
    pub a: Vec<usize>,
    /// R₁^{>k₁} ∪ R₂^{>k₂} ∪ Q₁^{<l₁} ∪ Q₂^{<l₂} ∪ R₁^c ∪ R₂^c.
    pub b: Vec<usize>,
    /// (−1)^{|R₁^{>k₁} ∪ R₂^{>k₂} ∪ Q₁^{>l₁} ∪ Q₂^{>l₂}|}.
    pub sign: i32,
}

/// Elements of `set` strictly below and strictly above `pivot`.
pub fn split_relative(set: &[usize], pivot: usize) -> (Vec<usize>, Vec<usize>) {
    let below = set.iter().copied().filter(|&x| x < pivot).collect();
    let above = set.iter().copied().filter(|&x| x > pivot).collect();
    (below, above)
}

/// Elements of `set` that are at most `pivot`.
pub fn at_most(set: &[usize], pivot: usize) -> Vec<usize> {
    set.iter().copied().filter(|&x| x <= pivot).collect()
}

/// Elements of `set` that are at least `pivot`.
pub fn at_least(set: &[usize], pivot: usize) -> Vec<usize> {
    set.iter().copied().filter(|&x| x >= pivot).collect()
}

/// Sorted union of several sorted sets.
pub fn union(sets: &[&[usize]]) -> Vec<usize> {
    sets.iter().flat_map(|s| s.iter().copied()).sorted().dedup().collect()
}

/// `set` without the elements of `other`.
pub fn difference(set: &[usize], other: &[usize]) -> Vec<usize> {
    set.iter().copied().filter(|x| !other.contains(x)).collect()
}

fn remove(set: &[usize], x: usize) -> Vec<usize> {
    difference(set, &[x])
}

fn sign_of(len: usize) -> i32 {
    if len % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Every partition K + L + M of {1, …, n}, 3ⁿ in total, ordered by the base-3 label word.
pub fn enum_klm(n: usize) -> impl Iterator<Item = PartitionKLM> {
    let total = 3usize.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut p = PartitionKLM { k: Vec::new(), l: Vec::new(), m: Vec::new() };
        let mut labels = vec![0; n];
        for slot in labels.iter_mut().rev() {
            *slot = code % 3;
            code /= 3;
        }
        for (i, label) in labels.into_iter().enumerate() {
            match label {
                0 => p.k.push(i + 1),
                1 => p.l.push(i + 1),
                _ => p.m.push(i + 1),
            }
        }
        p
    })
}

/// Every bijection from K to L, each once in canonical form. Empty when |K| ≠ |L|.
pub fn enum_pairings(k: &[usize], l: &[usize]) -> impl Iterator<Item = PairingKL> {
    let k: Vec<usize> = k.iter().copied().sorted().collect();
    let l: Vec<usize> = l.iter().copied().sorted().collect();
    let size = if k.len() == l.len() { k.len() } else { usize::MAX };
    let perms: Box<dyn Iterator<Item = Vec<usize>>> = if size == usize::MAX {
        Box::new(std::iter::empty())
    } else {
        Box::new(l.clone().into_iter().permutations(size))
    };
    perms.map(move |perm| PairingKL { pairs: k.iter().copied().zip(perm).collect() })
}

/// Proper subsets of `set` (including the empty set), ordered by size then lexicographically.
fn proper_subsets(set: &[usize]) -> Vec<Vec<usize>> {
    (0..set.len()).flat_map(|r| set.iter().copied().combinations(r)).collect()
}

/// Every second-layer configuration for the given K and L.
pub fn enum_q2_configs(k_set: &[usize], l_set: &[usize]) -> impl Iterator<Item = Q2Config> {
    let k_set: Vec<usize> = k_set.iter().copied().sorted().collect();
    let l_set: Vec<usize> = l_set.iter().copied().sorted().collect();
    let max_r = k_set.len().min(l_set.len());
    let outer: Vec<(Vec<usize>, Vec<usize>)> = (0..max_r)
        .flat_map(|size| {
            let ks = k_set.clone();
            let ls = l_set.clone();
            ks.into_iter()
                .combinations(size)
                .cartesian_product(ls.into_iter().combinations(size).collect::<Vec<_>>())
        })
        .collect();
    outer.into_iter().flat_map(move |(r, q)| {
        let k_set = k_set.clone();
        let l_set = l_set.clone();
        let r_c = difference(&k_set, &r);
        let q_c = difference(&l_set, &q);
        let pairings: Vec<PairingKL> = enum_pairings(&r, &q).collect();
        let r1s = proper_subsets(&r_c);
        let q1s = proper_subsets(&q_c);
        pairings.into_iter().flat_map(move |pairing| {
            let (k_set, l_set, r, q, r_c, q_c) =
                (k_set.clone(), l_set.clone(), r.clone(), q.clone(), r_c.clone(), q_c.clone());
            r1s.clone().into_iter().cartesian_product(q1s.clone()).flat_map(move |(r1, q1)| {
                let r1_c = difference(&r_c, &r1);
                let q1_c = difference(&q_c, &q1);
                let base = (k_set.clone(), l_set.clone(), r.clone(), q.clone(), pairing.clone(), r_c.clone(), q_c.clone());
                r1_c.clone().into_iter().cartesian_product(q1_c.clone()).map(move |(k, l)| {
                    build_q2(base.clone(), r1.clone(), q1.clone(), r1_c.clone(), q1_c.clone(), k, l)
                })
            })
        })
    })
}

type Q2Base = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>, PairingKL, Vec<usize>, Vec<usize>);

fn build_q2(base: Q2Base, r1: Vec<usize>, q1: Vec<usize>, r1_c: Vec<usize>, q1_c: Vec<usize>, k: usize, l: usize) -> Q2Config {
    let (k_set, l_set, r, q, pairing, r_c, q_c) = base;
    let (r1_lt, r1_gt) = split_relative(&r1, k);
    let (q1_lt, q1_gt) = split_relative(&q1, l);
    let s1 = union(&[&r1_c, &r1_gt, &q1_lt, &[l]]);
    let s2 = union(&[&r1_lt, &q1_gt, &remove(&q1_c, l)]);
    let sign = sign_of(union(&[&r1_gt, &q1_gt]).len());
    Q2Config {
        k_set,
        l_set,
        r,
        q,
        pairing,
        r_c,
        q_c,
        r1,
        q1,
        r1_c,
        q1_c,
        k,
        l,
        r1_lt,
        r1_gt,
        q1_lt,
        q1_gt,
        s1,
        s2,
        sign,
    }
}

/// Labelings of `set` into four named parts with parts 0 and 2 nonempty.
/// Returned as (part0, part1, part2, part3).
fn four_way_splits(set: &[usize]) -> Vec<[Vec<usize>; 4]> {
    let set = set.to_vec();
    std::iter::repeat_n(0..4usize, set.len())
        .multi_cartesian_product()
        .filter_map(|labels| {
            let mut parts: [Vec<usize>; 4] = Default::default();
            for (&x, &lab) in set.iter().zip(&labels) {
                parts[lab].push(x);
            }
            (!parts[0].is_empty() && !parts[2].is_empty()).then_some(parts)
        })
        .collect()
}

/// Every third-layer configuration for the given K and L.
pub fn enum_q3_configs(k_set: &[usize], l_set: &[usize]) -> impl Iterator<Item = Q3Config> {
    let k_set: Vec<usize> = k_set.iter().copied().sorted().collect();
    let l_set: Vec<usize> = l_set.iter().copied().sorted().collect();
    let mut out = Vec::new();
    if k_set.len() >= 2 && l_set.len() >= 2 {
        let max_r = (k_set.len() - 2).min(l_set.len() - 2);
        for size in 0..=max_r {
            for r in k_set.iter().copied().combinations(size) {
                for q in l_set.iter().copied().combinations(size) {
                    out.push((r.clone(), q));
                }
            }
        }
    }
    out.into_iter().flat_map(move |(r, q)| {
        let k_set = k_set.clone();
        let l_set = l_set.clone();
        let r_c = difference(&k_set, &r);
        let q_c = difference(&l_set, &q);
        let pairings: Vec<PairingKL> = enum_pairings(&r, &q).collect();
        let rs = four_way_splits(&r_c);
        let qs = four_way_splits(&q_c);
        let mut configs = Vec::new();
        for pairing in &pairings {
            for rsplit in &rs {
                for qsplit in &qs {
                    let [r1, r1_c, r2, r2_c] = rsplit;
                    let [q1, q1_c, q2, q2_c] = qsplit;
                    for (&k1, &k2) in r1.iter().cartesian_product(r2) {
                        if k2 <= k1 {
                            continue;
                        }
                        for (&l1, &l2) in q1.iter().cartesian_product(q2) {
                            if l2 <= l1 {
                                continue;
                            }
                            let (r1_lt, r1_gt) = split_relative(r1, k1);
                            let (r2_lt, r2_gt) = split_relative(r2, k2);
                            let (q1_lt, q1_gt) = split_relative(q1, l1);
                            let (q2_lt, q2_gt) = split_relative(q2, l2);
                            configs.push(Q3Config {
                                k_set: k_set.clone(),
                                l_set: l_set.clone(),
                                r: r.clone(),
                                q: q.clone(),
                                pairing: pairing.clone(),
                                r_c: r_c.clone(),
                                q_c: q_c.clone(),
                                r1: r1.clone(),
                                r1_c: r1_c.clone(),
                                r2: r2.clone(),
                                r2_c: r2_c.clone(),
                                q1: q1.clone(),
                                q1_c: q1_c.clone(),
                                q2: q2.clone(),
                                q2_c: q2_c.clone(),
                                k1,
                                k2,
                                l1,
                                l2,
                                big_k1: union(&[r1, q1_c]),
                                big_k2: union(&[r2, q2_c]),
                                big_l1: union(&[q1, r1_c]),
                                big_l2: union(&[q2, r2_c]),
                                a: union(&[&r1_lt, &r2_lt, &q1_gt, &q2_gt, q1_c, q2_c]),
                                b: union(&[&r1_gt, &r2_gt, &q1_lt, &q2_lt, r1_c, r2_c]),
                                sign: sign_of(union(&[&r1_gt, &r2_gt, &q1_gt, &q2_gt]).len()),
                            });
                        }
                    }
                }
            }
        }
        configs.into_iter()
    })
}

/// Configuration counts for one (|K|, |L|) shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusRow {
    pub n: usize,
    pub k_size: usize,
    pub l_size: usize,
    pub partitions: usize,
    pub pairings: usize,
    pub q2_configs: usize,
    pub q3_configs: usize,
}

/// Configuration counts grouped by (|K|, |L|), summed over all partitions of {1, …, n}.
pub fn term_census(n: usize) -> Vec<CensusRow> {
    let mut rows: Vec<CensusRow> = Vec::new();
    for p in enum_klm(n) {
        let pairings = enum_pairings(&p.k, &p.l).count();
        let q2 = enum_q2_configs(&p.k, &p.l).count();
        let q3 = enum_q3_configs(&p.k, &p.l).count();
        match rows.iter_mut().find(|r| r.k_size == p.k.len() && r.l_size == p.l.len()) {
            Some(row) => {
                row.partitions += 1;
                row.pairings += pairings;
                row.q2_configs += q2;
                row.q3_configs += q3;
            }
            None => rows.push(CensusRow {
                n,
                k_size: p.k.len(),
                l_size: p.l.len(),
                partitions: 1,
                pairings,
                q2_configs: q2,
                q3_configs: q3,
            }),
        }
    }
    rows.sort_by_key(|r| (r.k_size, r.l_size));
    rows
}

/// The census as CSV with a header line.
pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("n,k_size,l_size,partitions,pairings,q2_configs,q3_configs\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{},{}", r.n, r.k_size, r.l_size, r.partitions, r.pairings, r.q2_configs, r.q3_configs);
    }
    out
}
