use combinatorics::*;
use std::collections::HashSet;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All assignments of `set` to `parts` labels, as label vectors.
fn labelings(len: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..parts).map(move |p| {
                    let mut w = v.clone();
                    w.push(p);
                    w
                })
            })
            .collect();
    }
    out
}

fn select(set: &[usize], labels: &[usize], which: usize) -> Vec<usize> {
    set.iter().zip(labels).filter(|(_, &l)| l == which).map(|(&x, _)| x).collect()
}

/// Independent count of second-layer configurations: label K into {R, R₁, R₁^c} and L into
/// {Q, Q₁, Q₁^c}, then multiply by pairings and the choices of k and l.
fn brute_q2(k: &[usize], l: &[usize]) -> usize {
    let mut total = 0;
    for lk in labelings(k.len(), 3) {
        for ll in labelings(l.len(), 3) {
            let r = select(k, &lk, 0);
            let q = select(l, &ll, 0);
            if r.len() != q.len() {
                continue;
            }
            let r1c = select(k, &lk, 2).len();
            let q1c = select(l, &ll, 2).len();
            total += factorial(r.len()) * r1c * q1c;
        }
    }
    total
}

/// Independent count of third-layer configurations from five-way labelings.
fn brute_q3(k: &[usize], l: &[usize]) -> usize {
    let ordered = |a: &[usize], b: &[usize]| a.iter().map(|x| b.iter().filter(|&&y| y > *x).count()).sum::<usize>();
    let mut total = 0;
    for lk in labelings(k.len(), 5) {
        for ll in labelings(l.len(), 5) {
            let r = select(k, &lk, 0);
            let q = select(l, &ll, 0);
            if r.len() != q.len() {
                continue;
            }
            let (r1, r2) = (select(k, &lk, 1), select(k, &lk, 3));
            let (q1, q2) = (select(l, &ll, 1), select(l, &ll, 3));
            total += factorial(r.len()) * ordered(&r1, &r2) * ordered(&q1, &q2);
        }
    }
    total
}

#[test]
fn klm_counts_and_cover() {
    assert_eq!(enum_klm(1).count(), 3);
    assert_eq!(enum_klm(3).count(), 27);
    for n in 1..=7 {
        let all: HashSet<PartitionKLM> = enum_klm(n).collect();
        assert_eq!(all.len(), 3usize.pow(n as u32));
    }
    for p in enum_klm(4) {
        let mut all: Vec<usize> = p.k.iter().chain(&p.l).chain(&p.m).copied().collect();
        all.sort();
        assert_eq!(all, vec![1, 2, 3, 4]);
        assert_eq!(p.n(), 4);
    }
}

#[test]
fn pairing_remark_example() {
    let got: Vec<PairingKL> = enum_pairings(&[1, 3], &[2, 4]).collect();
    assert_eq!(got.len(), 2);
    assert_eq!(got[0].pairs, vec![(1, 2), (3, 4)]);
    assert_eq!(got[1].pairs, vec![(1, 4), (3, 2)]);
}

#[test]
fn pairings_sizes() {
    assert_eq!(enum_pairings(&[1, 2], &[3]).count(), 0);
    assert_eq!(enum_pairings(&[], &[]).count(), 1);
    let got: Vec<PairingKL> = enum_pairings(&[1, 2, 3], &[4, 5, 6]).collect();
    assert_eq!(got.len(), 6);
    let distinct: HashSet<_> = got.iter().cloned().collect();
    assert_eq!(distinct.len(), 6);
    for p in &got {
        assert_eq!(&p.canonical(), p);
        assert!(p.pairs.windows(2).all(|w| w[0].0 < w[1].0));
    }
    // Brute-force oracle: every bijection appears, found by scanning all 3-tuples of L.
    let mut oracle = 0;
    for a in 4..=6 {
        for b in 4..=6 {
            for c in 4..=6 {
                if a != b && b != c && a != c {
                    oracle += 1;
                    assert!(got.iter().any(|p| p.pairs == vec![(1, a), (2, b), (3, c)]));
                }
            }
        }
    }
    assert_eq!(oracle, 6);
}

#[test]
fn split_relative_examples() {
    assert_eq!(split_relative(&[1, 3, 5], 3), (vec![1], vec![5]));
    assert_eq!(split_relative(&[], 2), (vec![], vec![]));
    assert_eq!(split_relative(&[2, 4, 6, 8], 5), (vec![2, 4], vec![6, 8]));
}

#[test]
fn q2_single_pair() {
    let got: Vec<Q2Config> = enum_q2_configs(&[1], &[2]).collect();
    assert_eq!(got.len(), 1);
    let c = &got[0];
    assert!(c.r.is_empty() && c.q.is_empty() && c.r1.is_empty() && c.q1.is_empty());
    assert_eq!((c.k, c.l, c.sign), (1, 2, 1));
    assert_eq!(c.s1, vec![1, 2]);
    assert!(c.s2.is_empty());
    assert_eq!(enum_q2_configs(&[], &[1]).count(), 0);
    assert_eq!(enum_q2_configs(&[1, 2], &[]).count(), 0);
}

#[test]
fn q2_counts_match_brute_force() {
    for n in 1..=5 {
        for p in enum_klm(n) {
            assert_eq!(enum_q2_configs(&p.k, &p.l).count(), brute_q2(&p.k, &p.l), "{p:?}");
        }
    }
}

#[test]
fn q2_derived_sets() {
    for p in enum_klm(5) {
        for c in enum_q2_configs(&p.k, &p.l) {
            assert!(c.r1_c.contains(&c.k) && c.q1_c.contains(&c.l));
            let s1_minus_l = difference(&c.s1, &[c.l, c.k]);
            let parts = [s1_minus_l.clone(), c.s2.clone(), vec![c.k], vec![c.l]];
            let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
            let len = all.len();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), len, "overlap in {c:?}");
            // S₁ contains k, since k ∈ R₁^c, and the parts cover R^c ∪ Q^c.
            assert!(c.s1.contains(&c.k));
            assert!(!c.s2.contains(&c.l));
            assert_eq!(all, union(&[&c.r_c, &c.q_c]));
            let mut whole = union(&[&all, &c.r, &c.q, &p.m]);
            whole.sort();
            assert_eq!(whole, (1..=5).collect::<Vec<_>>());
            let expect = if union(&[&c.r1_gt, &c.q1_gt]).len() % 2 == 0 { 1 } else { -1 };
            assert_eq!(c.sign, expect);
            assert_eq!(c.positive_vars(), union(&[&difference(&c.r_c, &[c.k]), &difference(&c.q_c, &[c.l])]));
        }
    }
}

#[test]
fn q3_small_cases() {
    assert_eq!(enum_q3_configs(&[1], &[2, 3]).count(), 0);
    let got: Vec<Q3Config> = enum_q3_configs(&[1, 2], &[3, 4]).collect();
    assert_eq!(got.len(), brute_q3(&[1, 2], &[3, 4]));
    assert_eq!(got.len(), 1);
    let c = &got[0];
    assert_eq!((c.k1, c.k2, c.l1, c.l2, c.sign), (1, 2, 3, 4, 1));
    assert!(c.a.is_empty() && c.b.is_empty());
}

#[test]
fn q3_counts_and_invariants() {
    for n in 1..=5 {
        for p in enum_klm(n) {
            let configs: Vec<Q3Config> = enum_q3_configs(&p.k, &p.l).collect();
            assert_eq!(configs.len(), brute_q3(&p.k, &p.l), "{p:?}");
            for c in &configs {
                assert!(!c.r1.is_empty() && !c.r2.is_empty() && !c.q1.is_empty() && !c.q2.is_empty());
                assert!(c.k2 > c.k1 && c.l2 > c.l1);
                let big = [&c.big_k1, &c.big_k2, &c.big_l1, &c.big_l2];
                let total: usize = big.iter().map(|s| s.len()).sum();
                let joined = union(&[&c.big_k1, &c.big_k2, &c.big_l1, &c.big_l2]);
                assert_eq!(joined.len(), total);
                assert_eq!(joined, union(&[&c.r_c, &c.q_c]));
                let ab = union(&[&c.a, &c.b, &[c.k1, c.k2, c.l1, c.l2]]);
                assert_eq!(ab.len(), c.a.len() + c.b.len() + 4);
                assert_eq!(ab, union(&[&c.r_c, &c.q_c]));
            }
        }
    }
}

#[test]
fn census_totals() {
    let rows = term_census(3);
    assert_eq!(rows.iter().map(|r| r.partitions).sum::<usize>(), 27);
    let csv = census_csv(&rows);
    assert!(csv.starts_with("n,k_size,l_size"));
    assert_eq!(csv.lines().count(), rows.len() + 1);
    let n4 = term_census(4);
    let row22 = n4.iter().find(|r| r.k_size == 2 && r.l_size == 2).unwrap();
    assert_eq!(row22.q3_configs, 6);
}
