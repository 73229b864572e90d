//! Partitions of (A − S) + (B − T) into blocks of size at most two.
//!
//! Only singletons and mixed pairs (one element from each side) are produced, since a
//! same-side pair has H = 0 and contributes nothing.

/// One partition: matched pairs `(a_index, b_index)` plus the unmatched indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockPartition {
    pub pairs: Vec<(usize, usize)>,
    pub singles_a: Vec<usize>,
    pub singles_b: Vec<usize>,
}

/// All partitions of `{0..na} + {0..nb}` into singletons and mixed pairs.
///
/// Each partition appears once. The order is lexicographic by the sorted pair list, then
/// by the singleton lists.
pub fn partition_blocks(na: usize, nb: usize) -> impl Iterator<Item = BlockPartition> {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    let mut used_b = vec![false; nb];
    collect(0, na, nb, &mut pairs, &mut used_b, &mut out);
    out.sort();
    out.into_iter()
}

fn collect(
    a: usize,
    na: usize,
    nb: usize,
    pairs: &mut Vec<(usize, usize)>,
    used_b: &mut [bool],
    out: &mut Vec<BlockPartition>,
) {
    if a == na {
        let paired_a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        out.push(BlockPartition {
            pairs: pairs.clone(),
            singles_a: (0..na).filter(|i| !paired_a.contains(i)).collect(),
            singles_b: (0..nb).filter(|&j| !used_b[j]).collect(),
        });
        return;
    }
    collect(a + 1, na, nb, pairs, used_b, out);
    for b in 0..nb {
        if !used_b[b] {
            used_b[b] = true;
            pairs.push((a, b));
            collect(a + 1, na, nb, pairs, used_b, out);
            pairs.pop();
            used_b[b] = false;
        }
    }
}

/// Number of partitions produced by [`partition_blocks`]: Σ_k C(na,k)·C(nb,k)·k!.
pub fn partition_count(na: usize, nb: usize) -> usize {
    let choose = |n: usize, k: usize| -> usize { (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1)) };
    (0..=na.min(nb)).map(|k| choose(na, k) * choose(nb, k) * (1..=k).product::<usize>()).sum()
}
