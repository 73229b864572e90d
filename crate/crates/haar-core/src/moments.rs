//! Exact joint moments E[Π_j Tr U^{p_j}] over Haar measure on U(N).
//!
//! Expanding the product over eigenvalues groups the indices into blocks that land on the
//! same eigenvalue. A block partition with block frequency sums P_B contributes
//! ∫ det[S_N(θ_b − θ_a)] Π_B e^{iP_B θ_B}, and expanding the determinant over permutations
//! leaves, for each cycle, the number of Fourier modes k ∈ [0, N) for which every partial
//! shift of k along the cycle stays in [0, N). That number is max(0, N − (max − min)) of
//! the partial offsets, and it is zero unless the offsets return to zero.

use itertools::Itertools;
use num_complex::Complex64;

/// All set partitions of `0..n`, each a list of blocks.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for x in 0..n {
        let mut next = Vec::new();
        for part in &out {
            for b in 0..part.len() {
                let mut p = part.clone();
                p[b].push(x);
                next.push(p);
            }
            let mut p = part.clone();
            p.push(vec![x]);
            next.push(p);
        }
        out = next;
    }
    out
}

/// A permutation of the blocks, stored by cycles together with its sign.
#[derive(Debug, Clone)]
struct CycleForm {
    sign: i128,
    cycles: Vec<Vec<usize>>,
}

fn cycle_form(perm: &[usize]) -> CycleForm {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut b = start;
        while !seen[b] {
            seen[b] = true;
            cycle.push(b);
            b = perm[b];
        }
        if cycle.len() % 2 == 0 {
            sign = -sign;
        }
        cycles.push(cycle);
    }
    CycleForm { sign, cycles }
}

/// Precomputed partitions and permutations for moments of a fixed order n.
#[derive(Debug, Clone)]
pub struct MomentPlan {
    order: usize,
    partitions: Vec<(Vec<Vec<usize>>, Vec<CycleForm>)>,
}

impl MomentPlan {
    pub fn new(order: usize) -> Self {
        let partitions = set_partitions(order)
            .into_iter()
            .map(|blocks| {
                let forms = (0..blocks.len()).permutations(blocks.len()).map(|p| cycle_form(&p)).collect();
                (blocks, forms)
            })
            .collect();
        MomentPlan { order, partitions }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// E[Π_j Tr U^{p_j}] for U Haar on U(N).
    pub fn moment(&self, p: &[i64], n: usize) -> i128 {
        assert_eq!(p.len(), self.order);
        let n = n as i64;
        let mut total: i128 = 0;
        let mut sums = Vec::with_capacity(self.order);
        for (blocks, forms) in &self.partitions {
            sums.clear();
            sums.extend(blocks.iter().map(|b| b.iter().map(|&j| p[j]).sum::<i64>()));
            'perm: for form in forms {
                let mut prod: i128 = 1;
                for cycle in &form.cycles {
                    // Walking the cycle a → σ(a), the offset drops by the frequency of the
                    // block entered at each step.
                    let (mut off, mut lo, mut hi) = (0i64, 0i64, 0i64);
                    for idx in 0..cycle.len() {
                        let next = cycle[(idx + 1) % cycle.len()];
                        off -= sums[next];
                        lo = lo.min(off);
                        hi = hi.max(off);
                    }
                    let count = (n - (hi - lo)).max(0);
                    if off != 0 || count == 0 {
                        continue 'perm;
                    }
                    prod *= count as i128;
                }
                total += form.sign * prod;
            }
        }
        total
    }
}

/// E[Π_j Tr U^{p_j}] for U Haar on U(N).
pub fn cue_trace_moment(p: &[i64], n: usize) -> i128 {
    MomentPlan::new(p.len()).moment(p, n)
}

/// Tr U^m = Σ_j e^{imθ_j} for m = 0, …, `max_power`.
pub fn power_traces(phases: &[f64], max_power: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); max_power + 1];
    for &theta in phases {
        let step = Complex64::from_polar(1.0, theta);
        let mut w = Complex64::new(1.0, 0.0);
        for slot in out.iter_mut() {
            *slot += w;
            w *= step;
        }
    }
    out
}
