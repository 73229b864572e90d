//! Haar-random unitary matrices and the determinantal structure of their eigenphases.
//!
//! Eigenphases of a Haar-distributed N×N unitary have joint density proportional to
//! Π_{j<k} |e^{iθ_j} − e^{iθ_k}|², and their n-point correlation functions are the
//! determinants det[S_N(θ_k − θ_j)] of the kernel S_N(θ) = sin(Nθ/2)/(2π sin(θ/2)).

pub mod moments;
pub mod sampling;

pub use moments::{cue_trace_moment, power_traces, set_partitions, MomentPlan};
pub use sampling::{
    sample_batch, sample_haar_eigenphases, sample_haar_unitary, samples_to_csv, unitarity_defect, unitary_eigenphases,
    EigenphaseSample,
};

use nalgebra::DMatrix;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HaarError {
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("eigenvalue computation did not converge")]
    EigenSolver,
    #[error("csv export failed: {0}")]
    Csv(String),
}

/// Below this distance from 2πℤ the kernel returns its limiting value N/(2π).
pub const KERNEL_GUARD: f64 = 1e-8;

/// S_N(θ) = (1/2π)·sin(Nθ/2)/sin(θ/2).
pub fn kernel_sn(theta: f64, n: usize) -> f64 {
    let n_f = n as f64;
    let reduced = theta.rem_euclid(2.0 * PI);
    let dist = reduced.min(2.0 * PI - reduced);
    if dist < KERNEL_GUARD {
        // sin(Nθ/2)/sin(θ/2) → N·(±1)^{N−1} at θ = 2πm; the sign is (−1)^{m(N−1)}.
        let m = (theta / (2.0 * PI)).round() as i64;
        let sign = if (m * (n as i64 - 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return sign * n_f / (2.0 * PI);
    }
    (n_f * theta / 2.0).sin() / (2.0 * PI * (theta / 2.0).sin())
}

/// The n-point correlation R_n(θ₁, …, θ_n) = det[S_N(θ_k − θ_j)].
pub fn det_correlation(points: &[f64], n: usize) -> f64 {
    let m = points.len();
    let mat = DMatrix::from_fn(m, m, |j, k| kernel_sn(points[k] - points[j], n));
    mat.determinant()
}

/// The limiting pair correlation 1 − (sin πr / πr)².
pub fn pair_correlation_limit(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let s = (PI * r).sin() / (PI * r);
    1.0 - s * s
}

/// Counts of ordered eigenphase pairs j ≠ k by scaled separation
/// r = N·((θ_k − θ_j) mod 2π)/2π, on equal bins over [0, r_max).
#[derive(Debug, Clone, PartialEq)]
pub struct PairHistogram {
    pub matrix_size: usize,
    pub r_max: f64,
    pub counts: Vec<u64>,
    pub samples: usize,
}

impl PairHistogram {
    pub fn new(matrix_size: usize, bins: usize, r_max: f64) -> Self {
        PairHistogram { matrix_size, r_max, counts: vec![0; bins], samples: 0 }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        self.r_max / self.bins() as f64
    }

    /// Adds the pairs of one eigenphase sample.
    pub fn add(&mut self, phases: &[f64]) {
        let scale = self.matrix_size as f64 / (2.0 * PI);
        let width = self.width();
        let last = self.bins() - 1;
        for (j, a) in phases.iter().enumerate() {
            for (k, b) in phases.iter().enumerate() {
                if j == k {
                    continue;
                }
                let r = (b - a).rem_euclid(2.0 * PI) * scale;
                if r < self.r_max {
                    self.counts[((r / width) as usize).min(last)] += 1;
                }
            }
        }
        self.samples += 1;
    }

    /// Adds the counts of another histogram with the same binning.
    pub fn merge(&mut self, other: &PairHistogram) {
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.samples += other.samples;
    }

    /// Lower and upper edge of bin `b`.
    pub fn edges(&self, b: usize) -> (f64, f64) {
        (b as f64 * self.width(), (b + 1) as f64 * self.width())
    }

    /// Count in bin `b` divided by samples·N·width, which estimates the pair correlation.
    pub fn density(&self, b: usize) -> f64 {
        self.counts[b] as f64 / (self.samples as f64 * self.matrix_size as f64 * self.width())
    }

    /// Expected count in bin `b` when the scaled pair density integrates to `mass` over the bin.
    pub fn expected_count(&self, mass: f64) -> f64 {
        self.samples as f64 * self.matrix_size as f64 * mass
    }
}
