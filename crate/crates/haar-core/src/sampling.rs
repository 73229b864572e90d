//! Haar sampling through the QR factorization of a complex Ginibre matrix.
//!
//! Q from a plain QR factorization is not Haar distributed because the factorization is
//! only unique up to a diagonal phase. Multiplying Q by diag(R_jj/|R_jj|) removes that
//! freedom and gives the exact Haar law.
//!
//! Eigenphases come from the Cayley transform A = i(I − U)(I + U)⁻¹, which is Hermitian
//! with eigenvalues tan(θ_j/2), so a dense Hermitian eigensolver applies. When U has an
//! eigenvalue close to −1 the matrix is rotated by a quarter turn first.

use crate::HaarError;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Sorted eigenphases in [0, 2π) of one Haar-random matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseSample {
    pub phases: Vec<f64>,
    pub matrix_size: usize,
    pub seed: u64,
    pub draw: u64,
}

/// The generator for draw `draw` under `seed`: one ChaCha8 stream per draw.
fn draw_rng(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

/// A Haar-random N×N unitary determined by (seed, draw).
pub fn sample_haar_unitary(n: usize, seed: u64, draw: u64) -> Result<DMatrix<Complex64>, HaarError> {
    if n == 0 {
        return Err(HaarError::EmptyMatrix);
    }
    let mut rng = draw_rng(seed, draw);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Largest |tan(θ/2)| accepted before the Cayley transform is recomputed on a rotated matrix.
const CAYLEY_LIMIT: f64 = 1e4;

/// Eigenphases in [0, 2π) of a unitary matrix, sorted ascending.
pub fn unitary_eigenphases(u: &DMatrix<Complex64>) -> Result<Vec<f64>, HaarError> {
    let n = u.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    for quarter in 0..4 {
        let rot = Complex64::i().powi(quarter);
        let v = u * rot;
        let Some(y) = (&id + &v).lu().solve(&(&id - &v)) else { continue };
        let a = y * Complex64::i();
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let lambdas = h.symmetric_eigenvalues();
        if lambdas.iter().any(|l| !l.is_finite() || l.abs() > CAYLEY_LIMIT) {
            continue;
        }
        let shift = quarter as f64 * PI / 2.0;
        let mut phases: Vec<f64> = lambdas
            .iter()
            .map(|l| {
                let p = (2.0 * l.atan() - shift).rem_euclid(2.0 * PI);
                if p >= 2.0 * PI {
                    0.0
                } else {
                    p
                }
            })
            .collect();
        phases.sort_by(f64::total_cmp);
        return Ok(phases);
    }
    Err(HaarError::EigenSolver)
}

/// Sorted eigenphases of the Haar-random matrix for (seed, draw).
pub fn sample_haar_eigenphases(n: usize, seed: u64, draw: u64) -> Result<EigenphaseSample, HaarError> {
    let u = sample_haar_unitary(n, seed, draw)?;
    let phases = unitary_eigenphases(&u)?;
    Ok(EigenphaseSample { phases, matrix_size: n, seed, draw })
}

/// Draws `first..first + count` under `seed`, computed in parallel and returned in order.
pub fn sample_batch(n: usize, seed: u64, first: u64, count: usize) -> Result<Vec<EigenphaseSample>, HaarError> {
    (0..count as u64).into_par_iter().map(|i| sample_haar_eigenphases(n, seed, first + i)).collect()
}

/// max_{jk} |(U*U − I)_{jk}|.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for j in 0..prod.nrows() {
        for k in 0..prod.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((prod[(j, k)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// CSV with one row per matrix: N, seed, draw, then the phases.
pub fn samples_to_csv(samples: &[EigenphaseSample]) -> Result<String, HaarError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let width = samples.iter().map(|s| s.phases.len()).max().unwrap_or(0);
    let mut header = vec!["N".to_string(), "seed".to_string(), "draw".to_string()];
    header.extend((0..width).map(|j| format!("theta_{j}")));
    w.write_record(&header).map_err(|e| HaarError::Csv(e.to_string()))?;
    for s in samples {
        let mut row = vec![s.matrix_size.to_string(), s.seed.to_string(), s.draw.to_string()];
        row.extend(s.phases.iter().map(|p| format!("{p:.17e}")));
        w.write_record(&row).map_err(|e| HaarError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HaarError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HaarError::Csv(e.to_string()))
}
