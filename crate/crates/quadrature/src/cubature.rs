//! Integration over [`ConstrainedDomain`]s.
//!
//! Up to [`QuadratureOptions::max_tensor_dim`] dimensions the integral is computed by
//! nested adaptive Gauss-Kronrod quadrature whose limits come from the Fourier-Motzkin
//! projection, so the integrand is only ever sampled inside the domain. Higher
//! dimensions use randomly shifted Halton points in the bounding box with the
//! constraints applied as indicators; the error is the standard error across shifts.

use crate::domain::{ConstrainedDomain, Projection, MAX_DIM};
use crate::gk::{adaptive_gk, GkOptions};
use crate::{Estimate, QuadError, QuadValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::Cell;

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The domain interior is empty; the value is exactly zero.
    Empty,
    /// Nested adaptive Gauss-Kronrod.
    Adaptive,
    /// Randomized quasi Monte Carlo.
    QuasiMonteCarlo,
    /// Plain Monte Carlo.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest dimension handled by nested adaptive quadrature.
    pub max_tensor_dim: usize,
    /// Maximum number of subintervals per 1-d adaptive pass.
    pub max_intervals: usize,
    /// Points per randomized quasi Monte Carlo replicate.
    pub qmc_points: usize,
    /// Number of independent random shifts.
    pub qmc_shifts: usize,
    pub seed: u64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_tensor_dim: 3,
            max_intervals: 200,
            qmc_points: 1 << 14,
            qmc_shifts: 16,
            seed: 0x5eed,
        }
    }
}

/// Integrates `f` over `domain` with default options and absolute tolerance `tol`.
pub fn integrate<T, F>(f: F, domain: &ConstrainedDomain, tol: f64) -> Result<Estimate<T>, QuadError>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T + Sync,
{
    let opts = QuadratureOptions { abs_tol: tol, ..QuadratureOptions::default() };
    integrate_with(f, domain, &opts)
}

/// Integrates `f` over `domain`.
///
/// An empty interior gives exactly `(0, 0)`. When the adaptive scheme cannot reach the
/// tolerance the achieved estimate is returned inside [`QuadError::NonConvergence`].
pub fn integrate_with<T, F>(f: F, domain: &ConstrainedDomain, opts: &QuadratureOptions) -> Result<Estimate<T>, QuadError>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T + Sync,
{
    domain.validate()?;
    let d = domain.dim();
    let empty = Estimate { value: T::zero(), error: 0.0, evaluations: 0, method: Method::Empty };
    if domain.lower.iter().zip(&domain.upper).any(|(lo, hi)| hi <= lo) {
        return Ok(empty);
    }
    if d == 0 {
        let inside = domain.constraints.iter().all(|c| c.constant < 0.0);
        return Ok(if inside {
            Estimate { value: f(&[]), error: 0.0, evaluations: 1, method: Method::Adaptive }
        } else {
            empty
        });
    }
    let projection = domain.project();
    if let Some(p) = &projection {
        if p.empty {
            return Ok(empty);
        }
    }
    match projection {
        Some(p) if d <= opts.max_tensor_dim => nested(&f, &p, d, opts),
        _ => Ok(qmc(&f, domain, opts)),
    }
}

fn nested<T, F>(f: &F, proj: &Projection, d: usize, opts: &QuadratureOptions) -> Result<Estimate<T>, QuadError>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let evaluations = Cell::new(0usize);
    let ctx = Nested { f, proj, d, opts, evaluations: &evaluations };
    let est = ctx.level(0, [0.0; MAX_DIM], opts.abs_tol);
    let target = opts.abs_tol.max(opts.rel_tol * est.value.magnitude());
    if est.error > 10.0 * target {
        return Err(QuadError::NonConvergence { value: est.value.magnitude(), error: est.error });
    }
    Ok(Estimate { value: est.value, error: est.error, evaluations: evaluations.get(), method: Method::Adaptive })
}

struct Nested<'a, F> {
    f: &'a F,
    proj: &'a Projection,
    d: usize,
    opts: &'a QuadratureOptions,
    evaluations: &'a Cell<usize>,
}

impl<F> Nested<'_, F> {
    /// Integrates over coordinate `k` with the outer coordinates fixed in `prefix`.
    /// Inner passes get a tolerance scaled by the width of the current interval.
    fn level<T: QuadValue>(&self, k: usize, prefix: [f64; MAX_DIM], abs_tol: f64) -> Estimate<T>
    where
        F: Fn(&[f64]) -> T,
    {
        let (lo, hi) = self.proj.bounds(k, &prefix[..k]);
        if !(hi > lo) {
            return Estimate { value: T::zero(), error: 0.0, evaluations: 0, method: Method::Empty };
        }
        let gk = GkOptions { abs_tol, rel_tol: self.opts.rel_tol, max_intervals: self.opts.max_intervals };
        let inner_tol = 0.1 * abs_tol / (hi - lo);
        adaptive_gk(
            |t| {
                let mut p = prefix;
                p[k] = t;
                if k + 1 == self.d {
                    self.evaluations.set(self.evaluations.get() + 1);
                    (self.f)(&p[..self.d])
                } else {
                    self.level(k + 1, p, inner_tol).value
                }
            },
            lo,
            hi,
            &gk,
        )
    }
}

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

const PRIMES: [u64; MAX_DIM] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn qmc<T, F>(f: &F, domain: &ConstrainedDomain, opts: &QuadratureOptions) -> Estimate<T>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let d = domain.dim();
    let vol = domain.box_volume();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shifts = opts.qmc_shifts.max(2);
    let mut replicate = Vec::with_capacity(shifts);
    let mut x = vec![0.0; d];
    for _ in 0..shifts {
        let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let mut acc = T::zero();
        for i in 1..=opts.qmc_points as u64 {
            for j in 0..d {
                let u = (radical_inverse(i, PRIMES[j]) + shift[j]).fract();
                x[j] = domain.lower[j] + u * (domain.upper[j] - domain.lower[j]);
            }
            if domain.constraints.iter().all(|c| c.satisfied(&x)) {
                acc = acc + f(&x);
            }
        }
        replicate.push(acc * (vol / opts.qmc_points as f64));
    }
    let (mean, se) = mean_and_se(&replicate);
    Estimate { value: mean, error: se, evaluations: shifts * opts.qmc_points, method: Method::QuasiMonteCarlo }
}

fn mean_and_se<T: QuadValue>(xs: &[T]) -> (T, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().fold(T::zero(), |a, &b| a + b) * (1.0 / n);
    let var = xs.iter().map(|&x| (x - mean).magnitude().powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Plain Monte Carlo over the bounding box with constraint indicators.
///
/// The error is the sample standard error, so it shrinks like `1/√points`.
pub fn monte_carlo<T, F>(f: F, domain: &ConstrainedDomain, points: usize, seed: u64) -> Result<Estimate<T>, QuadError>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    domain.validate()?;
    let d = domain.dim();
    let vol = domain.box_volume();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; d];
    let mut sum = T::zero();
    let mut sum_sq = 0.0;
    for _ in 0..points {
        for j in 0..d {
            x[j] = domain.lower[j] + rng.random::<f64>() * (domain.upper[j] - domain.lower[j]);
        }
        let v = if domain.contains(&x) { f(&x) * vol } else { T::zero() };
        sum = sum + v;
        sum_sq += v.magnitude().powi(2);
    }
    let n = points as f64;
    let mean = sum * (1.0 / n);
    let var = (sum_sq / n - mean.magnitude().powi(2)).max(0.0) * n / (n - 1.0);
    Ok(Estimate { value: mean, error: (var / n).sqrt(), evaluations: points, method: Method::MonteCarlo })
}
