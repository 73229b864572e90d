//! The correlation sum in frequency space.
//!
//! Poisson summation over the periodic shifts turns the sum of F over all n-tuples of
//! periodically extended eigenphases into Σ_p I(p)·Π_j Tr U^{p_j}, where
//!
//! I(p) = 𝒯·N^{1−n} ∫ Π_j g_j(u_j) δ(Σu − 𝒯P) Φ((u/𝒯 − p)/N) du,   P = Σ_j p_j.
//!
//! The sum is finite: Φ confines |p_j| below ρN + Δ/𝒯 and the bumps confine |P| below
//! ΣΔ_j/𝒯. Averaging over Haar measure replaces the traces by exact joint moments, which
//! gives E[LHS] with no sampling error, and the leading-order bracket is the limit of
//! B_N = N^{−n} Σ_{P=0} Φ(p/N)·E[Π_j Tr U^{p_j}].

use crate::result::{ResultMetadata, StatisticResult};
use crate::EngineError;
use haar_core::{power_traces, MomentPlan};
use num_complex::Complex64;
use quadrature::{adaptive_gk, GkOptions};
use rayon::prelude::*;
use std::f64::consts::PI;
use testfn::{GridFunction, PhiFunction, TestFunctionBundle};

/// One nonzero weight I(p).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTerm {
    pub p: Vec<i64>,
    pub weight: f64,
}

/// All nonzero I(p) of a bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeights {
    pub n: usize,
    pub matrix_size: usize,
    /// Largest |p_j| among the terms.
    pub max_power: usize,
    pub terms: Vec<SpectralTerm>,
    /// Accumulated quadrature error of the weights.
    pub error: f64,
}

/// Largest integer strictly below `x`, for x > 0.
fn floor_strict(x: f64) -> i64 {
    let f = x.floor();
    if f == x {
        f as i64 - 1
    } else {
        f as i64
    }
}

fn gk_opts() -> GkOptions {
    GkOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 400 }
}

/// (log b)′ and (log b)″ of the unit bump at s, |s| < 1.
fn log_bump_derivatives(s: f64) -> (f64, f64) {
    let w = 1.0 - s * s;
    (-2.0 * s / (w * w), -2.0 / (w * w) - 8.0 * s * s / (w * w * w))
}

impl SpectralWeights {
    pub fn new(bundle: &TestFunctionBundle) -> Result<Self, EngineError> {
        let n = bundle.n();
        let (terms, error) = match n {
            1 => Ok(Self::one_point(bundle)),
            2 => Self::two_point(bundle),
            _ => Self::expanded(bundle),
        }?;
        let max_power = terms.iter().flat_map(|s| s.p.iter()).map(|p| p.unsigned_abs() as usize).max().unwrap_or(0);
        Ok(SpectralWeights { n, matrix_size: bundle.matrix_size, max_power, terms, error })
    }

    /// n = 1: f ≡ Φ(0), so I(p) = 𝒯·g(𝒯p)·Φ(0).
    fn one_point(bundle: &TestFunctionBundle) -> (Vec<SpectralTerm>, f64) {
        let g = bundle.bumps[0];
        let t = bundle.slow_scale;
        let pmax = floor_strict(g.half_width / t).max(0);
        let terms = (-pmax..=pmax)
            .map(|p| SpectralTerm { p: vec![p], weight: t * g.eval(t * p as f64) * bundle.phi.at_origin() })
            .filter(|s| s.weight != 0.0)
            .collect();
        (terms, 0.0)
    }

    /// n = 2: one-dimensional quadrature for every (p₁, p₂), including P ≠ 0.
    fn two_point(bundle: &TestFunctionBundle) -> Result<(Vec<SpectralTerm>, f64), EngineError> {
        let (g1, g2) = (bundle.bumps[0], bundle.bumps[1]);
        let t = bundle.slow_scale;
        let nf = bundle.matrix_size as f64;
        let rho = bundle.phi.rho;
        let pmax = floor_strict(rho * nf + g1.half_width.max(g2.half_width) / t);
        let big_p = floor_strict((g1.half_width + g2.half_width) / t).max(0);
        let mut pairs = Vec::new();
        for total in -big_p..=big_p {
            for p1 in -pmax..=pmax {
                pairs.push((p1, total - p1));
            }
        }
        let results: Vec<(SpectralTerm, f64)> = pairs
            .par_iter()
            .map(|&(p1, p2)| {
                let tp = t * (p1 + p2) as f64;
                // u ranges over the supports of g₁(u), g₂(𝒯P − u) and both Φ factors.
                let lo = (-g1.half_width)
                    .max(tp - g2.half_width)
                    .max(t * (p1 as f64 - rho * nf))
                    .max(tp - t * (p2 as f64 + rho * nf));
                let hi = g1
                    .half_width
                    .min(tp + g2.half_width)
                    .min(t * (p1 as f64 + rho * nf))
                    .min(tp - t * (p2 as f64 - rho * nf));
                if hi <= lo {
                    return (SpectralTerm { p: vec![p1, p2], weight: 0.0 }, 0.0);
                }
                let est = adaptive_gk(
                    |u| {
                        let x = [(u / t - p1 as f64) / nf, ((tp - u) / t - p2 as f64) / nf];
                        g1.eval(u) * g2.eval(tp - u) * bundle.phi.eval(&x)
                    },
                    lo,
                    hi,
                    &gk_opts(),
                );
                let scale = t / nf;
                (SpectralTerm { p: vec![p1, p2], weight: scale * est.value }, scale * est.error)
            })
            .collect();
        let error = results.iter().map(|(_, e)| e).sum();
        let terms = results.into_iter().map(|(s, _)| s).filter(|s| s.weight != 0.0).collect();
        Ok((terms, error))
    }

    /// n ≥ 3: second-order expansion of Φ((u/𝒯 − p)/N) around −p/N.
    ///
    /// The bumps share one shape, so the first moments of u under Π g_j δ(Σu) vanish and
    /// the second moments are M_jj = m₂, M_ij = −m₂/(n−1). The neglected third-order term
    /// is of relative size (Δ/𝒯N)³.
    fn expanded(bundle: &TestFunctionBundle) -> Result<(Vec<SpectralTerm>, f64), EngineError> {
        let n = bundle.n();
        let width = bundle.bumps[0].half_width;
        if bundle.bumps.iter().any(|g| (g.half_width - width).abs() > 1e-15 * width) {
            return Err(EngineError::InvalidParameter("spectral weights for n ≥ 3 need bumps of one half-width".into()));
        }
        let t = bundle.slow_scale;
        if n as f64 * width >= t {
            return Err(EngineError::InvalidParameter(format!(
                "spectral weights for n ≥ 3 need 𝒯 = {t} above the total bump width {}",
                n as f64 * width
            )));
        }
        let nf = bundle.matrix_size as f64;
        let rho = bundle.phi.rho;
        let (c0, m2) = bump_moments(bundle);
        let pmax = floor_strict(rho * nf);
        let prefactor = t * nf.powi(1 - n as i32);
        let curvature = 0.5 * m2 / (t * nf).powi(2) / (rho * rho);
        let phi = bundle.phi;
        let terms: Vec<SpectralTerm> = zero_sum_tuples(n, pmax)
            .into_par_iter()
            .filter_map(|p| {
                let x: Vec<f64> = p.iter().map(|&v| v as f64 / nf).collect();
                let base = phi.eval(&x);
                if base == 0.0 {
                    return None;
                }
                let mut diag = 0.0;
                let mut sum_a = 0.0;
                let mut sum_a2 = 0.0;
                for &xj in &x {
                    let (a, c) = log_bump_derivatives(xj / rho);
                    diag += a * a + c;
                    sum_a += a;
                    sum_a2 += a * a;
                }
                let cross = sum_a * sum_a - sum_a2;
                let hess = diag - cross / (n as f64 - 1.0);
                let weight = prefactor * base * (c0 + curvature * hess);
                Some(SpectralTerm { p, weight })
            })
            .collect();
        Ok((terms, 0.0))
    }

    /// Σ_p I(p)·Π_j Tr U^{p_j} for one set of eigenphases.
    pub fn sample_value(&self, phases: &[f64]) -> f64 {
        let traces = power_traces(phases, self.max_power);
        let tr = |p: i64| if p >= 0 { traces[p as usize] } else { traces[(-p) as usize].conj() };
        let mut acc = 0.0;
        for term in &self.terms {
            let mut prod = Complex64::new(term.weight, 0.0);
            for &pj in &term.p {
                prod *= tr(pj);
            }
            acc += prod.re;
        }
        acc
    }

    /// The n = 2 sum restricted to distinct eigenphase indices: the full sum minus the
    /// diagonal Σ_p I(p)·Tr U^{p₁+p₂}.
    pub fn sample_value_distinct(&self, phases: &[f64]) -> Result<f64, EngineError> {
        if self.n != 2 {
            return Err(EngineError::InvalidParameter("distinct-index sums are implemented for n = 2".into()));
        }
        let traces = power_traces(phases, 2 * self.max_power);
        let tr = |p: i64| if p >= 0 { traces[p as usize] } else { traces[(-p) as usize].conj() };
        let mut acc = 0.0;
        for term in &self.terms {
            let (a, b) = (term.p[0], term.p[1]);
            acc += term.weight * (tr(a) * tr(b) - tr(a + b)).re;
        }
        Ok(acc)
    }

    /// E[LHS] from the exact joint trace moments.
    pub fn expectation(&self) -> f64 {
        let plan = MomentPlan::new(self.n);
        self.terms
            .par_iter()
            .filter(|s| s.p.iter().sum::<i64>() == 0)
            .map(|s| s.weight * plan.moment(&s.p, self.matrix_size) as f64)
            .sum()
    }
}

/// (g₁ * ⋯ * g_n)(0) and ∫ u₁² Π g_j(u_j) δ(Σu) du on a fine grid.
fn bump_moments(bundle: &TestFunctionBundle) -> (f64, f64) {
    let bumps = &bundle.bumps;
    let step = bumps[0].half_width / 1000.0;
    let mut rest = GridFunction::sample(&bumps[1], step);
    for g in &bumps[2..] {
        rest = rest.convolve(&GridFunction::sample(g, step));
    }
    let first = GridFunction::sample(&bumps[0], step);
    let mut c0 = 0.0;
    let mut m2 = 0.0;
    for (i, v) in first.values.iter().enumerate() {
        let u = first.start + i as f64 * step;
        let w = v * rest.eval(-u) * step;
        c0 += w;
        m2 += u * u * w;
    }
    (c0, m2)
}

/// Every p ∈ ℤⁿ with Σp = 0 and |p_j| ≤ pmax.
pub fn zero_sum_tuples(n: usize, pmax: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return Vec::new();
    }
    tuples_with_sum(n, pmax, 0)
}

/// B_N = N^{−n} Σ_{Σp=0} Φ(p/N)·E[Π_j Tr U^{p_j}], the finite-N form of the bracket.
pub fn leading_bracket(phi: &PhiFunction, matrix_size: usize) -> f64 {
    let n = phi.dim;
    let nf = matrix_size as f64;
    let pmax = floor_strict(phi.rho * nf);
    let plan = MomentPlan::new(n);
    // Group by the first coordinate so the parallel work units stay coarse.
    let firsts: Vec<i64> = (-pmax..=pmax).collect();
    let total: f64 = firsts
        .par_iter()
        .map(|&p0| {
            let mut acc = 0.0;
            for rest in tuples_with_sum(n - 1, pmax, -p0) {
                let mut p = Vec::with_capacity(n);
                p.push(p0);
                p.extend_from_slice(&rest);
                let x: Vec<f64> = p.iter().map(|&v| v as f64 / nf).collect();
                let w = phi.eval(&x);
                if w != 0.0 {
                    acc += w * plan.moment(&p, matrix_size) as f64;
                }
            }
            acc
        })
        .sum();
    total / nf.powi(n as i32)
}

/// Every p ∈ ℤᵐ with Σp = `target` and |p_j| ≤ pmax.
fn tuples_with_sum(m: usize, pmax: i64, target: i64) -> Vec<Vec<i64>> {
    if m == 0 || pmax < 0 {
        return if target == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![-pmax; m - 1];
    loop {
        let last = target - cur.iter().sum::<i64>();
        if last.abs() <= pmax {
            let mut p = cur.clone();
            p.push(last);
            out.push(p);
        }
        let mut pos = 0;
        loop {
            if pos == m - 1 {
                return out;
            }
            cur[pos] += 1;
            if cur[pos] <= pmax {
                break;
            }
            cur[pos] = -pmax;
            pos += 1;
        }
    }
}

/// Richardson extrapolation of values at N and 2N whose error decays like N^{−order}.
pub fn richardson(coarse: f64, fine: f64, order: i32) -> f64 {
    let r = 2f64.powi(order);
    (r * fine - coarse) / (r - 1.0)
}

/// The normalization κ(h)·N𝒯/2π.
pub fn normalization(bundle: &TestFunctionBundle) -> f64 {
    bundle.kappa * bundle.matrix_size as f64 * bundle.slow_scale / (2.0 * PI)
}

/// E[LHS] for the bundle from exact trace moments, with the weight quadrature error as
/// the uncertainty.
pub fn exact_ncorr(bundle: &TestFunctionBundle) -> Result<StatisticResult, EngineError> {
    let weights = SpectralWeights::new(bundle)?;
    let value = weights.expectation();
    let mut notes = vec![format!("{} frequency terms, largest power {}", weights.terms.len(), weights.max_power)];
    if weights.n >= 3 {
        notes.push("weights use the second-order expansion in N/𝒯".into());
    }
    let metadata = ResultMetadata {
        n: weights.n,
        matrix_size: bundle.matrix_size,
        slow_scale: bundle.slow_scale,
        seed: None,
        config_hash: String::new(),
        normalization: normalization(bundle),
        conventions: Vec::new(),
        notes,
    };
    Ok(StatisticResult::new(value, weights.error, metadata))
}
