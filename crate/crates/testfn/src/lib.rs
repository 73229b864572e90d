//! Admissible test functions for the n-level correlation statistics.
//!
//! The smooth weight is built from compactly supported bumps g_j with transforms
//! h_j(x) = ∫ g_j(t) e^{ixt} dt. The local statistic f is the transform of a product bump Φ
//! restricted to the hyperplane Σξ = 0:
//! f(x) = ∫ Φ(ξ) δ(Σξ) e^{−2πi x·ξ} dξ.

use num_complex::Complex64;
use quadrature::{adaptive_gk, integrate_with, ConstrainedDomain, GkOptions, QuadError, QuadratureOptions, VarRange};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default ratio 𝒯/N.
pub const DEFAULT_SCALE_RATIO: f64 = 10.0;
/// Ratios 𝒯/N below this trigger a warning.
pub const WARN_SCALE_RATIO: f64 = 5.0;
/// Default slack ε in the support budget c = 2q − ε.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestFnError {
    #[error("invalid test-function parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// The one-dimensional bump b(t) = exp(−1/(1 − t²)) on (−1, 1), zero elsewhere.
pub fn unit_bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// g(t) = amplitude · b(t/Δ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub half_width: f64,
    pub amplitude: f64,
}

impl BumpFunction {
    pub fn new(half_width: f64) -> Self {
        BumpFunction { half_width, amplitude: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * unit_bump(t / self.half_width)
    }

    /// h(x) = ∫ g(t) e^{ixt} dt for complex x. Reports the achieved error estimate.
    pub fn h_with_error(&self, x: Complex64) -> (Complex64, f64) {
        let d = self.half_width;
        // Oscillatory and growing integrands need more panels than the default.
        let opts = GkOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 2000 };
        let est = adaptive_gk(|t: f64| (Complex64::i() * x * t).exp() * self.eval(t), -d, d, &opts);
        (est.value, est.error)
    }

    pub fn h(&self, x: Complex64) -> Complex64 {
        self.h_with_error(x).0
    }

    /// ∫ g.
    pub fn integral(&self) -> f64 {
        self.h(Complex64::new(0.0, 0.0)).re
    }
}

/// bump_eval.
pub fn bump_eval(g: &BumpFunction, t: f64) -> f64 {
    g.eval(t)
}

/// h_from_g.
pub fn h_from_g(g: &BumpFunction, x: Complex64) -> Complex64 {
    g.h(x)
}

/// Φ(ξ) = Π_j b(ξ_j/ρ): even in every coordinate and zero once any |ξ_j| ≥ ρ, so zero
/// whenever Σ|ξ_j| ≥ nρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiFunction {
    pub dim: usize,
    pub rho: f64,
}

impl PhiFunction {
    /// The product bump whose support budget Σ|ξ_j| < c is split evenly: ρ = c/n.
    pub fn with_budget(dim: usize, budget: f64) -> Self {
        PhiFunction { dim, rho: budget / dim as f64 }
    }

    pub fn budget(&self) -> f64 {
        self.rho * self.dim as f64
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        debug_assert_eq!(xi.len(), self.dim);
        let mut acc = 1.0;
        for &x in xi {
            let s = x / self.rho;
            if s.abs() >= 1.0 {
                return 0.0;
            }
            acc *= unit_bump(s);
        }
        acc
    }

    /// Φ(0) = b(0)ⁿ.
    pub fn at_origin(&self) -> f64 {
        (-1.0f64).exp().powi(self.dim as i32)
    }
}

/// phi_eval.
pub fn phi_eval(phi: &PhiFunction, xi: &[f64]) -> f64 {
    phi.eval(xi)
}

/// ∫ Φ(ξ) δ(Σξ) e^{Σ_j w_j ξ_j} dξ for complex w, after eliminating ξ_n = −Σ_{j<n} ξ_j.
pub fn phi_exponential_transform(phi: &PhiFunction, w: &[Complex64], tol: f64) -> Result<(Complex64, f64), TestFnError> {
    let n = phi.dim;
    if w.len() != n || n == 0 {
        return Err(TestFnError::InvalidParameter(format!("expected {n} arguments, got {}", w.len())));
    }
    if n == 1 {
        return Ok((Complex64::new(phi.at_origin(), 0.0), 0.0));
    }
    let rho = phi.rho;
    let mut domain = ConstrainedDomain::new(vec![VarRange::Full; n - 1], rho);
    domain.add_abs_bound(&vec![1.0; n - 1], rho);
    let shifted: Vec<Complex64> = w[..n - 1].iter().map(|&wj| wj - w[n - 1]).collect();
    let integrand = |x: &[f64]| {
        let mut xi = x.to_vec();
        xi.push(-x.iter().sum::<f64>());
        let p = phi.eval(&xi);
        if p == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let e: Complex64 = shifted.iter().zip(x).map(|(s, &v)| s * v).sum();
        e.exp() * p
    };
    let opts = QuadratureOptions { abs_tol: tol, max_intervals: 5000, ..QuadratureOptions::default() };
    let est = integrate_with(integrand, &domain, &opts)?;
    Ok((est.value, est.error))
}

/// f(x) = ∫ Φ(ξ) δ(Σξ) e^{−2πi x·ξ} dξ for complex x.
pub fn f_from_phi(phi: &PhiFunction, x: &[Complex64]) -> Result<Complex64, TestFnError> {
    let w: Vec<Complex64> = x.iter().map(|&xj| Complex64::new(0.0, -2.0 * PI) * xj).collect();
    Ok(phi_exponential_transform(phi, &w, 1e-10)?.0)
}

/// Samples of the convolution g₁ * ⋯ * g_m on the grid t = start + i·step.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn sample(g: &BumpFunction, step: f64) -> Self {
        let m = (g.half_width / step).ceil() as i64;
        let values = (-m..=m).map(|i| g.eval(i as f64 * step)).collect();
        GridFunction { start: -(m as f64) * step, step, values }
    }

    /// Trapezoid convolution. Both factors vanish with all derivatives at the ends of
    /// their support, so the rule converges faster than any power of the step.
    pub fn convolve(&self, other: &GridFunction) -> GridFunction {
        assert!((self.step - other.step).abs() < 1e-15 * self.step.max(1.0));
        let mut values = vec![0.0; self.values.len() + other.values.len() - 1];
        for (i, a) in self.values.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.values.iter().enumerate() {
                values[i + j] += a * b;
            }
        }
        for v in &mut values {
            *v *= self.step;
        }
        GridFunction { start: self.start + other.start, step: self.step, values }
    }

    /// Linear interpolation, zero outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let pos = (t - self.start) / self.step;
        if pos < 0.0 || pos > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// κ(h) = ∫ h₁(u)⋯h_n(u) du = 2π·(g₁ * ⋯ * g_n)(0).
pub fn kappa_of(bumps: &[BumpFunction]) -> f64 {
    match bumps {
        [] => 0.0,
        [g] => 2.0 * PI * g.eval(0.0),
        _ => {
            let step = bumps.iter().map(|g| g.half_width).fold(f64::INFINITY, f64::min) / 2000.0;
            let mut acc = GridFunction::sample(&bumps[0], step);
            for g in &bumps[1..bumps.len() - 1] {
                acc = acc.convolve(&GridFunction::sample(g, step));
            }
            // (acc * g_n)(0) = Σ acc(t)·g_n(−t)·step.
            let last = bumps[bumps.len() - 1];
            let sum: f64 = acc
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v * last.eval(-(acc.start + i as f64 * acc.step)))
                .sum();
            2.0 * PI * sum * step
        }
    }
}

/// Serializable description of a test-function bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleConfig {
    pub family: String,
    pub n: usize,
    pub budget: f64,
    pub bump_half_width: f64,
    pub matrix_size: usize,
    pub slow_scale: f64,
    pub epsilon: f64,
}

/// Φ, the bumps g_j, and the two scales N and 𝒯.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionBundle {
    pub phi: PhiFunction,
    pub bumps: Vec<BumpFunction>,
    pub matrix_size: usize,
    pub slow_scale: f64,
    pub kappa: f64,
    pub warnings: Vec<String>,
}

impl TestFunctionBundle {
    /// Product bump Φ with Σ|ξ| budget `budget`, unit bumps g_j, and 𝒯 = 10N.
    pub fn canonical(n: usize, matrix_size: usize, budget: f64) -> Result<Self, TestFnError> {
        Self::new(n, matrix_size, budget, 1.0, DEFAULT_SCALE_RATIO * matrix_size as f64)
    }

    pub fn new(n: usize, matrix_size: usize, budget: f64, half_width: f64, slow_scale: f64) -> Result<Self, TestFnError> {
        if n == 0 || matrix_size == 0 {
            return Err(TestFnError::InvalidParameter("n and N must be positive".into()));
        }
        if !(budget > 0.0 && half_width > 0.0 && slow_scale > 0.0) {
            return Err(TestFnError::InvalidParameter("budget, half-width and 𝒯 must be positive".into()));
        }
        let bumps = vec![BumpFunction::new(half_width); n];
        let mut warnings = Vec::new();
        let ratio = slow_scale / matrix_size as f64;
        if ratio < WARN_SCALE_RATIO {
            let msg = format!("𝒯/N = {ratio:.3} is below {WARN_SCALE_RATIO}; the slow scale may not dominate N");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(TestFunctionBundle {
            phi: PhiFunction::with_budget(n, budget),
            kappa: kappa_of(&bumps),
            bumps,
            matrix_size,
            slow_scale,
            warnings,
        })
    }

    pub fn from_config(cfg: &BundleConfig) -> Result<Self, TestFnError> {
        if cfg.family != "product-bump" {
            return Err(TestFnError::InvalidParameter(format!("unknown family {}", cfg.family)));
        }
        Self::new(cfg.n, cfg.matrix_size, cfg.budget, cfg.bump_half_width, cfg.slow_scale)
    }

    pub fn config(&self) -> BundleConfig {
        BundleConfig {
            family: "product-bump".into(),
            n: self.phi.dim,
            budget: self.phi.budget(),
            bump_half_width: self.bumps[0].half_width,
            matrix_size: self.matrix_size,
            slow_scale: self.slow_scale,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn n(&self) -> usize {
        self.phi.dim
    }

    /// F(iz₁, …, iz_n) = f(iNz/2π)·Π_j h_j(iz_j/𝒯).
    pub fn assemble_f(&self, z: &[Complex64]) -> Result<Complex64, TestFnError> {
        let n_mat = self.matrix_size as f64;
        let w: Vec<Complex64> = z.iter().map(|&zj| zj * n_mat).collect();
        let (f, _) = phi_exponential_transform(&self.phi, &w, 1e-10)?;
        let mut acc = f;
        for (g, &zj) in self.bumps.iter().zip(z) {
            acc *= g.h(Complex64::i() * zj / self.slow_scale);
        }
        Ok(acc)
    }
}

/// kappa.
pub fn kappa(bundle: &TestFunctionBundle) -> f64 {
    bundle.kappa
}

/// assemble_F.
pub fn assemble_f(bundle: &TestFunctionBundle, z: &[Complex64]) -> Result<Complex64, TestFnError> {
    bundle.assemble_f(z)
}
