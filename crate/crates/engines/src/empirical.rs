//! Monte Carlo estimate of E[Σ_{j₁,…,j_n} F(θ_{j₁}, …, θ_{j_n})] over Haar unitaries.
//!
//! F(θ) = f(Nθ/2π)·Π_j h_j(θ_j/𝒯) and the eigenphases are extended periodically, so every
//! index also runs over the shifts θ_j + 2πm. Two evaluation routes are available:
//!
//! * [`EmpiricalMethod::Spectral`] sums the frequency-space form Σ_p I(p)·Π Tr U^{p_j},
//!   which covers every shift at once.
//! * [`EmpiricalMethod::Direct`] sums F over index tuples and shifts |m_j| ≤ window, for
//!   n ≤ 2, from tabulated f and h.

use crate::result::{mean_and_se, ResultMetadata, StatisticResult};
use crate::spectral::{normalization, SpectralWeights};
use crate::EngineError;
use haar_core::sample_haar_eigenphases;
use num_complex::Complex64;
use quadrature::{adaptive_gk, GkOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use testfn::TestFunctionBundle;

/// Default number of periodic shifts on each side for the direct route.
pub const DEFAULT_WINDOW: usize = 3;
/// Relative size of h at the window edge above which a tail warning is issued.
pub const TAIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum EmpiricalMethod {
    #[default]
    Spectral,
    Direct { window: usize },
}

/// Which index tuples enter the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum IndexSum {
    /// All tuples, repeated indices included.
    #[default]
    Unrestricted,
    /// Pairwise distinct indices only (n = 2).
    Distinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalOptions {
    pub samples: usize,
    pub seed: u64,
    /// Index of the first draw; draws first, first + 1, … are used.
    pub first_draw: u64,
    pub method: EmpiricalMethod,
    pub indices: IndexSum,
}

impl Default for EmpiricalOptions {
    fn default() -> Self {
        EmpiricalOptions {
            samples: 10_000,
            seed: 0,
            first_draw: 0,
            method: EmpiricalMethod::Spectral,
            indices: IndexSum::Unrestricted,
        }
    }
}

/// Samples of a smooth real function on a uniform grid, read back by cubic interpolation.
#[derive(Debug, Clone)]
struct Table {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl Table {
    fn build(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64 + Sync) -> Table {
        let count = ((hi - lo) / step).ceil() as usize + 4;
        let start = lo - step;
        let values = (0..count).into_par_iter().map(|i| f(start + i as f64 * step)).collect();
        Table { start, step, values }
    }

    fn eval(&self, x: f64) -> f64 {
        let s = (x - self.start) / self.step;
        let i = s.floor() as isize;
        if i < 1 || i as usize + 2 >= self.values.len() {
            return 0.0;
        }
        let i = i as usize;
        let t = s - i as f64;
        let (p0, p1, p2, p3) = (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        // Catmull-Rom cubic through the four neighbouring samples.
        p1 + 0.5
            * t
            * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)))
    }
}

/// F on periodically extended eigenphases for n ≤ 2, from tables of h and of f along the
/// difference direction.
struct DirectSum {
    n: usize,
    window: i64,
    matrix_size: usize,
    slow_scale: f64,
    phi0: f64,
    h: Vec<Table>,
    f2: Option<Table>,
}

impl DirectSum {
    fn new(bundle: &TestFunctionBundle, window: usize) -> DirectSum {
        let t = bundle.slow_scale;
        let reach = 2.0 * PI * (window as f64 + 1.0) / t;
        let step = (reach / 20_000.0).min(0.01);
        let h = bundle
            .bumps
            .iter()
            .map(|g| Table::build(-reach, reach, step, |x| g.h(Complex64::new(x, 0.0)).re))
            .collect();
        let f2 = (bundle.n() == 2).then(|| {
            // f(x, −x + d) depends on the difference only: ∫ Φ(ξ, −ξ) cos(2π d ξ) dξ.
            let rho = bundle.phi.rho;
            let phi = bundle.phi;
            let reach = bundle.matrix_size as f64 * (2.0 * window as f64 + 1.0);
            let opts = GkOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 2000 };
            Table::build(-reach, reach, 0.002, |d| {
                adaptive_gk(|xi: f64| phi.eval(&[xi, -xi]) * (2.0 * PI * d * xi).cos(), -rho, rho, &opts).value
            })
        });
        DirectSum {
            n: bundle.n(),
            window: window as i64,
            matrix_size: bundle.matrix_size,
            slow_scale: bundle.slow_scale,
            phi0: bundle.phi.at_origin(),
            h,
            f2,
        }
    }

    fn shifted(&self, phases: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(phases.len() * (2 * self.window as usize + 1));
        for m in -self.window..=self.window {
            out.extend(phases.iter().map(|&p| p + 2.0 * PI * m as f64));
        }
        out
    }

    fn sample_value(&self, phases: &[f64], indices: IndexSum) -> f64 {
        let ext = self.shifted(phases);
        let t = self.slow_scale;
        if self.n == 1 {
            return self.phi0 * ext.iter().map(|&x| self.h[0].eval(x / t)).sum::<f64>();
        }
        let f2 = self.f2.as_ref().expect("n = 2 table");
        let scale = self.matrix_size as f64 / (2.0 * PI);
        let count = phases.len();
        let h1: Vec<f64> = ext.iter().map(|&x| self.h[0].eval(x / t)).collect();
        let h2: Vec<f64> = ext.iter().map(|&x| self.h[1].eval(x / t)).collect();
        let mut acc = 0.0;
        for (a, &xa) in ext.iter().enumerate() {
            if h1[a] == 0.0 {
                continue;
            }
            for (b, &xb) in ext.iter().enumerate() {
                if indices == IndexSum::Distinct && a % count == b % count {
                    continue;
                }
                acc += h1[a] * h2[b] * f2.eval(scale * (xa - xb));
            }
        }
        acc
    }
}

/// Monte Carlo estimate of the correlation sum with its standard error.
pub fn empirical_ncorr(bundle: &TestFunctionBundle, opts: &EmpiricalOptions) -> Result<StatisticResult, EngineError> {
    if opts.samples == 0 {
        return Err(EngineError::InvalidParameter("at least one sample is required".into()));
    }
    let n = bundle.n();
    if opts.indices == IndexSum::Distinct && n != 2 {
        return Err(EngineError::InvalidParameter("distinct-index sums are implemented for n = 2".into()));
    }
    let matrix_size = bundle.matrix_size;
    let mut notes = bundle.warnings.clone();
    let draws: Vec<u64> = (opts.first_draw..opts.first_draw + opts.samples as u64).collect();
    let values: Vec<f64> = match opts.method {
        EmpiricalMethod::Spectral => {
            let weights = SpectralWeights::new(bundle)?;
            notes.push(format!("frequency-space sum over {} terms, every periodic shift included", weights.terms.len()));
            draws
                .par_iter()
                .map(|&d| {
                    let s = sample_haar_eigenphases(matrix_size, opts.seed, d)?;
                    match opts.indices {
                        IndexSum::Unrestricted => Ok(weights.sample_value(&s.phases)),
                        IndexSum::Distinct => weights.sample_value_distinct(&s.phases),
                    }
                })
                .collect::<Result<_, EngineError>>()?
        }
        EmpiricalMethod::Direct { window } => {
            if window == 0 {
                return Err(EngineError::InvalidParameter("the shift window must be at least 1".into()));
            }
            if n > 2 {
                return Err(EngineError::InvalidParameter("the direct sum is implemented for n ≤ 2".into()));
            }
            let tail = tail_ratio(bundle, window);
            if tail > TAIL_TOLERANCE {
                let msg = format!("window {window}: h at the window edge is {tail:.2e} of h(0); the truncated tail may matter");
                log::warn!("{msg}");
                notes.push(msg);
            }
            let direct = DirectSum::new(bundle, window);
            notes.push(format!("direct sum over shifts |m| ≤ {window}"));
            draws
                .par_iter()
                .map(|&d| {
                    let s = sample_haar_eigenphases(matrix_size, opts.seed, d)?;
                    Ok(direct.sample_value(&s.phases, opts.indices))
                })
                .collect::<Result<_, EngineError>>()?
        }
    };
    let (mean, se) = mean_and_se(&values);
    let metadata = ResultMetadata {
        n,
        matrix_size,
        slow_scale: bundle.slow_scale,
        seed: Some(opts.seed),
        config_hash: String::new(),
        normalization: normalization(bundle),
        conventions: vec![format!("indices={:?}", opts.indices), format!("method={:?}", opts.method)],
        notes,
    };
    Ok(StatisticResult::new(mean, se, metadata))
}

/// max_j |h_j(2π·window/𝒯)| / |h_j(0)|.
pub fn tail_ratio(bundle: &TestFunctionBundle, window: usize) -> f64 {
    let x = 2.0 * PI * window as f64 / bundle.slow_scale;
    bundle
        .bumps
        .iter()
        .map(|g| {
            let h0 = g.h(Complex64::new(0.0, 0.0)).norm();
            if h0 == 0.0 {
                0.0
            } else {
                g.h(Complex64::new(x, 0.0)).norm() / h0
            }
        })
        .fold(0.0, f64::max)
}
