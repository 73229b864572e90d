//! The average of Λ_X(e^{−α})Λ_{X*}(e^{−β}) / (Λ_X(e^{−γ})Λ_{X*}(e^{−δ})) over U(N).
//!
//! Λ_X(s) = det(I − sX*) = Π_j (1 − s·e^{−iθ_j}), so Λ_{X*}(s) = Π_j (1 − s·e^{iθ_j}).

use crate::result::mean_and_se;
use crate::EngineError;
use haar_core::sample_haar_eigenphases;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples whose denominator has a factor smaller than this in modulus are rejected.
pub const DENOMINATOR_GUARD: f64 = 1e-8;

/// Monte Carlo estimate of a complex average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatiosEstimate {
    pub value: Complex64,
    /// Standard errors of the real and imaginary parts.
    pub standard_error: Complex64,
    pub accepted: usize,
    pub rejected: usize,
    pub seed: u64,
}

/// The four shifts of the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioShifts {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl RatioShifts {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64) -> Self {
        RatioShifts { alpha, beta, gamma, delta }
    }

    /// All four shifts real.
    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        RatioShifts::new(c(alpha), c(beta), c(gamma), c(delta))
    }
}

/// The ratio for one set of eigenphases, or `None` when a denominator factor is below the guard.
pub fn ratio_sample(phases: &[f64], s: &RatioShifts) -> Option<Complex64> {
    let (ea, eb, eg, ed) = ((-s.alpha).exp(), (-s.beta).exp(), (-s.gamma).exp(), (-s.delta).exp());
    let mut num = Complex64::new(1.0, 0.0);
    let mut den = Complex64::new(1.0, 0.0);
    for &theta in phases {
        let u = Complex64::from_polar(1.0, theta);
        let uc = u.conj();
        let dg = Complex64::new(1.0, 0.0) - eg * uc;
        let dd = Complex64::new(1.0, 0.0) - ed * u;
        if dg.norm() < DENOMINATOR_GUARD || dd.norm() < DENOMINATOR_GUARD {
            return None;
        }
        num *= (Complex64::new(1.0, 0.0) - ea * uc) * (Complex64::new(1.0, 0.0) - eb * u);
        den *= dg * dd;
    }
    Some(num / den)
}

/// Monte Carlo average over `samples` Haar draws.
pub fn ratios_mc(matrix_size: usize, shifts: &RatioShifts, samples: usize, seed: u64) -> Result<RatiosEstimate, EngineError> {
    if shifts.gamma.re <= 0.0 || shifts.delta.re <= 0.0 {
        return Err(EngineError::Precondition("Re γ and Re δ must be positive".into()));
    }
    if samples == 0 {
        return Err(EngineError::InvalidParameter("at least one sample is required".into()));
    }
    let values: Vec<Option<Complex64>> = (0..samples as u64)
        .into_par_iter()
        .map(|d| Ok(ratio_sample(&sample_haar_eigenphases(matrix_size, seed, d)?.phases, shifts)))
        .collect::<Result<_, EngineError>>()?;
    let kept: Vec<Complex64> = values.iter().flatten().copied().collect();
    let rejected = samples - kept.len();
    if rejected > 0 {
        log::warn!("{rejected} of {samples} samples rejected near a denominator zero");
    }
    if kept.is_empty() {
        return Err(EngineError::Precondition("every sample was rejected near a denominator zero".into()));
    }
    let re: Vec<f64> = kept.iter().map(|v| v.re).collect();
    let im: Vec<f64> = kept.iter().map(|v| v.im).collect();
    let (mr, sr) = mean_and_se(&re);
    let (mi, si) = mean_and_se(&im);
    Ok(RatiosEstimate {
        value: Complex64::new(mr, mi),
        standard_error: Complex64::new(sr, si),
        accepted: kept.len(),
        rejected,
        seed,
    })
}

/// The two-term closed form of the average.
pub fn ratios_closed(matrix_size: usize, shifts: &RatioShifts) -> Result<Complex64, EngineError> {
    Ok(ratios_core::ratios_closed_form(matrix_size, shifts.alpha, shifts.beta, shifts.gamma, shifts.delta)?)
}
