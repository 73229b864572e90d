//! Integrals along truncated vertical lines `δ − iH → δ + iH`.

use crate::gk::{adaptive_gk, GkOptions};
use num_complex::Complex64;

/// Result of a truncated vertical-line integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourEstimate {
    pub value: Complex64,
    /// Quadrature error estimate on the truncated segment.
    pub error: f64,
    /// Estimate of the discarded tails: `∫|f|` over `H < |Im z| < 2H`.
    pub tail_estimate: f64,
    /// Set when the tail estimate exceeds the requested tolerance.
    pub warning: Option<String>,
}

/// Computes `∫_{δ−iH}^{δ+iH} f(z) dz = i ∫_{−H}^{H} f(δ + iy) dy`.
///
/// The tail beyond `H` is not integrated. Its size is estimated from `|f|` on the
/// next stretch of the line, and a warning is attached when that exceeds `tol`.
pub fn contour_integral_truncated<F>(f: F, delta: f64, height: f64, tol: f64) -> ContourEstimate
where
    F: Fn(Complex64) -> Complex64,
{
    let opts = GkOptions { abs_tol: tol, rel_tol: 1e-12, max_intervals: 2000 };
    let on_line = |y: f64| f(Complex64::new(delta, y));
    let est = adaptive_gk(on_line, -height, height, &opts);
    let coarse = GkOptions { abs_tol: tol, rel_tol: 1e-3, max_intervals: 200 };
    let upper = adaptive_gk(|y: f64| f(Complex64::new(delta, y)).norm(), height, 2.0 * height, &coarse);
    let lower = adaptive_gk(|y: f64| f(Complex64::new(delta, y)).norm(), -2.0 * height, -height, &coarse);
    let tail_estimate = upper.value + lower.value;
    let warning = (tail_estimate > tol).then(|| {
        format!("tail estimate {tail_estimate:.3e} beyond height {height} exceeds tolerance {tol:.1e}")
    });
    ContourEstimate { value: Complex64::i() * est.value, error: est.error, tail_estimate, warning }
}
