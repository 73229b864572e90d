//! The function z(x) = 1/(1 − e^{−x}) and its logarithmic derivatives.
//!
//! z has simple poles at x ∈ 2πiℤ with residue 1. Evaluations are arranged so that
//! only exponentials of non-positive real part are formed, and `1 − e^{−x}` is computed
//! through a complex `expm1` to keep full precision near the poles.

use crate::RatiosError;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Arguments closer than this to a pole are rejected.
pub const POLE_GUARD: f64 = 1e-12;

/// Distance from `x` to the nearest point of 2πiℤ.
pub fn pole_distance(x: Complex64) -> f64 {
    let k = (x.im / (2.0 * PI)).round();
    Complex64::new(x.re, x.im - 2.0 * PI * k).norm()
}

fn guard(x: Complex64) -> Result<(), RatiosError> {
    if !(pole_distance(x) >= POLE_GUARD) {
        return Err(RatiosError::Pole(x));
    }
    Ok(())
}

/// e^x − 1 without cancellation for small |x|.
pub fn cexpm1(x: Complex64) -> Complex64 {
    let half_sin = (0.5 * x.im).sin();
    let re = x.re.exp_m1() * x.im.cos() - 2.0 * half_sin * half_sin;
    let im = x.re.exp() * x.im.sin();
    Complex64::new(re, im)
}

/// z(x) = 1/(1 − e^{−x}).
pub fn z_fn(x: Complex64) -> Result<Complex64, RatiosError> {
    guard(x)?;
    Ok(if x.re >= 0.0 {
        // 1 − e^{−x} = −expm1(−x)
        -1.0 / cexpm1(-x)
    } else {
        // e^x / (e^x − 1)
        x.exp() / cexpm1(x)
    })
}

/// (z'/z)(x) = 1 − z(x).
pub fn zlog_deriv(x: Complex64) -> Result<Complex64, RatiosError> {
    guard(x)?;
    Ok(if x.re >= 0.0 {
        // 1 − z = e^{−x}/expm1(−x)
        (-x).exp() / cexpm1(-x)
    } else {
        // 1 − z = −1/expm1(x)
        -1.0 / cexpm1(x)
    })
}

/// (z'/z)'(x) = −z'(x) = z(x)² − z(x) = 1/(4 sinh²(x/2)).
///
/// Evaluated as w/(1 − w)² with w = e^{−|x|} (sign taken on the real part), which is
/// even in x and never overflows.
pub fn zlog_deriv_prime(x: Complex64) -> Result<Complex64, RatiosError> {
    guard(x)?;
    let y = if x.re >= 0.0 { x } else { -x };
    let denom = cexpm1(-y);
    Ok((-y).exp() / (denom * denom))
}

/// z'(x) = z(x)(1 − z(x)).
pub fn z_prime(x: Complex64) -> Result<Complex64, RatiosError> {
    Ok(-zlog_deriv_prime(x)?)
}

/// Z(A, B) = Π_{α∈A, β∈B} z(α + β).
pub fn z_product(a: &[Complex64], b: &[Complex64]) -> Result<Complex64, RatiosError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &x in a {
        for &y in b {
            acc *= z_fn(x + y)?;
        }
    }
    Ok(acc)
}

/// Z†(A, B): as [`z_product`] but factors whose argument is exactly zero are omitted.
pub fn z_dagger(a: &[Complex64], b: &[Complex64]) -> Result<Complex64, RatiosError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &x in a {
        for &y in b {
            let s = x + y;
            if s == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc *= z_fn(s)?;
        }
    }
    Ok(acc)
}

/// The two-term closed form for the U(N) average of
/// Λ_X(e^{−α})Λ_{X*}(e^{−β}) / (Λ_X(e^{−γ})Λ_{X*}(e^{−δ})), valid for Re γ, Re δ > 0.
pub fn ratios_closed_form(
    n: usize,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    delta: Complex64,
) -> Result<Complex64, RatiosError> {
    let first = z_fn(alpha + beta)? * z_fn(gamma + delta)? / (z_fn(alpha + delta)? * z_fn(beta + gamma)?);
    let second = (-(n as f64) * (alpha + beta)).exp() * z_fn(-beta - alpha)? * z_fn(gamma + delta)?
        / (z_fn(-beta + delta)? * z_fn(-alpha + gamma)?);
    Ok(first + second)
}
