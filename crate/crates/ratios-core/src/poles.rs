//! Numerical residues of J* terms at coinciding shifts.
//!
//! The |S| = |T| = 1 layer contains z'/z(α_j − α_i) in the term with S = {α_i} and
//! z'/z(α_i − α_j) in the term with S = {α_j}. Each has a simple pole at α_j = α_i; the
//! residues are equal and opposite, so the layer is regular there.

use crate::jstar::{jstar_layer, jstar_term, ArgumentSets};
use crate::RatiosError;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Residue of `f` at `center` from the trapezoid rule on a circle of the given radius.
/// Converges geometrically when `f` has no other singularity inside a larger circle.
pub fn circle_residue<F>(f: F, center: Complex64, radius: f64, points: usize) -> Result<Complex64, RatiosError>
where
    F: Fn(Complex64) -> Result<Complex64, RatiosError>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..points {
        let w = Complex64::from_polar(radius, 2.0 * PI * (m as f64 + 0.5) / points as f64);
        acc += w * f(center + w)?;
    }
    Ok(acc / points as f64)
}

/// Residues, in the variable α_j at α_j = α_i, of the two layer-one terms with
/// S = {α_i} and S = {α_j}, both with T = {β_t}.
pub fn exchanged_residues(
    args: &ArgumentSets,
    i: usize,
    j: usize,
    t: usize,
    radius: f64,
    points: usize,
) -> Result<(Complex64, Complex64), RatiosError> {
    let center = args.a[i];
    let moved = |x: Complex64| {
        let mut a = args.clone();
        a.a[j] = x;
        a
    };
    let first = circle_residue(|x| jstar_term(&moved(x), &[i], &[t]), center, radius, points)?;
    let second = circle_residue(|x| jstar_term(&moved(x), &[j], &[t]), center, radius, points)?;
    Ok((first, second))
}

/// The layer |S| = |T| = 1 of J* with α_j placed at α_i + ε.
pub fn layer_one_near_coincidence(args: &ArgumentSets, i: usize, j: usize, eps: Complex64) -> Result<Complex64, RatiosError> {
    let mut a = args.clone();
    a.a[j] = args.a[i] + eps;
    jstar_layer(&a, 1)
}
