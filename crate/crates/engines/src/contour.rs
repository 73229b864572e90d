//! The contour-integral representation of the correlation sum, for n ≤ 2.
//!
//! The sum is (1/2πi)ⁿ Σ_{K+L+M} s·N^{|M|} ∫ J*(z_K; −z_L) F(iz₁, …, iz_n) dz, where z_k runs
//! over Re z = δ, z_l over Re z = −δ and z_m over Re z = 0, and s is the partition sign
//! selected by [`ContourSign`].
//!
//! At n = 2 the nonvanishing terms depend on z₁ and z₂ only through w = z_a − z_b and the
//! product of the h factors. Integrating out the second variable gives
//!
//! ∫_{(c)} F(iz₁, iz₂) dz_b = 2πi𝒯 · φ̂(N(z₁ − z₂)) · G_{ab}(w),
//!
//! with φ̂(a) = ∫ Φ(ξ, −ξ) e^{aξ} dξ and G_{ab}(w) = ∫ g_a(t) g_b(−t) e^{−wt/𝒯} dt, which leaves
//! one vertical line integral per partition.

use crate::conventions::{ContourSign, Conventions};
use crate::result::{ResultMetadata, StatisticResult};
use crate::spectral::normalization;
use crate::EngineError;
use combinatorics::{enum_klm, PartitionKLM};
use num_complex::Complex64;
use quadrature::{adaptive_gk, contour_integral_truncated, ContourEstimate, GkOptions};
use ratios_core::{jstar_full, ArgumentSets};
use rayon::prelude::*;
use std::cell::RefCell;
use std::f64::consts::PI;
use testfn::TestFunctionBundle;

/// Relative accuracy requested from every line integral, measured against κN𝒯/2π.
const RELATIVE_TOL: f64 = 1e-9;

/// Holds the first error raised inside an integrand that must return a plain number.
struct ErrorSlot(RefCell<Option<EngineError>>);

impl ErrorSlot {
    fn new() -> Self {
        ErrorSlot(RefCell::new(None))
    }

    fn take<T>(&self, r: Result<T, impl Into<EngineError>>, fallback: T) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e.into());
                fallback
            }
        }
    }

    fn into_result(self) -> Result<(), EngineError> {
        self.0.into_inner().map_or(Ok(()), Err)
    }
}

/// One evaluated partition term.
struct PartitionTerm {
    label: String,
    value: f64,
    error: f64,
    tail: f64,
    note: Option<String>,
}

fn label(p: &PartitionKLM) -> String {
    format!("K={:?} L={:?} M={:?}", p.k, p.l, p.m)
}

fn partition_sign(p: &PartitionKLM, conv: &Conventions) -> f64 {
    match conv.contour_sign {
        ContourSign::Unsigned => 1.0,
        ContourSign::AsPrinted => {
            if (p.l.len() + p.m.len()) % 2 == 1 {
                -1.0
            } else {
                1.0
            }
        }
    }
}

fn real_line(p: &PartitionKLM, slot: usize, delta: f64) -> f64 {
    if p.k.contains(&slot) {
        delta
    } else if p.l.contains(&slot) {
        -delta
    } else {
        0.0
    }
}

/// J*(z_K; −z_L) for the given z, indexed by slot − 1.
fn jstar_at(p: &PartitionKLM, z: &[Complex64], matrix_size: usize) -> Result<Complex64, EngineError> {
    let a = p.k.iter().map(|&k| z[k - 1]).collect();
    let b = p.l.iter().map(|&l| -z[l - 1]).collect();
    Ok(jstar_full(&ArgumentSets::new(a, b, matrix_size))?)
}

fn finish(label: String, scale: Complex64, est: ContourEstimate) -> PartitionTerm {
    let value = scale * est.value;
    if value.im.abs() > 1e-8 * value.norm().max(1e-300) && value.im.abs() > est.error * scale.norm() {
        log::debug!("{label}: imaginary part {:.3e} discarded", value.im);
    }
    PartitionTerm {
        value: value.re,
        error: est.error * scale.norm(),
        tail: est.tail_estimate * scale.norm(),
        note: est.warning.map(|w| format!("{label}: {w}")),
        label,
    }
}

fn term_n1(bundle: &TestFunctionBundle, p: &PartitionKLM, delta: f64, height: f64, tol: f64) -> Result<PartitionTerm, EngineError> {
    let n_mat = bundle.matrix_size;
    let c = real_line(p, 1, delta);
    let m_power = (n_mat as f64).powi(p.m.len() as i32);
    let slot = ErrorSlot::new();
    let zero = Complex64::new(0.0, 0.0);
    let integrand = |z: Complex64| {
        let j = slot.take(jstar_at(p, &[z], n_mat), zero);
        if j == zero {
            return zero;
        }
        j * slot.take(bundle.assemble_f(&[z]), zero)
    };
    let scale = Complex64::new(m_power, 0.0) / Complex64::new(0.0, 2.0 * PI);
    let est = contour_integral_truncated(integrand, c, height, tol / scale.norm());
    slot.into_result()?;
    Ok(finish(label(p), scale, est))
}

/// φ̂(a) = ∫ Φ(ξ, −ξ) e^{aξ} dξ.
fn phi_hat(bundle: &TestFunctionBundle, a: Complex64) -> Complex64 {
    let rho = bundle.phi.rho;
    let opts = GkOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 500 };
    adaptive_gk(|x: f64| (a * x).exp() * bundle.phi.eval(&[x, -x]), -rho, rho, &opts).value
}

/// G_{ab}(w) = ∫ g_a(t) g_b(−t) e^{−wt/𝒯} dt.
fn bump_overlap(bundle: &TestFunctionBundle, a: usize, b: usize, w: Complex64) -> Complex64 {
    let (ga, gb) = (&bundle.bumps[a], &bundle.bumps[b]);
    let reach = ga.half_width.min(gb.half_width);
    let t_scale = bundle.slow_scale;
    let opts = GkOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 500 };
    adaptive_gk(|t: f64| (-w * t / t_scale).exp() * (ga.eval(t) * gb.eval(-t)), -reach, reach, &opts).value
}

fn term_n2(
    bundle: &TestFunctionBundle,
    p: &PartitionKLM,
    delta: f64,
    height: f64,
    tol: f64,
) -> Result<PartitionTerm, EngineError> {
    let n_mat = bundle.matrix_size;
    let name = label(p);
    let zero = Complex64::new(0.0, 0.0);
    // Probe J* on the contours; partitions with J* ≡ 0 contribute nothing.
    let probes = [0.3, -1.7, 4.1];
    let mut vanishes = true;
    for &y in &probes {
        let z: Vec<Complex64> = (1..=2).map(|s| Complex64::new(real_line(p, s, delta), y * s as f64)).collect();
        if jstar_at(p, &z, n_mat)? != zero {
            vanishes = false;
        }
    }
    if vanishes {
        return Ok(PartitionTerm { label: name, value: 0.0, error: 0.0, tail: 0.0, note: None });
    }
    // Order the two variables so that w = z_a − z_b has Re w ≥ 0.
    let (a, b) = if p.m.len() == 2 || p.k.first() == Some(&1) { (1, 2) } else { (2, 1) };
    if !(p.m.len() == 2 || (p.k.len() == 1 && p.l.len() == 1)) {
        return Err(EngineError::Precondition(format!("{name}: J* does not reduce to one difference variable")));
    }
    let c = real_line(p, a, delta) - real_line(p, b, delta);
    let m_power = (n_mat as f64).powi(p.m.len() as i32);
    let n_f = n_mat as f64;
    let slot = ErrorSlot::new();
    let integrand = |w: Complex64| {
        let j = if p.m.len() == 2 {
            Complex64::new(1.0, 0.0)
        } else {
            // J* depends on z_a − z_b only, so split w evenly between the two shifts.
            slot.take(jstar_full(&ArgumentSets::new(vec![w / 2.0], vec![w / 2.0], n_mat)), zero)
        };
        if j == zero {
            return zero;
        }
        let diff = if a == 1 { w } else { -w };
        j * phi_hat(bundle, n_f * diff) * bump_overlap(bundle, a - 1, b - 1, w)
    };
    // (1/2πi)² · 2πi𝒯 · N^{|M|}.
    let scale = Complex64::new(m_power * bundle.slow_scale, 0.0) / Complex64::new(0.0, 2.0 * PI);
    let est = contour_integral_truncated(integrand, c, height, tol / scale.norm());
    slot.into_result()?;
    Ok(finish(name, scale, est))
}

/// Evaluates the contour representation on lines truncated at |Im z| ≤ `height`.
///
/// The uncertainty is the sum of the quadrature error estimates and the tail estimates.
/// Each term of the breakdown is one partition K + L + M, signs included.
pub fn theorem4_rhs_validation(
    bundle: &TestFunctionBundle,
    delta: f64,
    height: f64,
    conv: &Conventions,
) -> Result<StatisticResult, EngineError> {
    let n = bundle.n();
    if !(1..=2).contains(&n) {
        return Err(EngineError::InvalidParameter(format!("the contour representation is implemented for n ≤ 2, got n = {n}")));
    }
    if !(delta > 0.0) || !(height > 0.0) {
        return Err(EngineError::InvalidParameter("δ and H must be positive".into()));
    }
    let norm = normalization(bundle);
    let tol = RELATIVE_TOL * norm.abs().max(1e-300);
    let partitions: Vec<PartitionKLM> = enum_klm(n).collect();
    let terms: Vec<(f64, PartitionTerm)> = partitions
        .par_iter()
        .map(|p| {
            let term = if n == 1 { term_n1(bundle, p, delta, height, tol) } else { term_n2(bundle, p, delta, height, tol) }?;
            Ok((partition_sign(p, conv), term))
        })
        .collect::<Result<_, EngineError>>()?;
    let mut notes = bundle.warnings.clone();
    let mut breakdown = Vec::with_capacity(terms.len());
    let (mut value, mut error, mut tail) = (0.0, 0.0, 0.0);
    for (sign, t) in terms {
        value += sign * t.value;
        error += t.error;
        tail += t.tail;
        if let Some(msg) = t.note {
            log::warn!("{msg}");
            notes.push(msg);
        }
        breakdown.push((t.label, sign * t.value));
    }
    notes.push(format!("lines truncated at |Im z| ≤ {height}; quadrature error {error:.3e}, tail estimate {tail:.3e}"));
    let metadata = ResultMetadata {
        n,
        matrix_size: bundle.matrix_size,
        slow_scale: bundle.slow_scale,
        seed: None,
        config_hash: String::new(),
        normalization: norm,
        conventions: conv.describe(),
        notes,
    };
    let mut result = StatisticResult::new(value, error + tail, metadata);
    result.breakdown = Some(breakdown);
    Ok(result)
}
