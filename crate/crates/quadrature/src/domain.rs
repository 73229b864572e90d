//! Boxes cut by strict linear inequalities, with Fourier-Motzkin projection.
//!
//! A constraint `c + a·ξ < 0` is stored as the pair `(c, a)`. Strict and non-strict
//! inequalities are treated alike since boundaries have measure zero. A domain whose
//! interior is empty is detected exactly by eliminating every variable.

use crate::QuadError;

/// Largest supported dimension.
pub const MAX_DIM: usize = 12;

/// Upper bound on the size of an intermediate Fourier-Motzkin system. Beyond it the
/// projection is abandoned and the caller falls back to sampling-based integration.
const FM_CAP: usize = 4000;

/// Range tag of one integration variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRange {
    /// ξ > 0.
    Positive,
    /// ξ ∈ ℝ.
    Full,
}

/// The strict inequality `constant + Σ coeffs[j] ξ_j < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub constant: f64,
    pub coeffs: Vec<f64>,
}

impl LinearConstraint {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
    }

    pub fn satisfied(&self, x: &[f64]) -> bool {
        self.value(x) < 0.0
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }
}

/// A box `lower < ξ < upper` intersected with strict linear inequalities.
///
/// Full-line variables must be given finite limits through [`ConstrainedDomain::with_box`];
/// for the correlation integrals these come from the compact support of Φ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedDomain {
    pub ranges: Vec<VarRange>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl ConstrainedDomain {
    /// A domain with the given range tags and the symmetric box `|ξ_j| < half_width`.
    pub fn new(ranges: Vec<VarRange>, half_width: f64) -> Self {
        let d = ranges.len();
        let lower = ranges
            .iter()
            .map(|r| match r {
                VarRange::Positive => 0.0,
                VarRange::Full => -half_width,
            })
            .collect();
        ConstrainedDomain { ranges, lower, upper: vec![half_width; d], constraints: Vec::new() }
    }

    /// The unit-free box `[lower, upper]` with every variable tagged as full-line.
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let ranges = vec![VarRange::Full; lower.len()];
        ConstrainedDomain { ranges, lower, upper, constraints: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    /// Intersects variable `j` with the interval `(lo, hi)`.
    pub fn with_box(mut self, j: usize, lo: f64, hi: f64) -> Self {
        self.lower[j] = self.lower[j].max(lo);
        self.upper[j] = self.upper[j].min(hi);
        self
    }

    /// Adds `constant + Σ lhs < Σ rhs`, with each side given as `(index, coefficient)`.
    pub fn add_constraint(&mut self, constant: f64, lhs: &[(usize, f64)], rhs: &[(usize, f64)]) {
        let mut coeffs = vec![0.0; self.dim()];
        for &(j, a) in lhs {
            coeffs[j] += a;
        }
        for &(j, b) in rhs {
            coeffs[j] -= b;
        }
        self.constraints.push(LinearConstraint { constant, coeffs });
    }

    /// Adds `|Σ coeffs·ξ| < bound` as two strict inequalities.
    pub fn add_abs_bound(&mut self, coeffs: &[f64], bound: f64) {
        self.constraints.push(LinearConstraint { constant: -bound, coeffs: coeffs.to_vec() });
        self.constraints
            .push(LinearConstraint { constant: -bound, coeffs: coeffs.iter().map(|a| -a).collect() });
    }

    /// Whether `x` lies in the open domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lower).all(|(v, lo)| v > lo)
            && x.iter().zip(&self.upper).all(|(v, hi)| v < hi)
            && self.constraints.iter().all(|c| c.satisfied(x))
    }

    pub fn box_volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| (hi - lo).max(0.0)).product()
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let d = self.dim();
        if d > MAX_DIM {
            return Err(QuadError::DimensionTooLarge(d));
        }
        if self.lower.len() != d || self.upper.len() != d {
            return Err(QuadError::InvalidDomain("box length differs from dimension".into()));
        }
        if self.lower.iter().chain(&self.upper).any(|v| !v.is_finite()) {
            return Err(QuadError::InvalidDomain("box limits must be finite".into()));
        }
        if let Some(c) = self.constraints.iter().find(|c| c.coeffs.len() != d) {
            return Err(QuadError::InvalidDomain(format!(
                "constraint references {} variables in a {d}-dimensional domain",
                c.coeffs.len()
            )));
        }
        Ok(())
    }

    /// All constraints, including the box faces.
    fn full_system(&self) -> Vec<LinearConstraint> {
        let d = self.dim();
        let mut sys = self.constraints.clone();
        for j in 0..d {
            let mut up = vec![0.0; d];
            up[j] = 1.0;
            sys.push(LinearConstraint { constant: -self.upper[j], coeffs: up });
            let mut lo = vec![0.0; d];
            lo[j] = -1.0;
            sys.push(LinearConstraint { constant: self.lower[j], coeffs: lo });
        }
        sys
    }

    /// Projects the domain onto leading coordinates.
    ///
    /// Returns `None` when the intermediate systems grow past a fixed cap. Otherwise
    /// `Some(Projection)` whose level `k` holds the constraints on `ξ_0..=ξ_k`.
    pub fn project(&self) -> Option<Projection> {
        let d = self.dim();
        let mut levels: Vec<Vec<LinearConstraint>> = vec![Vec::new(); d];
        let mut current = prune(self.full_system(), &self.lower, &self.upper);
        let mut empty = current.iter().any(|c| is_infeasible_constant(c));
        for k in (0..d).rev() {
            levels[k] = current.iter().filter(|c| c.coeffs[k] != 0.0).cloned().collect();
            current = eliminate(&current, k)?;
            current = prune(current, &self.lower, &self.upper);
            if current.iter().any(is_infeasible_constant) {
                empty = true;
            }
            if current.len() > FM_CAP {
                return None;
            }
        }
        Some(Projection { levels, empty })
    }

    /// True when the interior is provably empty.
    pub fn is_empty(&self) -> bool {
        if self.lower.iter().zip(&self.upper).any(|(lo, hi)| hi <= lo) {
            return true;
        }
        self.project().map(|p| p.empty).unwrap_or(false)
    }
}

/// Nested limits produced by Fourier-Motzkin elimination.
#[derive(Debug, Clone)]
pub struct Projection {
    levels: Vec<Vec<LinearConstraint>>,
    pub empty: bool,
}

impl Projection {
    /// Limits of `ξ_k` given the outer coordinates `prefix = ξ_0..ξ_{k-1}`.
    pub fn bounds(&self, k: usize, prefix: &[f64]) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in &self.levels[k] {
            let ak = c.coeffs[k];
            let rest = c.constant + c.coeffs[..k].iter().zip(prefix).map(|(a, v)| a * v).sum::<f64>();
            let t = -rest / ak;
            if ak > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
        }
        (lo, hi)
    }
}

fn is_infeasible_constant(c: &LinearConstraint) -> bool {
    c.coeffs.iter().all(|a| *a == 0.0) && c.constant >= -1e-13
}

/// Removes variable `k` by combining every upper with every lower bound on it.
fn eliminate(sys: &[LinearConstraint], k: usize) -> Option<Vec<LinearConstraint>> {
    let (pos, rest): (Vec<_>, Vec<_>) = sys.iter().partition(|c| c.coeffs[k] > 0.0);
    let (neg, zero): (Vec<_>, Vec<_>) = rest.into_iter().partition(|c| c.coeffs[k] < 0.0);
    if pos.len() * neg.len() > FM_CAP * 4 {
        return None;
    }
    let mut out: Vec<LinearConstraint> = zero.into_iter().cloned().collect();
    for p in &pos {
        for q in &neg {
            let wp = -q.coeffs[k];
            let wq = p.coeffs[k];
            let coeffs: Vec<f64> = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| wp * a + wq * b).collect();
            let mut c = LinearConstraint { constant: wp * p.constant + wq * q.constant, coeffs };
            c.coeffs[k] = 0.0;
            out.push(c);
        }
    }
    Some(out)
}

/// Normalizes, drops constraints that hold on the whole box, and removes duplicates.
fn prune(sys: Vec<LinearConstraint>, lower: &[f64], upper: &[f64]) -> Vec<LinearConstraint> {
    let mut out: Vec<LinearConstraint> = Vec::with_capacity(sys.len());
    for mut c in sys {
        for a in c.coeffs.iter_mut() {
            if a.abs() < 1e-14 {
                *a = 0.0;
            }
        }
        let s = c.scale();
        if s > 0.0 {
            c.constant /= s;
            for a in c.coeffs.iter_mut() {
                *a /= s;
            }
        } else {
            out.push(c);
            continue;
        }
        // Largest value of c over the box; if negative the constraint is redundant.
        let max_val = c.constant
            + c.coeffs
                .iter()
                .enumerate()
                .map(|(j, a)| if *a > 0.0 { a * upper[j] } else { a * lower[j] })
                .sum::<f64>();
        if max_val < -1e-12 {
            continue;
        }
        let dup = out.iter().any(|o| {
            (o.constant - c.constant).abs() < 1e-12
                && o.coeffs.iter().zip(&c.coeffs).all(|(x, y)| (x - y).abs() < 1e-12)
        });
        if !dup {
            out.push(c);
        }
    }
    out
}
