//! Numerical integration for the ξ-integrals of the correlation formulas and for
//! contour integrals along vertical lines.
//!
//! * [`gk`] holds the 21-point Gauss-Kronrod rule and a globally adaptive 1-d driver.
//! * [`domain`] describes boxes cut by strict linear inequalities and projects them
//!   with Fourier-Motzkin elimination, which yields exact nested integration limits.
//! * [`cubature`] integrates over such domains: nested adaptive quadrature for low
//!   dimension, randomized quasi Monte Carlo above it.
//! * [`contour`] integrates along truncated vertical lines in the complex plane.

pub mod contour;
pub mod cubature;
pub mod domain;
pub mod gk;

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub use contour::{contour_integral_truncated, ContourEstimate};
pub use cubature::{integrate, integrate_with, monte_carlo, Method, QuadratureOptions};
pub use domain::{ConstrainedDomain, LinearConstraint, VarRange};
pub use gk::{adaptive_gk, qk21, GkOptions};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// An integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("requested tolerance not reached: estimate {value:e} with error {error:e}")]
    NonConvergence { value: f64, error: f64 },
    #[error("dimension {0} exceeds the supported maximum {max}", max = domain::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}
