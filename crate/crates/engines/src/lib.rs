//! Evaluators of the smoothed n-level correlation statistic of unitary eigenphases.
//!
//! The engines share one test-function bundle and return a [`StatisticResult`]:
//!
//! * [`empirical`]: Monte Carlo over Haar samples.
//! * [`spectral`]: the exact expectation from trace moments.
//! * [`qforms`]: the leading-order integral formulas for support budgets below 2, 4 and 6.
//! * [`contour`]: the contour-integral representation built from the ratios sums.
//! * [`ratios`]: Monte Carlo and closed forms of the two-over-two ratio average.

pub mod contour;
pub mod conventions;
pub mod empirical;
pub mod qforms;
pub mod ratios;
pub mod result;
pub mod spectral;

pub use contour::theorem4_rhs_validation;
pub use conventions::{ContourSign, Conventions, I6Variant, LSignPlacement};
pub use empirical::{empirical_ncorr, EmpiricalMethod, EmpiricalOptions};
pub use qforms::{i11_term, i22_term, q1_statistic, q2_key, q2_statistic, q3_key, q3_statistic, Q3Family, QformOptions};
pub use ratios::{ratios_closed, ratios_mc, RatioShifts, RatiosEstimate};
pub use result::{config_hash, mean_and_se, ResultMetadata, StatisticResult};
pub use spectral::{exact_ncorr, SpectralWeights};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadError),
    #[error(transparent)]
    TestFn(#[from] testfn::TestFnError),
    #[error(transparent)]
    Haar(#[from] haar_core::HaarError),
    #[error(transparent)]
    Ratios(#[from] ratios_core::RatiosError),
}
