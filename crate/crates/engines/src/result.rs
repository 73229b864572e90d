//! Result records shared by every engine.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Metadata attached to every computed statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ResultMetadata {
    /// Number of points n in the correlation.
    pub n: usize,
    /// Matrix size N.
    pub matrix_size: usize,
    /// The slow scale 𝒯.
    pub slow_scale: f64,
    pub seed: Option<u64>,
    pub config_hash: String,
    /// κ(h)·N𝒯/2π, the common factor of the leading-order formulas.
    pub normalization: f64,
    /// Sign and prefactor conventions in force, as `name=value` strings.
    pub conventions: Vec<String>,
    pub notes: Vec<String>,
}

/// A statistic with its uncertainty and optional per-term breakdown.
///
/// `uncertainty` is a standard error for Monte Carlo engines and an accumulated error
/// estimate for quadrature engines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticResult {
    pub value: f64,
    pub uncertainty: f64,
    pub breakdown: Option<Vec<(String, f64)>>,
    pub metadata: ResultMetadata,
}

impl StatisticResult {
    pub fn new(value: f64, uncertainty: f64, metadata: ResultMetadata) -> Self {
        StatisticResult { value, uncertainty: uncertainty.max(0.0), breakdown: None, metadata }
    }

    /// value / normalization, or the raw value when the normalization is zero.
    pub fn normalized(&self) -> f64 {
        if self.metadata.normalization == 0.0 {
            self.value
        } else {
            self.value / self.metadata.normalization
        }
    }

    pub fn normalized_uncertainty(&self) -> f64 {
        if self.metadata.normalization == 0.0 {
            self.uncertainty
        } else {
            self.uncertainty / self.metadata.normalization.abs()
        }
    }

    /// Sum of the breakdown entries, if any.
    pub fn breakdown_sum(&self) -> Option<f64> {
        self.breakdown.as_ref().map(|b| b.iter().map(|(_, v)| v).sum())
    }

    /// One CSV summary row: value, uncertainty, n, N, 𝒯, seed, hash.
    pub fn csv_row(&self) -> String {
        let m = &self.metadata;
        let seed = m.seed.map(|s| s.to_string()).unwrap_or_default();
        format!(
            "{:.17e},{:.17e},{},{},{},{},{}",
            self.value, self.uncertainty, m.n, m.matrix_size, m.slow_scale, seed, m.config_hash
        )
    }

    pub const CSV_HEADER: &'static str = "value,uncertainty,n,N,T,seed,config_hash";
}

/// Lowercase hex SHA-256 of the canonical JSON encoding of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("configuration values serialize to JSON");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

/// Mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
