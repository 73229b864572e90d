//! Run configuration: TOML file values, command-line overrides, validation and hashing.

use crate::CliError;
use engines::{config_hash, Conventions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NCORR_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Paircorr,
    Ratios,
    Jstar,
    #[default]
    Ncorr,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Paircorr => "paircorr",
            Command::Ratios => "ratios",
            Command::Jstar => "jstar",
            Command::Ncorr => "ncorr",
            Command::Validate => "validate",
        }
    }
}

/// Evaluator used by `ncorr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// The q = 1, 2 or 3 integral formula.
    #[default]
    Formula,
    /// Monte Carlo over Haar samples.
    Empirical,
    /// Exact trace moments.
    Exact,
    /// The contour-integral representation (n ≤ 2).
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[default]
    Concordance,
}

/// Where artifacts go. Not part of the configuration hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// File name stem; defaults to the command name.
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Number of points in the correlation.
    pub n: usize,
    /// Matrix size.
    #[serde(rename = "N")]
    pub matrix_size: usize,
    /// Slow scale 𝒯; 10N when absent.
    #[serde(rename = "T")]
    pub slow_scale: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    /// Support budget of Φ, the bound on Σ|ξ_j|.
    pub budget: f64,
    pub bump_half_width: f64,
    pub engine: Engine,
    /// Layer of the integral formula; the smallest valid one when absent.
    pub q: Option<usize>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Periodic-shift window of the direct empirical sum; the frequency-space sum when absent.
    pub window: Option<usize>,
    pub bins: usize,
    pub r_max: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    /// Shift sets of J*.
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    /// Truncation q of J*; untruncated when absent.
    pub truncation: Option<usize>,
    /// Real part δ of the contour lines.
    pub contour_delta: f64,
    /// Truncation height of the contour lines; chosen from N and 𝒯 when absent.
    pub height: Option<f64>,
    pub suite: Suite,
    pub conventions: Conventions,
    /// Read from files and flags; left out of exported records.
    #[serde(skip_serializing)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        RunConfig {
            command: Command::Ncorr,
            n: 2,
            matrix_size: 20,
            slow_scale: None,
            seed: 0,
            samples: 10_000,
            budget: 1.8,
            bump_half_width: 1.0,
            engine: Engine::Formula,
            q: None,
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            window: None,
            bins: 60,
            r_max: 3.0,
            alpha: c(0.2),
            beta: c(0.2),
            gamma: c(0.3),
            delta: c(0.3),
            a: vec![c(0.3), c(0.5)],
            b: vec![c(0.4)],
            truncation: None,
            contour_delta: 0.1,
            height: None,
            suite: Suite::Concordance,
            conventions: Conventions::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads a TOML file; missing keys take their defaults.
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn slow_scale(&self) -> f64 {
        self.slow_scale.unwrap_or(10.0 * self.matrix_size as f64)
    }

    /// The smallest layer whose support condition holds, unless set explicitly.
    pub fn layer(&self) -> usize {
        self.q.unwrap_or(if self.budget < 2.0 {
            1
        } else if self.budget < 4.0 {
            2
        } else {
            3
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n == 0 || self.matrix_size == 0 {
            return bad("n and N must be at least 1".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if !(self.budget > 0.0) || !(self.bump_half_width > 0.0) {
            return bad("budget and bump_half_width must be positive".into());
        }
        if let Some(t) = self.slow_scale {
            if !(t > 0.0) {
                return bad("T must be positive".into());
            }
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if let Some(q) = self.q {
            if !(1..=3).contains(&q) {
                return bad(format!("q must be 1, 2 or 3, got {q}"));
            }
        }
        if self.window == Some(0) {
            return bad("window must be at least 1".into());
        }
        if self.bins == 0 || !(self.r_max > 0.0) {
            return bad("bins must be at least 1 and r_max positive".into());
        }
        if !(self.contour_delta > 0.0) || self.height.is_some_and(|h| !(h > 0.0)) {
            return bad("contour_delta and height must be positive".into());
        }
        if self.command == Command::Ncorr && self.engine == Engine::Contour && self.n > 2 {
            return bad("the contour engine supports n ≤ 2".into());
        }
        if self.command == Command::Jstar && (self.a.is_empty() && self.b.is_empty()) {
            return bad("jstar needs at least one shift in a or b".into());
        }
        Ok(())
    }

    /// SHA-256 of the configuration without its output location.
    pub fn hash(&self) -> String {
        let mut hashed = self.clone();
        hashed.output = OutputConfig::default();
        config_hash(&hashed)
    }

    /// The output directory: the configured one, else the environment variable, else ".".
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn prefix(&self) -> String {
        self.output.prefix.clone().unwrap_or_else(|| self.command.name().to_string())
    }
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}
