//! Leading-order integral formulas for test functions with Fourier support below 2, 4 and 6.
//!
//! Every term is an integral of a product of linear forms times Φ at an assembled
//! argument, over positive and free variables cut by linear gates. [`AssembledIntegral`]
//! holds one such term; the q = 1, 2 and 3 builders below translate index configurations
//! into it.
//!
//! Φ is evaluated at a point of the hyperplane Σξ = 0. The coordinates that carry a single
//! variable get the sign that makes the coordinates sum to zero; for a Φ that is even in
//! each coordinate the sign does not change the value.

use crate::conventions::{Conventions, I6Variant};
use crate::result::{ResultMetadata, StatisticResult};
use crate::spectral::normalization;
use crate::EngineError;
use combinatorics::{
    at_least, at_most, difference, enum_klm, enum_pairings, enum_q2_configs, enum_q3_configs, split_relative, union,
    PartitionKLM, Q2Config, Q3Config,
};
use quadrature::{integrate_with, ConstrainedDomain, Estimate, QuadError, QuadratureOptions, VarRange};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use testfn::{PhiFunction, TestFunctionBundle};

/// Largest n for which per-term breakdowns are kept.
pub const BREAKDOWN_MAX_N: usize = 4;

/// Quadrature settings for the integral formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QformOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    pub max_tensor_dim: usize,
    pub qmc_points: usize,
}

impl Default for QformOptions {
    fn default() -> Self {
        QformOptions { abs_tol: 1e-9, rel_tol: 1e-8, max_intervals: 200, max_tensor_dim: 3, qmc_points: 1 << 15 }
    }
}

impl QformOptions {
    fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_tensor_dim: self.max_tensor_dim,
            max_intervals: self.max_intervals,
            qmc_points: self.qmc_points,
            ..QuadratureOptions::default()
        }
    }
}

/// constant + Σ coeff·x[slot].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub constant: f64,
    pub coeffs: Vec<(usize, f64)>,
}

impl LinearForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().map(|&(s, a)| a * x[s]).sum::<f64>()
    }

    fn negated(&self) -> LinearForm {
        LinearForm { constant: -self.constant, coeffs: self.coeffs.iter().map(|&(s, a)| (s, -a)).collect() }
    }
}

/// ∫ Π factors · Φ(coords) over the variables, restricted to every `negative` form < 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledIntegral {
    /// Index label (1-based) of each integration variable.
    pub labels: Vec<usize>,
    pub ranges: Vec<VarRange>,
    /// The n coordinates of the argument of Φ as linear forms without constants.
    pub coords: Vec<Vec<(usize, f64)>>,
    pub factors: Vec<LinearForm>,
    pub negative: Vec<LinearForm>,
}

impl AssembledIntegral {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn integrate(&self, phi: &PhiFunction, opts: &QformOptions) -> Result<Estimate<f64>, EngineError> {
        let rho = phi.rho;
        let d = self.dim();
        let mut domain = ConstrainedDomain::new(self.ranges.clone(), rho);
        for form in &self.negative {
            domain.add_constraint(form.constant, &form.coeffs, &[]);
        }
        // Coordinates that mix several variables get their support bound as constraints,
        // so the integrand stays smooth inside the domain.
        for coord in &self.coords {
            if coord.len() > 1 {
                let mut dense = vec![0.0; d];
                for &(s, a) in coord {
                    dense[s] += a;
                }
                domain.add_abs_bound(&dense, rho);
            }
        }
        let n = self.coords.len();
        let integrand = |x: &[f64]| {
            let mut arg = vec![0.0; n];
            for (c, coord) in self.coords.iter().enumerate() {
                arg[c] = coord.iter().map(|&(s, a)| a * x[s]).sum();
            }
            let p = phi.eval(&arg);
            if p == 0.0 {
                return 0.0;
            }
            self.factors.iter().fold(p, |acc, f| acc * f.eval(x))
        };
        match integrate_with(integrand, &domain, &opts.quadrature()) {
            Ok(est) => Ok(est),
            Err(QuadError::NonConvergence { value, error }) => {
                log::warn!("term integral did not reach tolerance: {value:e} ± {error:e}");
                Err(EngineError::Quadrature(QuadError::NonConvergence { value, error }))
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Builder that assigns integration slots to index labels.
struct Builder {
    n: usize,
    labels: Vec<usize>,
    ranges: Vec<VarRange>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder { n, labels: Vec::new(), ranges: Vec::new() }
    }

    fn add(&mut self, label: usize, range: VarRange) {
        debug_assert!(!self.labels.contains(&label));
        self.labels.push(label);
        self.ranges.push(range);
    }

    fn slot(&self, label: usize) -> usize {
        self.labels.iter().position(|&l| l == label).expect("label has a slot")
    }

    /// constant + Σ_{plus} ξ − Σ_{minus} ξ.
    fn form(&self, constant: f64, plus: &[usize], minus: &[usize]) -> LinearForm {
        let mut coeffs: Vec<(usize, f64)> = plus.iter().map(|&j| (self.slot(j), 1.0)).collect();
        coeffs.extend(minus.iter().map(|&j| (self.slot(j), -1.0)));
        LinearForm { constant, coeffs }
    }

    /// Coordinates with `derived` (label, form) entries; every other variable label j
    /// sits at coordinate j with the sign that makes the coordinates sum to zero, and
    /// `pairs` (r, q) put ξ_q at coordinate r and −ξ_q at coordinate q.
    fn coords(&self, derived: &[(usize, LinearForm)], pairs: &[(usize, usize)]) -> Vec<Vec<(usize, f64)>> {
        let mut coords = vec![Vec::new(); self.n];
        let mut total = vec![0.0; self.labels.len()];
        for (label, form) in derived {
            for &(s, a) in &form.coeffs {
                total[s] += a;
            }
            coords[label - 1] = form.coeffs.clone();
        }
        let paired: Vec<usize> = pairs.iter().map(|&(_, q)| q).collect();
        for &(r, q) in pairs {
            let s = self.slot(q);
            coords[r - 1] = vec![(s, 1.0)];
            coords[q - 1] = vec![(s, -1.0)];
        }
        for (s, &label) in self.labels.iter().enumerate() {
            if paired.contains(&label) || derived.iter().any(|(l, _)| *l == label) {
                continue;
            }
            let sign = if total[s] > 0.0 { -1.0 } else { 1.0 };
            debug_assert!(total[s].abs() == 1.0, "variable {label} must enter the derived coordinates once");
            coords[label - 1] = vec![(s, sign)];
        }
        coords
    }

    fn finish(self, coords: Vec<Vec<(usize, f64)>>, factors: Vec<LinearForm>, negative: Vec<LinearForm>) -> AssembledIntegral {
        AssembledIntegral { labels: self.labels, ranges: self.ranges, coords, factors, negative }
    }
}

/// The q = 1 integral ∫_{ξ>0} Π ξ_k · Φ(Σ ξ_k (e_k − e_{σ(k)})) for one pairing.
pub fn q1_integral(n: usize, pairs: &[(usize, usize)]) -> AssembledIntegral {
    let mut b = Builder::new(n);
    for &(k, _) in pairs {
        b.add(k, VarRange::Positive);
    }
    let mut coords = vec![Vec::new(); n];
    for &(k, l) in pairs {
        let s = b.slot(k);
        coords[k - 1] = vec![(s, 1.0)];
        coords[l - 1] = vec![(s, -1.0)];
    }
    let factors = pairs.iter().map(|&(k, _)| b.form(0.0, &[k], &[])).collect();
    b.finish(coords, factors, Vec::new())
}

/// Π_{q∈Q} ξ_q as linear factors, the same pair weight as in the q = 1 block.
fn q_weights(b: &Builder, q: &[usize]) -> Vec<LinearForm> {
    q.iter().map(|&j| b.form(0.0, &[j], &[])).collect()
}

/// The integral of one second-layer configuration, without its sign.
pub fn q2_integral(n: usize, c: &Q2Config) -> AssembledIntegral {
    let mut b = Builder::new(n);
    for j in c.positive_vars() {
        b.add(j, VarRange::Positive);
    }
    for &j in &c.q {
        b.add(j, VarRange::Positive);
    }
    b.add(c.l, VarRange::Full);
    let r1c_wo_k = difference(&c.r1_c, &[c.k]);
    // ξ_l + 1 + Σ_{R₁^c∖{k} ∪ Q₁^{<l}} ξ − Σ_{Q₁^{>l}} ξ.
    let linear = b.form(1.0, &union(&[&[c.l], &r1c_wo_k, &c.q1_lt]), &c.q1_gt);
    let ek = b.form(0.0, &c.s2, &difference(&c.s1, &[c.k]));
    let coords = b.coords(&[(c.k, ek)], &c.pairing.pairs);
    let mut factors = q_weights(&b, &c.q);
    factors.push(linear.clone());
    b.finish(coords, factors, vec![linear])
}

/// The six third-layer families, in the order they appear in the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Q3Family {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
}

impl Q3Family {
    pub const ALL: [Q3Family; 6] = [Q3Family::I1, Q3Family::I2, Q3Family::I3, Q3Family::I4, Q3Family::I5, Q3Family::I6];

    pub fn from_index(i: usize) -> Option<Q3Family> {
        Self::ALL.get(i.checked_sub(1)?).copied()
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap() + 1
    }

    /// Sign and prefactor of the family inside the bracket.
    pub fn weight(self, conv: &Conventions) -> f64 {
        let two = if conv.q3_factor_two { 2.0 } else { 1.0 };
        match self {
            Q3Family::I1 | Q3Family::I2 => 1.0,
            Q3Family::I3 | Q3Family::I6 => -two,
            Q3Family::I4 | Q3Family::I5 => two,
        }
    }
}

/// The integral of one family of one third-layer configuration, without sign or prefactor.
pub fn q3_integral(n: usize, c: &Q3Config, family: Q3Family, conv: &Conventions) -> AssembledIntegral {
    let mut b = Builder::new(n);
    let core = difference(&union(&[&c.r_c, &c.q_c]), &[c.k1, c.k2, c.l1, c.l2]);
    for &j in &core {
        b.add(j, VarRange::Positive);
    }
    for &j in &c.q {
        b.add(j, VarRange::Positive);
    }
    let two_factor = matches!(family, Q3Family::I1 | Q3Family::I2);
    if !two_factor {
        b.add(c.k2, VarRange::Full);
    }
    b.add(c.l1, VarRange::Full);
    b.add(c.l2, VarRange::Full);

    let q1_gt = split_relative(&c.q1, c.l1).1;
    let q2_gt = split_relative(&c.q2, c.l2).1;
    let (r1_lt, r1_gt) = split_relative(&c.r1, c.k1);
    let (r2_lt, r2_gt) = split_relative(&c.r2, c.k2);
    let q1_le = at_most(&c.q1, c.l1);
    let q2_le = at_most(&c.q2, c.l2);
    // The shared gates 1 + Σ_{Q₁^{≤l₁} ∪ R₁^c} − Σ_{Q₁^{>l₁}} < 0 and the L₂ analog.
    let gate1 = b.form(1.0, &union(&[&q1_le, &c.r1_c]), &q1_gt);
    let gate2 = b.form(1.0, &union(&[&q2_le, &c.r2_c]), &q2_gt);
    let mut factors = q_weights(&b, &c.q);
    let mut negative = vec![gate1.clone(), gate2.clone()];
    let coords = if two_factor {
        let (ek1, ek2) = if family == Q3Family::I1 {
            (
                b.form(0.0, &union(&[&r1_lt, &c.q1_c, &q2_gt]), &union(&[&r1_gt, &q2_le, &c.r2_c])),
                b.form(0.0, &union(&[&r2_lt, &c.q2_c, &q1_gt]), &union(&[&r2_gt, &q1_le, &c.r1_c])),
            )
        } else {
            (
                b.form(0.0, &union(&[&r1_lt, &c.q1_c, &q1_gt]), &union(&[&r1_gt, &q1_le, &c.r1_c])),
                b.form(0.0, &union(&[&r2_lt, &c.q2_c, &q2_gt]), &union(&[&r2_gt, &q2_le, &c.r2_c])),
            )
        };
        factors.push(gate1);
        factors.push(gate2);
        b.coords(&[(c.k1, ek1), (c.k2, ek2)], &c.pairing.pairs)
    } else {
        let r2_ge = at_least(&c.r2, c.k2);
        let k2_side = union(&[&r2_lt, &c.q2_c]);
        let linear = match family {
            Q3Family::I3 => b.form(-1.0, &r2_ge, &k2_side),
            Q3Family::I4 => b.form(0.0, &union(&[&r2_ge, &c.r1_c, &q1_le]), &union(&[&k2_side, &q1_gt])),
            Q3Family::I5 => b.form(0.0, &union(&[&r2_ge, &c.r2_c, &q2_le]), &union(&[&k2_side, &q2_gt])),
            _ => match conv.i6_variant {
                I6Variant::Displayed => b.form(1.0, &union(&[&r2_ge, &c.r1_c, &q1_le]), &union(&[&k2_side, &q1_gt])),
                I6Variant::WithL2 => b.form(
                    1.0,
                    &union(&[&r2_ge, &c.r1_c, &q1_le, &c.r2_c, &q2_le]),
                    &union(&[&k2_side, &q1_gt, &q2_gt]),
                ),
            },
        };
        let ek1 = b.form(0.0, &c.a, &union(&[&c.b, &[c.k2, c.l1, c.l2]]));
        negative.push(linear.negated());
        factors.push(linear);
        b.coords(&[(c.k1, ek1)], &c.pairing.pairs)
    };
    b.finish(coords, factors, negative)
}

fn check_budget(bundle: &TestFunctionBundle, limit: f64) -> Result<(), EngineError> {
    let budget = bundle.phi.budget();
    if budget >= limit {
        return Err(EngineError::Precondition(format!("support budget {budget} must be below {limit}")));
    }
    Ok(())
}

/// One signed contribution to a bracket, in bracket units.
#[derive(Debug, Clone, PartialEq)]
struct Contribution {
    key: String,
    value: f64,
    error: f64,
}

fn fmt_set(s: &[usize]) -> String {
    format!("{s:?}").replace(' ', "")
}

fn partition_key(p: &PartitionKLM) -> String {
    format!("K={} L={}", fmt_set(&p.k), fmt_set(&p.l))
}

fn q1_contributions(bundle: &TestFunctionBundle, opts: &QformOptions, conv: &Conventions) -> Result<Vec<Contribution>, EngineError> {
    let n = bundle.n();
    let jobs: Vec<(PartitionKLM, Vec<(usize, usize)>)> = enum_klm(n)
        .flat_map(|p| enum_pairings(&p.k, &p.l).map(move |pr| (p.clone(), pr.pairs)).collect::<Vec<_>>())
        .collect();
    jobs.par_iter()
        .map(|(p, pairs)| {
            let est = q1_integral(n, pairs).integrate(&bundle.phi, opts)?;
            let f = conv.l_factor(1, p.l.len());
            Ok(Contribution {
                key: format!("q1 {} pairs={}", partition_key(p), format!("{pairs:?}").replace(' ', "")),
                value: f * est.value,
                error: est.error,
            })
        })
        .collect()
}

fn q2_contributions(bundle: &TestFunctionBundle, opts: &QformOptions, conv: &Conventions) -> Result<Vec<Contribution>, EngineError> {
    let n = bundle.n();
    let jobs: Vec<Q2Config> = enum_klm(n).flat_map(|p| enum_q2_configs(&p.k, &p.l).collect::<Vec<_>>()).collect();
    jobs.par_iter()
        .map(|c| {
            let est = q2_integral(n, c).integrate(&bundle.phi, opts)?;
            let f = conv.l_factor(2, c.l_set.len()) * c.sign as f64;
            Ok(Contribution { key: q2_key(c), value: f * est.value, error: est.error })
        })
        .collect()
}

/// Breakdown key of a second-layer configuration.
pub fn q2_key(c: &Q2Config) -> String {
    format!(
        "q2 K={} L={} R={} Q={} pairs={} R1={} Q1={} k={} l={}",
        fmt_set(&c.k_set),
        fmt_set(&c.l_set),
        fmt_set(&c.r),
        fmt_set(&c.q),
        format!("{:?}", c.pairing.pairs).replace(' ', ""),
        fmt_set(&c.r1),
        fmt_set(&c.q1),
        c.k,
        c.l
    )
}

/// Breakdown key of one family of a third-layer configuration.
pub fn q3_key(c: &Q3Config, family: Q3Family) -> String {
    format!(
        "q3 I{} K={} L={} R={} Q={} pairs={} R1={} R1c={} R2={} R2c={} Q1={} Q1c={} Q2={} Q2c={} k=({},{}) l=({},{})",
        family.index(),
        fmt_set(&c.k_set),
        fmt_set(&c.l_set),
        fmt_set(&c.r),
        fmt_set(&c.q),
        format!("{:?}", c.pairing.pairs).replace(' ', ""),
        fmt_set(&c.r1),
        fmt_set(&c.r1_c),
        fmt_set(&c.r2),
        fmt_set(&c.r2_c),
        fmt_set(&c.q1),
        fmt_set(&c.q1_c),
        fmt_set(&c.q2),
        fmt_set(&c.q2_c),
        c.k1,
        c.k2,
        c.l1,
        c.l2
    )
}

fn q3_contributions(bundle: &TestFunctionBundle, opts: &QformOptions, conv: &Conventions) -> Result<Vec<Contribution>, EngineError> {
    let n = bundle.n();
    let jobs: Vec<(Q3Config, Q3Family)> = enum_klm(n)
        .flat_map(|p| enum_q3_configs(&p.k, &p.l).collect::<Vec<_>>())
        .flat_map(|c| Q3Family::ALL.map(|f| (c.clone(), f)))
        .collect();
    jobs.par_iter()
        .map(|(c, fam)| {
            let est = q3_integral(n, c, *fam, conv).integrate(&bundle.phi, opts)?;
            let f = conv.l_factor(3, c.l_set.len()) * c.sign as f64 * fam.weight(conv);
            Ok(Contribution { key: q3_key(c, *fam), value: f * est.value, error: est.error })
        })
        .collect()
}

fn assemble(
    bundle: &TestFunctionBundle,
    parts: Vec<Contribution>,
    conv: &Conventions,
    layer: usize,
) -> StatisticResult {
    let norm = normalization(bundle);
    let n = bundle.n();
    let value: f64 = parts.iter().map(|c| c.value).sum::<f64>() * norm;
    let error: f64 = parts.iter().map(|c| c.error).sum::<f64>() * norm;
    let metadata = ResultMetadata {
        n,
        matrix_size: bundle.matrix_size,
        slow_scale: bundle.slow_scale,
        seed: None,
        config_hash: String::new(),
        normalization: norm,
        conventions: conv.describe(),
        notes: vec![format!(
            "leading-order q = {layer} formula; the neglected terms are lower order than N𝒯"
        )],
    };
    let mut result = StatisticResult::new(value, error, metadata);
    if n <= BREAKDOWN_MAX_N {
        result.breakdown = Some(parts.into_iter().map(|c| (c.key, c.value * norm)).collect());
    }
    result
}

/// The q = 1 formula κ(h)·(N𝒯/2π)·Σ_{K+L+M} Σ_{(K:L)} ∫_{ξ>0} Π ξ_k Φ(…).
pub fn q1_statistic(bundle: &TestFunctionBundle, opts: &QformOptions, conv: &Conventions) -> Result<StatisticResult, EngineError> {
    check_budget(bundle, 2.0)?;
    Ok(assemble(bundle, q1_contributions(bundle, opts, conv)?, conv, 1))
}

/// The integral of one second-layer configuration, without its sign.
pub fn i11_term(bundle: &TestFunctionBundle, config: &Q2Config, opts: &QformOptions) -> Result<Estimate<f64>, EngineError> {
    check_budget(bundle, 4.0)?;
    q2_integral(bundle.n(), config).integrate(&bundle.phi, opts)
}

/// The q = 2 formula: the q = 1 block plus every signed second-layer configuration.
pub fn q2_statistic(bundle: &TestFunctionBundle, opts: &QformOptions, conv: &Conventions) -> Result<StatisticResult, EngineError> {
    check_budget(bundle, 4.0)?;
    let mut parts = q1_contributions(bundle, opts, conv)?;
    parts.extend(q2_contributions(bundle, opts, conv)?);
    Ok(assemble(bundle, parts, conv, 2))
}

/// The integral of one family of one third-layer configuration, without sign or prefactor.
pub fn i22_term(
    bundle: &TestFunctionBundle,
    config: &Q3Config,
    family: Q3Family,
    opts: &QformOptions,
    conv: &Conventions,
) -> Result<Estimate<f64>, EngineError> {
    check_budget(bundle, 6.0)?;
    q3_integral(bundle.n(), config, family, conv).integrate(&bundle.phi, opts)
}

/// The q = 3 formula: the q = 1 and q = 2 blocks plus every third-layer family.
pub fn q3_statistic(bundle: &TestFunctionBundle, opts: &QformOptions, conv: &Conventions) -> Result<StatisticResult, EngineError> {
    check_budget(bundle, 6.0)?;
    let mut parts = q1_contributions(bundle, opts, conv)?;
    parts.extend(q2_contributions(bundle, opts, conv)?);
    parts.extend(q3_contributions(bundle, opts, conv)?);
    Ok(assemble(bundle, parts, conv, 3))
}
