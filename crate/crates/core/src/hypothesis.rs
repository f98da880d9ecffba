//! Entropy contrast tests across populations, goodness of fit against a
//! known entropy value, and asymptotic confidence intervals.
//!
//! Each population contributes `(H_i, σ²_i, N_i)`. The statistic
//!
//! ```text
//! S = Σ_i N_i (H_i − v̄)² / σ²_i,   v̄ = Σ_i (N_i/σ²_i) H_i / Σ_i (N_i/σ²_i)
//! ```
//!
//! is asymptotically χ² with `r − 1` degrees of freedom under equal
//! entropies. "Sufficiently large N" is left to the caller.

use crate::entropy::{entropy, EntropyKind};
use crate::error::{Error, Result};
use crate::inference::{entropy_variance, MLFit};
use crate::special::{chi2_survival, std_normal_quantile};
use crate::wishart::AsModel;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Point estimate of an entropy with its asymptotic variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    /// `σ²_H(θ̂)`; the variance of `H(θ̂)` is about `σ²_H / N`.
    pub variance: f64,
    pub n: usize,
    pub kind: EntropyKind,
}

impl EntropyEstimate {
    pub fn new(value: f64, variance: f64, n: usize, kind: EntropyKind) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!("variance must be non-negative, got {variance}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be at least 1".into()));
        }
        Ok(EntropyEstimate { value, variance, n, kind })
    }

    /// Plug-in estimate at a model (fitted parameters or fixture scalars).
    pub fn from_model(kind: EntropyKind, p: &impl AsModel, n: usize) -> Result<Self> {
        let value = entropy(kind, p)?.value;
        let variance = entropy_variance(kind, p)?;
        EntropyEstimate::new(value, variance, n, kind)
    }

    pub fn from_fit(kind: EntropyKind, fit: &MLFit) -> Result<Self> {
        Self::from_model(kind, &fit.params, fit.n)
    }

    /// `σ²_H / N`.
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.n as f64).sqrt()
    }
}

/// Result of a contrast or goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    /// `v̄` for contrast tests, the reference value for goodness of fit.
    pub pooled_mean: f64,
}

impl TestOutcome {
    /// Reject at level `alpha` iff `p ≤ alpha`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }

    pub fn decisions(&self, levels: &[f64]) -> Vec<(f64, bool)> {
        levels.iter().map(|&a| (a, self.rejects(a))).collect()
    }
}

fn check_population(estimates: &[EntropyEstimate]) -> Result<()> {
    if estimates.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "a contrast test needs at least two populations, got {}",
            estimates.len()
        )));
    }
    let kind = estimates[0].kind;
    for (i, e) in estimates.iter().enumerate() {
        if e.kind != kind {
            return Err(Error::MixedKinds(kind.to_string(), e.kind.to_string()));
        }
        if !(e.variance > 0.0) {
            return Err(Error::ZeroVariance { index: i });
        }
    }
    Ok(())
}

fn weighted_mean(estimates: &[EntropyEstimate]) -> f64 {
    let (num, den) = estimates.iter().fold((0.0, 0.0), |(num, den), e| {
        let w = e.n as f64 / e.variance;
        (num + w * e.value, den + w)
    });
    num / den
}

/// Precision-weighted mean `v̄`.
pub fn pooled_entropy_mean(estimates: &[EntropyEstimate]) -> Result<f64> {
    check_population(estimates)?;
    Ok(weighted_mean(estimates))
}

/// Contrast test of `H_1 = … = H_r`.
pub fn entropy_test(estimates: &[EntropyEstimate]) -> Result<TestOutcome> {
    check_population(estimates)?;
    let v = weighted_mean(estimates);
    let statistic: f64 = estimates
        .iter()
        .map(|e| e.n as f64 * (e.value - v).powi(2) / e.variance)
        .sum();
    let df = (estimates.len() - 1) as u32;
    Ok(TestOutcome {
        statistic,
        df,
        p_value: chi2_survival(statistic, df)?,
        pooled_mean: v,
    })
}

/// Test of `H = v` for a known reference value.
pub fn goodness_of_fit(estimate: &EntropyEstimate, v: f64) -> Result<TestOutcome> {
    if !(estimate.variance > 0.0) {
        return Err(Error::ZeroVariance { index: 0 });
    }
    let statistic = estimate.n as f64 * (estimate.value - v).powi(2) / estimate.variance;
    Ok(TestOutcome {
        statistic,
        df: 1,
        p_value: chi2_survival(statistic, 1)?,
        pooled_mean: v,
    })
}

/// How a confidence level maps to a normal quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileConvention {
    /// `z = Φ⁻¹(1 − α/2)`.
    #[default]
    TwoSided,
    /// `z = Φ⁻¹(1 − α)`, which is how the intervals of the original ENL
    /// study were computed (1.6449 at the 95% level).
    PaperCompat,
}

impl QuantileConvention {
    pub fn z(&self, level: f64) -> Result<f64> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidParameter(format!("confidence level must be in (0, 1), got {level}")));
        }
        let alpha = 1.0 - level;
        match self {
            QuantileConvention::TwoSided => std_normal_quantile(1.0 - alpha / 2.0),
            QuantileConvention::PaperCompat => std_normal_quantile(1.0 - alpha),
        }
    }
}

impl fmt::Display for QuantileConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantileConvention::TwoSided => "two-sided",
            QuantileConvention::PaperCompat => "paper-compat",
        })
    }
}

impl FromStr for QuantileConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "two-sided" => Ok(QuantileConvention::TwoSided),
            "paper-compat" => Ok(QuantileConvention::PaperCompat),
            other => Err(Error::Parse(format!(
                "unknown quantile convention '{other}' (expected two-sided or paper-compat)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub convention: QuantileConvention,
}

impl ConfidenceInterval {
    fn centered(center: f64, half_width: f64, level: f64, convention: QuantileConvention) -> Self {
        ConfidenceInterval {
            lower: center - half_width,
            upper: center + half_width,
            level,
            convention,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn overlaps(&self, other: &ConfidenceInterval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// `H ± z √(σ²/N)`.
pub fn confidence_interval(
    estimate: &EntropyEstimate,
    level: f64,
    convention: QuantileConvention,
) -> Result<ConfidenceInterval> {
    let z = convention.z(level)?;
    Ok(ConfidenceInterval::centered(estimate.value, z * estimate.standard_error(), level, convention))
}

/// `H₁ − H₂ ± z √(σ₁²/N₁ + σ₂²/N₂)`.
pub fn difference_interval(
    e1: &EntropyEstimate,
    e2: &EntropyEstimate,
    level: f64,
    convention: QuantileConvention,
) -> Result<ConfidenceInterval> {
    if e1.kind != e2.kind {
        return Err(Error::MixedKinds(e1.kind.to_string(), e2.kind.to_string()));
    }
    let z = convention.z(level)?;
    let se = (e1.variance / e1.n as f64 + e2.variance / e2.n as f64).sqrt();
    Ok(ConfidenceInterval::centered(e1.value - e2.value, z * se, level, convention))
}
