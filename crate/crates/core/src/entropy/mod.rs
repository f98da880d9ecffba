//! Closed-form Shannon, Rényi and restricted Tsallis entropies of the scaled
//! complex Wishart law, and the kernel `μ̃_β = E{f^{β-1}}` they share.
//!
//! Every formula depends on `Σ` only through `ln|Σ|`, so the functions accept
//! anything implementing [`AsModel`]: full [`WishartParams`](crate::WishartParams)
//! or a bare [`ModelSummary`].
//!
//! Gamma products are kept in log space throughout; `μ̃_β` is exponentiated
//! only when the Tsallis entropy or `μ̃_β` itself is requested.

mod registry;

pub use registry::{EntropyMeasure, MeasureFactory, MeasureRegistry, RenyiMeasure, ShannonMeasure, TsallisMeasure};

use crate::error::{Error, Result};
use crate::special::{ln_abs_gamma, ln_multivariate_gamma, multivariate_polygamma, PolygammaOrder};
use crate::wishart::AsModel;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Orders this close to one are evaluated through the Shannon formula.
pub const BETA_ONE_TOLERANCE: f64 = 1e-7;

/// Largest `x` with `exp(x)` finite.
const LN_MAX_F64: f64 = 709.782_712_893_384;

/// Which member of the entropy family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EntropyKind {
    Shannon,
    Renyi(f64),
    Tsallis(f64),
}

impl EntropyKind {
    pub fn renyi(beta: f64) -> Result<Self> {
        check_order(beta)?;
        Ok(EntropyKind::Renyi(beta))
    }

    pub fn tsallis(beta: f64) -> Result<Self> {
        check_order(beta)?;
        Ok(EntropyKind::Tsallis(beta))
    }

    pub fn order(&self) -> Option<f64> {
        match *self {
            EntropyKind::Shannon => None,
            EntropyKind::Renyi(b) | EntropyKind::Tsallis(b) => Some(b),
        }
    }

    /// Registry name of the family (`shannon`, `renyi`, `tsallis`).
    pub fn family(&self) -> &'static str {
        match self {
            EntropyKind::Shannon => "shannon",
            EntropyKind::Renyi(_) => "renyi",
            EntropyKind::Tsallis(_) => "tsallis",
        }
    }

    /// The strategy object evaluating this kind.
    pub fn measure(&self) -> Box<dyn EntropyMeasure> {
        match *self {
            EntropyKind::Shannon => Box::new(ShannonMeasure),
            EntropyKind::Renyi(beta) => Box::new(RenyiMeasure { beta }),
            EntropyKind::Tsallis(beta) => Box::new(TsallisMeasure { beta }),
        }
    }
}

pub(crate) fn check_order(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) || beta == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "entropy order must be positive and different from 1, got {beta}"
        )));
    }
    Ok(())
}

impl fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            None => write!(f, "{}", self.family()),
            Some(b) => write!(f, "{}:{}", self.family(), b),
        }
    }
}

impl FromStr for EntropyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MeasureRegistry::builtin().resolve(s).map(|m| m.kind())
    }
}

impl TryFrom<String> for EntropyKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EntropyKind> for String {
    fn from(k: EntropyKind) -> String {
        k.to_string()
    }
}

/// An entropy value in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub kind: EntropyKind,
    /// `q = L + (1-β)(m-L)`, recorded for Rényi.
    pub q: Option<f64>,
}

/// `q = L + (1 − β)(m − L)`.
pub fn renyi_q(m: usize, looks: f64, beta: f64) -> f64 {
    looks + (1.0 - beta) * (m as f64 - looks)
}

fn near_one(beta: f64) -> bool {
    (beta - 1.0).abs() < BETA_ONE_TOLERANCE
}

/// Shannon entropy
/// `m(m-1)/2 ln π − m² ln L + m ln|Σ| + mL + (m−L) ψ_m(L) + Σ_k ln|Γ(L−k)|`.
pub fn shannon_entropy(p: &impl AsModel) -> Result<EntropyValue> {
    let s = p.model();
    let m = s.m as f64;
    let l = s.looks;
    let mut gammas = 0.0;
    for k in 0..s.m {
        gammas += ln_abs_gamma(l - k as f64)?;
    }
    let value = m * (m - 1.0) / 2.0 * PI.ln() - m * m * l.ln()
        + m * s.log_det_sigma
        + m * l
        + (m - l) * multivariate_polygamma(PolygammaOrder::Digamma, s.m, l)?
        + gammas;
    Ok(EntropyValue {
        value,
        kind: EntropyKind::Shannon,
        q: None,
    })
}

/// `ln μ̃_β = ln Γ_m(q) − β ln Γ_m(L) − m q ln β + (1−β) m ln|Σ| − m²(1−β) ln L`.
pub fn ln_mu_tilde(p: &impl AsModel, beta: f64) -> Result<f64> {
    check_order(beta)?;
    let s = p.model();
    let m = s.m as f64;
    let l = s.looks;
    let q = renyi_q(s.m, l, beta);
    Ok(ln_multivariate_gamma(s.m, q)? - beta * ln_multivariate_gamma(s.m, l)? - m * q * beta.ln()
        + (1.0 - beta) * m * s.log_det_sigma
        - m * m * (1.0 - beta) * l.ln())
}

/// `μ̃_β = E{f^{β−1}(Z)}`.
pub fn mu_tilde(p: &impl AsModel, beta: f64) -> Result<f64> {
    let ln = ln_mu_tilde(p, beta)?;
    if ln > LN_MAX_F64 {
        return Err(Error::Overflow(ln));
    }
    Ok(ln.exp())
}

/// Restricted Tsallis entropy `(μ̃_β − 1)/(1 − β)`.
pub fn tsallis_entropy(p: &impl AsModel, beta: f64) -> Result<EntropyValue> {
    check_order(beta)?;
    let kind = EntropyKind::Tsallis(beta);
    if near_one(beta) {
        let v = shannon_entropy(p)?.value;
        return Ok(EntropyValue { value: v, kind, q: None });
    }
    let ln = ln_mu_tilde(p, beta)?;
    if ln > LN_MAX_F64 {
        return Err(Error::Overflow(ln));
    }
    Ok(EntropyValue {
        value: ln.exp_m1() / (1.0 - beta),
        kind,
        q: None,
    })
}

/// Rényi entropy of order `β`:
/// `m(m−1)/2 ln π − m² ln L + m ln|Σ| − m q ln β/(1−β)
///  + Σ_i [ln|Γ(q−i)| − β ln|Γ(L−i)|]/(1−β)`.
pub fn renyi_entropy(p: &impl AsModel, beta: f64) -> Result<EntropyValue> {
    check_order(beta)?;
    let s = p.model();
    let kind = EntropyKind::Renyi(beta);
    let q = renyi_q(s.m, s.looks, beta);
    if near_one(beta) {
        let v = shannon_entropy(&s)?.value;
        return Ok(EntropyValue { value: v, kind, q: Some(q) });
    }
    let m = s.m as f64;
    let l = s.looks;
    let mut gammas = 0.0;
    for i in 0..s.m {
        gammas += ln_abs_gamma(q - i as f64)? - beta * ln_abs_gamma(l - i as f64)?;
    }
    let value = m * (m - 1.0) / 2.0 * PI.ln() - m * m * l.ln() + m * s.log_det_sigma
        - m * q * beta.ln() / (1.0 - beta)
        + gammas / (1.0 - beta);
    Ok(EntropyValue {
        value,
        kind,
        q: Some(q),
    })
}

/// Dispatch on [`EntropyKind`] through its measure strategy.
pub fn entropy(kind: EntropyKind, p: &impl AsModel) -> Result<EntropyValue> {
    kind.measure().evaluate(&p.model())
}
