//! Scaled complex Wishart law `W_m(Σ, L)`: parameters, samples, density and
//! moment identities.

use crate::error::{Error, Result};
use crate::matrix::{Cholesky, HermitianMatrix};
use crate::special::{ln_multivariate_gamma, multivariate_polygamma, PolygammaOrder};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Whether `L >= m` (the classical derivation) or `L < m` ("relaxed"; the
/// formulas are evaluated meromorphically and normalization is not claimed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Classical,
    Relaxed,
}

/// Rejects looks values where some `L - i` lands on a gamma pole.
pub(crate) fn check_looks(m: usize, looks: f64) -> Result<()> {
    if !(looks > 0.0 && looks.is_finite()) {
        return Err(Error::InvalidParameter(format!("looks must be positive and finite, got {looks}")));
    }
    for i in 0..m {
        let x = looks - i as f64;
        if x <= 0.0 && x == x.floor() {
            return Err(Error::Pole(x));
        }
    }
    Ok(())
}

/// `(Σ, L)` with cached factorization and the scalars every formula needs.
#[derive(Debug, Clone)]
pub struct WishartParams {
    sigma: HermitianMatrix,
    looks: f64,
    chol: Cholesky,
    log_det: f64,
    ln_mv_gamma: f64,
}

impl WishartParams {
    pub fn new(sigma: HermitianMatrix, looks: f64) -> Result<Self> {
        let m = sigma.dim();
        check_looks(m, looks)?;
        let chol = sigma.cholesky()?;
        let log_det = chol.log_det();
        let ln_mv_gamma = ln_multivariate_gamma(m, looks)?;
        Ok(WishartParams {
            sigma,
            looks,
            chol,
            log_det,
            ln_mv_gamma,
        })
    }

    pub fn sigma(&self) -> &HermitianMatrix {
        &self.sigma
    }

    pub fn looks(&self) -> f64 {
        self.looks
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn log_det_sigma(&self) -> f64 {
        self.log_det
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    pub fn regime(&self) -> Regime {
        if self.looks >= self.dim() as f64 {
            Regime::Classical
        } else {
            Regime::Relaxed
        }
    }

    /// Same looks, covariance replaced by `Σ / tr(Σ)`.
    pub fn with_normalized_covariance(&self) -> Result<Self> {
        WishartParams::new(normalize_covariance(&self.sigma), self.looks)
    }

    /// Same looks, covariance scaled by `c`.
    pub fn with_scaled_covariance(&self, c: f64) -> Result<Self> {
        WishartParams::new(self.sigma.scaled(c)?, self.looks)
    }

    /// `vec(Σ⁻¹)ᵗ (Σ ⊗ Σ) vec(Σ⁻¹)` with a plain transpose.
    ///
    /// Evaluated through `(A ⊗ B) vec(X) = vec(B X Aᵗ)`, which collapses the
    /// form to `Σ_ij (Σ⁻¹)_ij Σ_ji`. Always `m` up to rounding.
    pub fn sigma_quadratic_form(&self) -> f64 {
        let m = self.dim();
        let inv = self.chol.inverse();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                acc += inv[i * m + j] * self.sigma.get(j, i);
            }
        }
        acc.re
    }

    /// The scalars that entropies and their variances depend on.
    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            m: self.dim(),
            looks: self.looks,
            log_det_sigma: self.log_det,
            sigma_quadratic_form: self.sigma_quadratic_form(),
        }
    }

    /// `ln f(z; Σ, L)`.
    pub fn log_density(&self, z: &HermitianMatrix) -> Result<f64> {
        let m = self.dim();
        if z.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: z.dim(),
            });
        }
        let l = self.looks;
        let ln_det_z = z.log_det()?;
        let tr = self.chol.trace_solve(z);
        Ok(m as f64 * l * l.ln() + (l - m as f64) * ln_det_z - l * self.log_det - self.ln_mv_gamma - l * tr)
    }
}

/// Free function form of [`WishartParams::log_density`].
pub fn log_density(z: &HermitianMatrix, p: &WishartParams) -> Result<f64> {
    p.log_density(z)
}

/// `E{ln|Z|} = ln|Σ| + ψ_m^{(0)}(L) − m ln L`.
pub fn expected_log_det(p: &WishartParams) -> Result<f64> {
    let m = p.dim();
    let l = p.looks();
    Ok(p.log_det_sigma() + multivariate_polygamma(PolygammaOrder::Digamma, m, l)? - m as f64 * l.ln())
}

/// `Σ / tr(Σ)`.
pub fn normalize_covariance(a: &HermitianMatrix) -> HermitianMatrix {
    a.normalized()
}

/// The covariance enters entropies and their asymptotic variances only
/// through `ln|Σ|` and the Kronecker quadratic form, so a handful of scalars
/// fully determines them. Fixture inputs (published `N`, `|Σ̂|`, `L̂`) are
/// expressed directly in this form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub m: usize,
    pub looks: f64,
    pub log_det_sigma: f64,
    pub sigma_quadratic_form: f64,
}

impl ModelSummary {
    /// From scalars alone; the quadratic form takes its identity value `m`.
    pub fn from_scalars(m: usize, looks: f64, log_det_sigma: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("dimension m must be positive".into()));
        }
        check_looks(m, looks)?;
        if !log_det_sigma.is_finite() {
            return Err(Error::InvalidParameter("ln|Σ| must be finite".into()));
        }
        Ok(ModelSummary {
            m,
            looks,
            log_det_sigma,
            sigma_quadratic_form: m as f64,
        })
    }

    pub fn regime(&self) -> Regime {
        if self.looks >= self.m as f64 {
            Regime::Classical
        } else {
            Regime::Relaxed
        }
    }
}

/// Anything entropy formulas can be evaluated on.
pub trait AsModel {
    fn model(&self) -> ModelSummary;
}

impl AsModel for ModelSummary {
    fn model(&self) -> ModelSummary {
        *self
    }
}

impl AsModel for WishartParams {
    fn model(&self) -> ModelSummary {
        self.summary()
    }
}

/// An ordered, non-empty collection of equal-dimension covariance matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    m: usize,
    items: Vec<HermitianMatrix>,
}

impl SampleSet {
    pub fn new(items: Vec<HermitianMatrix>) -> Result<Self> {
        let first = items.first().ok_or(Error::EmptySelection)?;
        let m = first.dim();
        if let Some(bad) = items.iter().find(|z| z.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.dim(),
            });
        }
        Ok(SampleSet { m, items })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[HermitianMatrix] {
        &self.items
    }

    pub fn into_items(self) -> Vec<HermitianMatrix> {
        self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HermitianMatrix> {
        self.items.iter()
    }

    /// Sample mean, symmetrized; must be positive definite.
    pub fn mean(&self) -> Result<HermitianMatrix> {
        let m = self.m;
        let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
        for z in &self.items {
            for (a, v) in acc.iter_mut().zip(z.as_slice()) {
                *a += v;
            }
        }
        let n = self.items.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        HermitianMatrix::from_hermitian_product(m, &acc)
    }

    /// Total log-likelihood `Σ_k ln f(Z_k; p)`.
    pub fn log_likelihood(&self, p: &WishartParams) -> Result<f64> {
        self.items.iter().map(|z| p.log_density(z)).sum()
    }
}

impl<'a> IntoIterator for &'a SampleSet {
    type Item = &'a HermitianMatrix;
    type IntoIter = std::slice::Iter<'a, HermitianMatrix>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
