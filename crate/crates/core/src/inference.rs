//! Maximum-likelihood estimation of `(Σ, L)`, Fisher information and
//! Cramér–Rao blocks, entropy gradients, asymptotic entropy variances and AIC.
//!
//! Under the scaled law `L` and `Σ` are orthogonal: the Fisher information is
//! block diagonal, `Σ̂` is the sample mean, and `L̂` solves a scalar equation
//!
//! ```text
//! g(L) = m ln L + (1/N) Σ_k ln|Z_k| − ln|Z̄| − ψ_m(L) = 0.
//! ```
//!
//! `g` has poles at `L = 0, 1, …, m−1`. On the classical branch `(m−1, ∞)`
//! it decreases strictly from `+∞` to `(1/N)Σ ln|Z_k| − ln|Z̄| ≤ 0`, so a root
//! exists there unless the sample has (numerically) no variability. Each
//! lower branch `(k, k+1)` also carries a root.

use crate::entropy::{renyi_q, EntropyKind, BETA_ONE_TOLERANCE};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::roots::{safeguarded_newton, NewtonOptions};
use crate::special::{multivariate_polygamma, PolygammaOrder};
use crate::wishart::{AsModel, ModelSummary, SampleSet, WishartParams};
use num_complex::Complex64;

/// Upper end of the classical branch search. A sample whose likelihood
/// equation has no root below this is treated as degenerate.
pub const LOOKS_UPPER_BOUND: f64 = 1e4;

/// Distance kept from the poles of `g`.
pub const POLE_MARGIN: f64 = 1e-6;

/// A maximum-likelihood fit.
#[derive(Debug, Clone)]
pub struct MLFit {
    pub params: WishartParams,
    /// `g(L̂)`.
    pub residual: f64,
    pub iterations: usize,
    /// `k` such that `L̂ ∈ (k, k+1)`; the classical branch is `m − 1`
    /// (and extends to infinity).
    pub branch: usize,
    pub log_likelihood: f64,
    pub n: usize,
}

/// The pieces of the likelihood equation that depend on the data.
#[derive(Debug, Clone, Copy)]
struct LooksEquation {
    m: usize,
    /// `(1/N) Σ ln|Z_k| − ln|Z̄|`, never positive in exact arithmetic.
    data_term: f64,
}

impl LooksEquation {
    fn value(&self, l: f64) -> Result<f64> {
        Ok(self.m as f64 * l.ln() + self.data_term - multivariate_polygamma(PolygammaOrder::Digamma, self.m, l)?)
    }

    fn value_and_slope(&self, l: f64) -> Result<(f64, f64)> {
        let g = self.value(l)?;
        let dg = self.m as f64 / l - multivariate_polygamma(PolygammaOrder::Trigamma, self.m, l)?;
        Ok((g, dg))
    }

    fn solve_branch(&self, branch: usize) -> Result<(f64, f64, usize)> {
        let opts = NewtonOptions::default();
        let f = |l: f64| self.value_and_slope(l);
        let root = if branch + 1 >= self.m {
            let lo = (self.m - 1) as f64 + POLE_MARGIN;
            if self.value(LOOKS_UPPER_BOUND)? >= 0.0 {
                return Err(Error::DegenerateSample {
                    upper: LOOKS_UPPER_BOUND,
                });
            }
            safeguarded_newton(f, lo, LOOKS_UPPER_BOUND, self.m as f64 + 1.0, opts)?
        } else {
            let lo = branch as f64 + POLE_MARGIN;
            let hi = (branch + 1) as f64 - POLE_MARGIN;
            safeguarded_newton(f, lo, hi, 0.5 * (lo + hi), opts)?
        };
        Ok((root.x, root.residual, root.iterations))
    }
}

fn looks_equation(sample: &SampleSet, sigma_hat: &crate::HermitianMatrix) -> Result<LooksEquation> {
    let mut mean_log_det = 0.0;
    for z in sample {
        mean_log_det += z.log_det()?;
    }
    mean_log_det /= sample.len() as f64;
    Ok(LooksEquation {
        m: sample.dim(),
        data_term: mean_log_det - sigma_hat.log_det()?,
    })
}

fn finish_fit(sample: &SampleSet, sigma_hat: crate::HermitianMatrix, solved: (f64, f64, usize)) -> Result<MLFit> {
    let (looks, residual, iterations) = solved;
    let m = sample.dim();
    let params = WishartParams::new(sigma_hat, looks)?;
    let log_likelihood = sample.log_likelihood(&params)?;
    let branch = (looks.floor() as usize).min(m - 1);
    Ok(MLFit {
        params,
        residual,
        iterations,
        branch,
        log_likelihood,
        n: sample.len(),
    })
}

fn check_sample(sample: &SampleSet) -> Result<()> {
    if sample.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "maximum-likelihood fit needs N >= 2, got {}",
            sample.len()
        )));
    }
    Ok(())
}

/// ML fit. `Σ̂` is the sample mean; `L̂` is searched on the classical
/// branch `(m−1, 10⁴)` first, then on `(k, k+1)` for `k = m−2, …, 0`.
pub fn estimate(sample: &SampleSet) -> Result<MLFit> {
    check_sample(sample)?;
    let sigma_hat = sample.mean()?;
    let eq = looks_equation(sample, &sigma_hat)?;
    let m = sample.dim();
    let mut last_err = Error::NoRoot;
    for branch in (0..m).rev() {
        match eq.solve_branch(branch) {
            Ok(solved) => return finish_fit(sample, sigma_hat, solved),
            Err(e @ Error::DegenerateSample { .. }) => return Err(e),
            Err(e) => last_err = e,
        }
    }
    match last_err {
        Error::NoRoot => Err(Error::NoRoot),
        e => Err(e),
    }
}

/// ML fit with `L̂` taken from a specific branch `(branch, branch+1)`;
/// `branch = m − 1` is the classical branch. Lower branches give the
/// relaxed-regime roots (`L̂ < m − 1`).
pub fn estimate_on_branch(sample: &SampleSet, branch: usize) -> Result<MLFit> {
    check_sample(sample)?;
    if branch >= sample.dim() {
        return Err(Error::InvalidParameter(format!(
            "branch {branch} out of range for m = {}",
            sample.dim()
        )));
    }
    let sigma_hat = sample.mean()?;
    let eq = looks_equation(sample, &sigma_hat)?;
    let solved = eq.solve_branch(branch)?;
    finish_fit(sample, sigma_hat, solved)
}

/// `g(L)` for a sample; zero at `L̂`.
pub fn score_residual(sample: &SampleSet, looks: f64) -> Result<f64> {
    let sigma_hat = sample.mean()?;
    looks_equation(sample, &sigma_hat)?.value(looks)
}

/// `ψ_m^{(1)}(L) − m/L`, the looks entry of the Fisher information.
pub fn looks_information(m: usize, looks: f64) -> Result<f64> {
    let k = multivariate_polygamma(PolygammaOrder::Trigamma, m, looks)? - m as f64 / looks;
    if !(k > 0.0) {
        return Err(Error::Domain {
            function: "looks information (not invertible)",
            value: looks,
        });
    }
    Ok(k)
}

fn sigma_inverse(p: &WishartParams) -> ComplexMatrix {
    ComplexMatrix::from_square(p.dim(), p.cholesky().inverse())
}

/// Fisher information `K(θ)`, block diagonal in `(L, vec Σ)`.
#[derive(Debug, Clone)]
pub struct FisherBlocks {
    /// `ψ_m^{(1)}(L) − m/L`.
    pub looks: f64,
    /// `L (Σ⁻¹ ⊗ Σ⁻¹)`, m² × m².
    pub sigma: ComplexMatrix,
}

/// Cramér–Rao bound `C(θ) = K(θ)⁻¹`, block diagonal.
#[derive(Debug, Clone)]
pub struct CramerRaoBlocks {
    /// `[ψ_m^{(1)}(L) − m/L]⁻¹`.
    pub looks: f64,
    /// `L⁻¹ (Σ ⊗ Σ)`.
    pub sigma: ComplexMatrix,
}

fn block_diagonal(looks: f64, sigma: &ComplexMatrix) -> ComplexMatrix {
    let n = sigma.rows + 1;
    let mut out = ComplexMatrix::zeros(n, n);
    out.set(0, 0, Complex64::new(looks, 0.0));
    for i in 0..sigma.rows {
        for j in 0..sigma.cols {
            out.set(i + 1, j + 1, sigma.get(i, j));
        }
    }
    out
}

impl FisherBlocks {
    /// The full (m²+1)-square matrix with zero cross blocks.
    pub fn to_dense(&self) -> ComplexMatrix {
        block_diagonal(self.looks, &self.sigma)
    }
}

impl CramerRaoBlocks {
    pub fn to_dense(&self) -> ComplexMatrix {
        block_diagonal(self.looks, &self.sigma)
    }
}

pub fn fisher_information(p: &WishartParams) -> Result<FisherBlocks> {
    let inv = sigma_inverse(p);
    Ok(FisherBlocks {
        looks: looks_information(p.dim(), p.looks())?,
        sigma: inv.kron(&inv).scale(p.looks()),
    })
}

pub fn cramer_rao(p: &WishartParams) -> Result<CramerRaoBlocks> {
    let s = ComplexMatrix::from(p.sigma());
    Ok(CramerRaoBlocks {
        looks: 1.0 / looks_information(p.dim(), p.looks())?,
        sigma: s.kron(&s).scale(1.0 / p.looks()),
    })
}

/// `∂H/∂L` for Shannon or Rényi.
pub fn entropy_looks_derivative(kind: EntropyKind, model: &ModelSummary) -> Result<f64> {
    let m = model.m as f64;
    let l = model.looks;
    let shannon = || -> Result<f64> {
        Ok((m - l) * multivariate_polygamma(PolygammaOrder::Trigamma, model.m, l)? + m - m * m / l)
    };
    match kind {
        EntropyKind::Shannon => shannon(),
        EntropyKind::Renyi(beta) if (beta - 1.0).abs() < BETA_ONE_TOLERANCE => shannon(),
        EntropyKind::Renyi(beta) => {
            let q = renyi_q(model.m, l, beta);
            let dpsi = multivariate_polygamma(PolygammaOrder::Digamma, model.m, q)?
                - multivariate_polygamma(PolygammaOrder::Digamma, model.m, l)?;
            Ok(beta / (1.0 - beta) * dpsi - m * beta * beta.ln() / (1.0 - beta) - m * m / l)
        }
        EntropyKind::Tsallis(_) => Err(tsallis_unsupported()),
    }
}

fn tsallis_unsupported() -> Error {
    Error::Unsupported("Tsallis entropy has no tractable asymptotic variance".into())
}

fn variance_from_looks_derivative(d_looks: f64, model: &ModelSummary) -> Result<f64> {
    let m = model.m as f64;
    let k = looks_information(model.m, model.looks)?;
    Ok(d_looks * d_looks / k + m * m / model.looks * model.sigma_quadratic_form)
}

/// `σ²_S`.
pub fn shannon_variance(model: &ModelSummary) -> Result<f64> {
    variance_from_looks_derivative(entropy_looks_derivative(EntropyKind::Shannon, model)?, model)
}

/// `σ²_{R,β}`.
pub fn renyi_variance(model: &ModelSummary, beta: f64) -> Result<f64> {
    crate::entropy::check_order(beta)?;
    variance_from_looks_derivative(entropy_looks_derivative(EntropyKind::Renyi(beta), model)?, model)
}

/// `σ²_H = δᵗ C δ` for Shannon and Rényi; Tsallis is rejected.
pub fn entropy_variance(kind: EntropyKind, p: &impl AsModel) -> Result<f64> {
    let model = p.model();
    match kind {
        EntropyKind::Shannon => shannon_variance(&model),
        EntropyKind::Renyi(beta) => renyi_variance(&model, beta),
        EntropyKind::Tsallis(_) => Err(tsallis_unsupported()),
    }
}

/// `δ = [∂H/∂L, vec(∂H/∂Σ)ᵗ]ᵗ`, with `∂H/∂Σ = m Σ⁻¹` for both families.
#[derive(Debug, Clone)]
pub struct EntropyGradient {
    pub looks: f64,
    pub sigma: Vec<Complex64>,
}

pub fn entropy_gradient(kind: EntropyKind, p: &WishartParams) -> Result<EntropyGradient> {
    let looks = entropy_looks_derivative(kind, &p.summary())?;
    let m = p.dim() as f64;
    let sigma = sigma_inverse(p).vec().into_iter().map(|z| z * m).collect();
    Ok(EntropyGradient { looks, sigma })
}

/// `δᵗ C δ` evaluated literally (plain transpose, explicit Kronecker block).
pub fn delta_method_variance(grad: &EntropyGradient, crb: &CramerRaoBlocks) -> f64 {
    let cd = crb.sigma.matvec(&grad.sigma);
    let quad: Complex64 = grad.sigma.iter().zip(&cd).map(|(a, b)| a * b).sum();
    grad.looks * grad.looks * crb.looks + quad.re
}

/// Free real parameters: `m²` for a Hermitian `Σ`, plus one when `L` is fitted.
pub fn parameter_count(m: usize, looks_fixed: bool) -> usize {
    m * m + usize::from(!looks_fixed)
}

/// `−2 ℓ + 2 k`.
pub fn aic_from_log_likelihood(log_likelihood: f64, m: usize, looks_fixed: bool) -> f64 {
    -2.0 * log_likelihood + 2.0 * parameter_count(m, looks_fixed) as f64
}

pub fn aic(sample: &SampleSet, p: &WishartParams, looks_fixed: bool) -> Result<f64> {
    if sample.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: sample.dim(),
        });
    }
    Ok(aic_from_log_likelihood(sample.log_likelihood(p)?, p.dim(), looks_fixed))
}
