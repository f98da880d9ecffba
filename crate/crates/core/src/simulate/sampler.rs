//! Draws from `W_m(Σ, L)`.
//!
//! Two constructions are provided. Both start from the Cholesky factor
//! `Σ = C C^H`.
//!
//! * `multilook` (integer `L ≥ m`): `Z = (1/L) Σ_i y_i y_i^H` with
//!   `y_i = C g_i` and `g_i` standard circular complex Gaussian.
//! * `bartlett` (any `L > m − 1`): `Z = (1/L) (C T)(C T)^H` with `T` lower
//!   triangular, `|T_kk|² ~ Gamma(L − k, 1)` and standard circular complex
//!   Gaussian entries below the diagonal.
//!
//! `auto` uses the multilook construction when `L` is an integer and
//! `bartlett` otherwise.

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::wishart::{SampleSet, WishartParams};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// Independent random stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal(rng: &mut dyn RngCore) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// A random Hermitian positive-definite matrix, well conditioned enough for
/// tests: `A A^H / m + I/10` with Gaussian `A`, times a random scale.
pub fn random_covariance(m: usize, rng: &mut dyn RngCore) -> HermitianMatrix {
    let a: Vec<Complex64> = (0..m * m).map(|_| complex_normal(rng)).collect();
    let scale = 10f64.powf(rng.next_u32() as f64 / u32::MAX as f64 * 4.0 - 2.0);
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            let s: Complex64 = (0..m).map(|k| a[i * m + k] * a[j * m + k].conj()).sum();
            out[i * m + j] = s / m as f64 * scale;
        }
        out[i * m + i] += 0.1 * scale;
    }
    HermitianMatrix::from_hermitian_product(m, &out).expect("diagonally loaded Gram matrix")
}

/// A strategy drawing one matrix at a time.
pub trait WishartSampler: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Fails if the construction is invalid for these parameters.
    fn check(&self, p: &WishartParams) -> Result<()>;

    fn draw(&self, p: &WishartParams, rng: &mut dyn RngCore) -> Result<HermitianMatrix>;
}

fn lower_product(m: usize, a: &[Complex64], looks: f64) -> Result<HermitianMatrix> {
    // (A A^H)/L for lower-triangular A
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..=i {
            let s: Complex64 = (0..=j).map(|k| a[i * m + k] * a[j * m + k].conj()).sum();
            out[i * m + j] = s / looks;
            out[j * m + i] = (s / looks).conj();
        }
    }
    HermitianMatrix::from_hermitian_product(m, &out)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BartlettSampler;

impl WishartSampler for BartlettSampler {
    fn name(&self) -> &'static str {
        "bartlett"
    }

    fn check(&self, p: &WishartParams) -> Result<()> {
        if p.looks() <= (p.dim() - 1) as f64 {
            return Err(Error::InvalidParameter(format!(
                "bartlett sampler needs L > m - 1 = {}, got {}",
                p.dim() - 1,
                p.looks()
            )));
        }
        Ok(())
    }

    fn draw(&self, p: &WishartParams, rng: &mut dyn RngCore) -> Result<HermitianMatrix> {
        let m = p.dim();
        let c = p.cholesky().factor();
        let mut t = vec![Complex64::new(0.0, 0.0); m * m];
        for k in 0..m {
            let gamma = Gamma::new(p.looks() - k as f64, 1.0)
                .map_err(|e| Error::InvalidParameter(format!("gamma shape {}: {e}", p.looks() - k as f64)))?;
            t[k * m + k] = Complex64::new(gamma.sample(rng).sqrt(), 0.0);
            for j in 0..k {
                t[k * m + j] = complex_normal(rng);
            }
        }
        // C T stays lower triangular
        let mut ct = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..=i {
                ct[i * m + j] = (j..=i).map(|k| c[i * m + k] * t[k * m + j]).sum();
            }
        }
        lower_product(m, &ct, p.looks())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MultilookSampler;

impl WishartSampler for MultilookSampler {
    fn name(&self) -> &'static str {
        "multilook"
    }

    fn check(&self, p: &WishartParams) -> Result<()> {
        let l = p.looks();
        if l.fract() != 0.0 || l < p.dim() as f64 {
            return Err(Error::InvalidParameter(format!(
                "multilook sampler needs an integer L >= m = {}, got {l}",
                p.dim()
            )));
        }
        Ok(())
    }

    fn draw(&self, p: &WishartParams, rng: &mut dyn RngCore) -> Result<HermitianMatrix> {
        let m = p.dim();
        let c = p.cholesky().factor();
        let looks = p.looks() as usize;
        let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
        let mut g = vec![Complex64::new(0.0, 0.0); m];
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        for _ in 0..looks {
            g.iter_mut().for_each(|v| *v = complex_normal(rng));
            for i in 0..m {
                y[i] = (0..=i).map(|k| c[i * m + k] * g[k]).sum();
            }
            for i in 0..m {
                for j in 0..m {
                    acc[i * m + j] += y[i] * y[j].conj();
                }
            }
        }
        acc.iter_mut().for_each(|v| *v /= p.looks());
        HermitianMatrix::from_hermitian_product(m, &acc)
    }
}

/// Multilook for integer `L ≥ m`, Bartlett otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoSampler;

impl AutoSampler {
    fn pick(p: &WishartParams) -> &'static dyn WishartSampler {
        if MultilookSampler.check(p).is_ok() {
            &MultilookSampler
        } else {
            &BartlettSampler
        }
    }
}

impl WishartSampler for AutoSampler {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn check(&self, p: &WishartParams) -> Result<()> {
        Self::pick(p).check(p)
    }

    fn draw(&self, p: &WishartParams, rng: &mut dyn RngCore) -> Result<HermitianMatrix> {
        Self::pick(p).draw(p, rng)
    }
}

/// `n` independent draws with a given strategy.
pub fn sample_with(sampler: &dyn WishartSampler, p: &WishartParams, n: usize, rng: &mut dyn RngCore) -> Result<SampleSet> {
    sampler.check(p)?;
    let items = (0..n).map(|_| sampler.draw(p, rng)).collect::<Result<Vec<_>>>()?;
    SampleSet::new(items)
}

/// `n` independent draws with the `auto` strategy.
pub fn sample_wishart(p: &WishartParams, n: usize, rng: &mut dyn RngCore) -> Result<SampleSet> {
    sample_with(&AutoSampler, p, n, rng)
}

pub type SamplerFactory = fn() -> Box<dyn WishartSampler>;

/// Name → sampler strategy table.
#[derive(Clone, Default)]
pub struct SamplerRegistry {
    factories: BTreeMap<String, SamplerFactory>,
}

impl SamplerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register("auto", || Box::new(AutoSampler));
        r.register("bartlett", || Box::new(BartlettSampler));
        r.register("multilook", || Box::new(MultilookSampler));
        r
    }

    pub fn register(&mut self, name: &str, factory: SamplerFactory) {
        self.factories.insert(name.to_ascii_lowercase(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn resolve(&self, name: &str) -> Result<Box<dyn WishartSampler>> {
        let factory = self
            .factories
            .get(&name.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownStrategy {
                registry: "sampler",
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })?;
        Ok(factory())
    }
}

impl fmt::Debug for SamplerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.factories.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures::sigma_u;
    use crate::wishart::expected_log_det;

    fn mean_and_log_det(sampler: &dyn WishartSampler, p: &WishartParams, n: usize, seed: u64) -> (HermitianMatrix, f64, f64) {
        let s = sample_with(sampler, p, n, &mut stream_rng(seed, 0)).unwrap();
        let logs: Vec<f64> = s.iter().map(|z| z.log_det().unwrap()).collect();
        let mean = logs.iter().sum::<f64>() / n as f64;
        let var = logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (s.mean().unwrap(), mean, (var / n as f64).sqrt())
    }

    #[test]
    fn both_constructions_match_moments_at_integer_looks() {
        let p = WishartParams::new(sigma_u(), 4.0).unwrap();
        let truth = expected_log_det(&p).unwrap();
        for sampler in [&BartlettSampler as &dyn WishartSampler, &MultilookSampler] {
            let (mean, ld, se) = mean_and_log_det(sampler, &p, 20_000, 42);
            let rel = mean.max_abs_diff(&sigma_u()) / sigma_u().max_abs_entry();
            assert!(rel < 0.02, "{}: {rel}", sampler.name());
            assert!((ld - truth).abs() < 3.5 * se, "{}: {ld} vs {truth} (se {se})", sampler.name());
        }
    }

    #[test]
    fn scalar_gamma_moments() {
        // m = 1: L Z / σ² ~ Gamma(L, 1), so Z/σ² has mean 1, variance 1/L
        let sigma2 = 2.5;
        for l in [1.0, 3.0, 2.5] {
            let p = WishartParams::new(HermitianMatrix::diagonal(&[sigma2]).unwrap(), l).unwrap();
            let n = 40_000;
            let s = sample_wishart(&p, n, &mut stream_rng(8, l.to_bits())).unwrap();
            let x: Vec<f64> = s.iter().map(|z| z.get(0, 0).re / sigma2).collect();
            let mean = x.iter().sum::<f64>() / n as f64;
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se_mean = (1.0 / l / n as f64).sqrt();
            assert!((mean - 1.0).abs() < 3.0 * se_mean, "L={l}: mean {mean}");
            // variance of the sample variance for a gamma: (μ4 − σ⁴)/n with μ4 = 3/L² + 6/L³
            let se_var = ((3.0 / (l * l) + 6.0 / l.powi(3) - 1.0 / (l * l)) / n as f64).sqrt();
            // the sample variance of a skewed law has heavier tails than its
            // normal approximation suggests
            assert!((var - 1.0 / l).abs() < 4.0 * se_var, "L={l}: var {var}");
        }
    }

    #[test]
    fn validity_ranges() {
        let p = WishartParams::new(sigma_u(), 1.361).unwrap();
        assert!(BartlettSampler.check(&p).is_err());
        assert!(sample_wishart(&p, 3, &mut stream_rng(0, 0)).is_err());
        let p = WishartParams::new(sigma_u(), 3.2).unwrap();
        assert!(MultilookSampler.check(&p).is_err());
        assert!(BartlettSampler.check(&p).is_ok());
        let p = WishartParams::new(sigma_u(), 2.5).unwrap();
        assert!(BartlettSampler.check(&p).is_ok());
    }

    #[test]
    fn draws_are_hermitian_pd_and_reproducible() {
        let p = WishartParams::new(sigma_u(), 3.2).unwrap();
        let a = sample_wishart(&p, 500, &mut stream_rng(1, 7)).unwrap();
        let b = sample_wishart(&p, 500, &mut stream_rng(1, 7)).unwrap();
        assert_eq!(a, b);
        for z in &a {
            z.cholesky().unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(z.get(i, j), z.get(j, i).conj());
                }
            }
        }
        let c = sample_wishart(&p, 500, &mut stream_rng(1, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn registry() {
        let r = SamplerRegistry::builtin();
        assert_eq!(r.resolve("Bartlett").unwrap().name(), "bartlett");
        assert_eq!(r.names().collect::<Vec<_>>(), vec!["auto", "bartlett", "multilook"]);
        assert!(matches!(r.resolve("gibbs"), Err(Error::UnknownStrategy { .. })));
    }
}
