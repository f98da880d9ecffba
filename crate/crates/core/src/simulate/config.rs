//! TOML configuration for simulation campaigns.
//!
//! ```toml
//! mode = "power"            # or "size"
//! replicas = 5500
//! sample_sizes = [9, 49, 81, 121, 400]
//! levels = [0.01, 0.05, 0.10]
//! master_seed = 7
//! kinds = ["shannon", "renyi:0.8", "renyi:0.1"]
//! sampler = "auto"
//! threads = 8
//!
//! [population]
//! preset = "sigma_u"        # or diag = [...] with optional upper = [[re, im], ...]
//! looks = 3.2
//!
//! [alternative]             # power mode only
//! preset = "sigma_u"
//! scale = 1.2
//! looks = 3.2
//! ```
//!
//! Omitted campaign fields take the defaults of [`MCConfig`].

use super::harness::{ExperimentMode, MCConfig};
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::io::fixtures::sigma_u;
use crate::matrix::HermitianMatrix;
use crate::wishart::WishartParams;
use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub preset: Option<String>,
    pub diag: Option<Vec<f64>>,
    #[serde(default)]
    pub upper: Vec<[f64; 2]>,
    pub looks: f64,
    /// Multiplies the covariance.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl PopulationConfig {
    pub fn params(&self) -> Result<WishartParams> {
        let sigma = match (&self.preset, &self.diag) {
            (Some(name), None) => preset(name)?,
            (None, Some(diag)) => {
                let upper: Vec<Complex64> = self.upper.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                HermitianMatrix::from_upper(diag, &upper)?
            }
            _ => return Err(Error::Config("population needs exactly one of preset or diag".into())),
        };
        WishartParams::new(sigma.scaled(self.scale)?, self.looks)
    }
}

/// Named covariance presets.
pub fn preset(name: &str) -> Result<HermitianMatrix> {
    match name.to_ascii_lowercase().as_str() {
        "sigma_u" => Ok(sigma_u()),
        other => Err(Error::Config(format!("unknown covariance preset '{other}' (available: sigma_u)"))),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub mode: ExperimentMode,
    pub replicas: Option<usize>,
    pub sample_sizes: Option<Vec<usize>>,
    pub levels: Option<Vec<f64>>,
    pub master_seed: Option<u64>,
    pub kinds: Option<Vec<EntropyKind>>,
    pub sampler: Option<String>,
    pub threads: Option<usize>,
    pub population: PopulationConfig,
    pub alternative: Option<PopulationConfig>,
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn mc_config(&self) -> MCConfig {
        let d = MCConfig::default();
        MCConfig {
            replicas: self.replicas.unwrap_or(d.replicas),
            sample_sizes: self.sample_sizes.clone().unwrap_or(d.sample_sizes),
            levels: self.levels.clone().unwrap_or(d.levels),
            master_seed: self.master_seed.unwrap_or(d.master_seed),
            kinds: self.kinds.clone().unwrap_or(d.kinds),
            sampler: self.sampler.clone().unwrap_or(d.sampler),
            threads: self.threads,
        }
    }

    /// The null population and, in power mode, the alternative.
    pub fn populations(&self) -> Result<(WishartParams, WishartParams)> {
        let p1 = self.population.params()?;
        let p2 = match (self.mode, &self.alternative) {
            (ExperimentMode::Size, None) => p1.clone(),
            (ExperimentMode::Size, Some(_)) => {
                return Err(Error::Config("size mode takes no [alternative] population".into()))
            }
            (ExperimentMode::Power, Some(alt)) => alt.params()?,
            (ExperimentMode::Power, None) => {
                return Err(Error::Config("power mode needs an [alternative] population".into()))
            }
        };
        Ok((p1, p2))
    }
}
