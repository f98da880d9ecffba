//! Monte Carlo calibration of the entropy contrast test.
//!
//! Each replica draws two samples of size `N`, fits both by maximum
//! likelihood, and runs the two-population test for every requested entropy
//! kind. Rejection rates over replicas estimate the test size (same
//! population) or power (different populations).
//!
//! Replica `r` at the `i`-th sample size uses random stream
//! `(i << 40) | r` of the master seed, results are collected in replica
//! order and reduced sequentially, so a report is a pure function of the
//! configuration whatever the thread count.

use super::sampler::{stream_rng, SamplerRegistry, WishartSampler};
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::hypothesis::{entropy_test, EntropyEstimate};
use crate::inference::estimate;
use crate::io::SubsampleCampaign;
use crate::wishart::{SampleSet, WishartParams};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest tolerated share of failed replicas per sample size.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub replicas: usize,
    pub sample_sizes: Vec<usize>,
    pub levels: Vec<f64>,
    pub master_seed: u64,
    pub kinds: Vec<EntropyKind>,
    /// Sampler strategy name.
    pub sampler: String,
    /// Worker threads; `None` uses all cores. Does not affect results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for MCConfig {
    fn default() -> Self {
        MCConfig {
            replicas: 5500,
            sample_sizes: vec![9, 49, 81, 121, 400],
            levels: vec![0.01, 0.05, 0.10],
            master_seed: 20_140_311,
            kinds: vec![EntropyKind::Shannon, EntropyKind::Renyi(0.8), EntropyKind::Renyi(0.1)],
            sampler: "auto".into(),
            threads: None,
        }
    }
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if self.replicas >= 1 << 40 || self.sample_sizes.len() >= 1 << 24 {
            return Err(Error::Config("too many replicas or sample sizes".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(Error::Config("sample sizes must be given and at least 2".into()));
        }
        if self.levels.is_empty() || self.levels.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::Config("levels must be given and lie in (0, 1)".into()));
        }
        if self.kinds.is_empty() {
            return Err(Error::Config("at least one entropy kind is required".into()));
        }
        if let Some(k) = self.kinds.iter().find(|k| matches!(k, EntropyKind::Tsallis(_))) {
            return Err(Error::Unsupported(format!("{k} has no asymptotic variance and cannot be tested")));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    fn stream(&self, n_index: usize, replica: usize) -> ChaCha8Rng {
        stream_rng(self.master_seed, ((n_index as u64) << 40) | replica as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentMode {
    Size,
    Power,
}

/// Rejection rate for one (kind, N, α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub kind: EntropyKind,
    pub n: usize,
    pub alpha: f64,
    pub rejections: usize,
    pub valid: usize,
    /// `rejections / valid`.
    pub rate: f64,
}

/// Distribution summary of the statistic for one (kind, N).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticCell {
    pub kind: EntropyKind,
    pub n: usize,
    /// `S̄`.
    pub mean: f64,
    /// `√(Σ (S − S̄)²) / (S̄ √R)`, the dispersion of S relative to its mean.
    pub cv: f64,
    /// Empirical 95th percentile of S.
    pub q95: f64,
}

/// Replicas excluded at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCell {
    pub n: usize,
    pub failures: usize,
    /// Message of the first failure, if any.
    pub first_cause: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub mode: ExperimentMode,
    pub replicas: usize,
    pub master_seed: u64,
    pub sampler: String,
    /// Short description of the two populations.
    pub populations: [String; 2],
    pub rates: Vec<RateCell>,
    pub statistics: Vec<StatisticCell>,
    pub failures: Vec<FailureCell>,
}

impl MCReport {
    pub fn rate(&self, kind: EntropyKind, n: usize, alpha: f64) -> Option<f64> {
        self.rates
            .iter()
            .find(|c| c.kind == kind && c.n == n && (c.alpha - alpha).abs() < 1e-12)
            .map(|c| c.rate)
    }

    pub fn statistic(&self, kind: EntropyKind, n: usize) -> Option<&StatisticCell> {
        self.statistics.iter().find(|c| c.kind == kind && c.n == n)
    }
}

/// Per replica: `(statistic, p-value)` for each kind, or the failure cause.
type ReplicaResult = std::result::Result<Vec<(f64, f64)>, String>;

fn contrast(a: &SampleSet, b: &SampleSet, kinds: &[EntropyKind]) -> Result<Vec<(f64, f64)>> {
    let fa = estimate(a)?;
    let fb = estimate(b)?;
    kinds
        .iter()
        .map(|&k| {
            let t = entropy_test(&[EntropyEstimate::from_fit(k, &fa)?, EntropyEstimate::from_fit(k, &fb)?])?;
            Ok((t.statistic, t.p_value))
        })
        .collect()
}

fn run_parallel<F>(cfg: &MCConfig, job: F) -> Result<Vec<ReplicaResult>>
where
    F: Fn(usize) -> ReplicaResult + Sync,
{
    let run = || (0..cfg.replicas).into_par_iter().map(&job).collect::<Vec<_>>();
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    // nearest-rank
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Accumulates replica outcomes into report cells, sequentially.
struct Reducer<'a> {
    cfg: &'a MCConfig,
    rates: Vec<RateCell>,
    statistics: Vec<StatisticCell>,
    failures: Vec<FailureCell>,
}

impl<'a> Reducer<'a> {
    fn new(cfg: &'a MCConfig) -> Self {
        Reducer {
            cfg,
            rates: Vec::new(),
            statistics: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn add(&mut self, n: usize, results: Vec<ReplicaResult>) -> Result<()> {
        let cfg = self.cfg;
        let mut first_cause = None;
        let mut ok = Vec::with_capacity(results.len());
        for r in results {
            match r {
                Ok(v) => ok.push(v),
                Err(cause) => {
                    first_cause.get_or_insert(cause);
                }
            }
        }
        let failures = cfg.replicas - ok.len();
        if failures as f64 > MAX_FAILURE_RATE * cfg.replicas as f64 {
            return Err(Error::TooManyFailures {
                n,
                failures,
                replicas: cfg.replicas,
                cause: first_cause.unwrap_or_default(),
            });
        }
        self.failures.push(FailureCell { n, failures, first_cause });
        let valid = ok.len();
        for (k, &kind) in cfg.kinds.iter().enumerate() {
            for &alpha in &cfg.levels {
                let rejections = ok.iter().filter(|v| v[k].1 <= alpha).count();
                self.rates.push(RateCell {
                    kind,
                    n,
                    alpha,
                    rejections,
                    valid,
                    rate: if valid > 0 { rejections as f64 / valid as f64 } else { f64::NAN },
                });
            }
            let stats: Vec<f64> = ok.iter().map(|v| v[k].0).collect();
            let mean = stats.iter().sum::<f64>() / valid as f64;
            let ss: f64 = stats.iter().map(|s| (s - mean).powi(2)).sum();
            let mut sorted = stats.clone();
            sorted.sort_by(f64::total_cmp);
            self.statistics.push(StatisticCell {
                kind,
                n,
                mean,
                cv: ss.sqrt() / (mean * (valid as f64).sqrt()),
                q95: percentile(&sorted, 0.95),
            });
        }
        Ok(())
    }

    fn finish(self, mode: ExperimentMode, populations: [String; 2]) -> MCReport {
        MCReport {
            mode,
            replicas: self.cfg.replicas,
            master_seed: self.cfg.master_seed,
            sampler: self.cfg.sampler.clone(),
            populations,
            rates: self.rates,
            statistics: self.statistics,
            failures: self.failures,
        }
    }
}

fn describe(p: &WishartParams) -> String {
    format!("m={} L={} ln|Σ|={:.6}", p.dim(), p.looks(), p.log_det_sigma())
}

fn synthetic(p1: &WishartParams, p2: &WishartParams, cfg: &MCConfig, mode: ExperimentMode) -> Result<MCReport> {
    cfg.validate()?;
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch {
            expected: p1.dim(),
            found: p2.dim(),
        });
    }
    let sampler: Box<dyn WishartSampler> = SamplerRegistry::builtin().resolve(&cfg.sampler)?;
    sampler.check(p1)?;
    sampler.check(p2)?;
    let mut reducer = Reducer::new(cfg);
    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        let results = run_parallel(cfg, |r| {
            let mut rng = cfg.stream(ni, r);
            let draw = |p: &WishartParams, rng: &mut ChaCha8Rng| -> Result<SampleSet> {
                let items = (0..n).map(|_| sampler.draw(p, rng)).collect::<Result<Vec<_>>>()?;
                SampleSet::new(items)
            };
            (|| {
                let a = draw(p1, &mut rng)?;
                let b = draw(p2, &mut rng)?;
                contrast(&a, &b, &cfg.kinds)
            })()
            .map_err(|e| e.to_string())
        })?;
        reducer.add(n, results)?;
    }
    Ok(reducer.finish(mode, [describe(p1), describe(p2)]))
}

/// Empirical size: both samples from `p`.
pub fn mc_size_experiment(p: &WishartParams, cfg: &MCConfig) -> Result<MCReport> {
    synthetic(p, p, cfg, ExperimentMode::Size)
}

/// Empirical power: samples from `p1` and `p2`. With `p1 == p2` the rates
/// equal those of [`mc_size_experiment`] for the same seed.
pub fn mc_power_experiment(p1: &WishartParams, p2: &WishartParams, cfg: &MCConfig) -> Result<MCReport> {
    synthetic(p1, p2, cfg, ExperimentMode::Power)
}

/// Resampling from observed regions: each replica subsamples `N` pixels
/// without replacement from each region. Within a region no two replicas
/// of the same sample size use the same pixel set.
///
/// `mode` labels the report: `Size` when both regions are believed to come
/// from one population, `Power` otherwise.
pub fn mc_resample_experiment(
    a: &SampleSet,
    b: &SampleSet,
    cfg: &MCConfig,
    mode: ExperimentMode,
) -> Result<MCReport> {
    cfg.validate()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut reducer = Reducer::new(cfg);
    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        // subsets are planned sequentially so that duplicate rejection is
        // deterministic, then fitted in parallel
        let mut ca = SubsampleCampaign::new(a.len(), n)?;
        let mut cb = SubsampleCampaign::new(b.len(), n)?;
        let mut plan = Vec::with_capacity(cfg.replicas);
        for r in 0..cfg.replicas {
            let mut rng = cfg.stream(ni, r);
            plan.push((ca.next_indices(&mut rng)?, cb.next_indices(&mut rng)?));
        }
        let pick = |s: &SampleSet, idx: &[usize]| SampleSet::new(idx.iter().map(|&i| s.items()[i].clone()).collect());
        let results = run_parallel(cfg, |r| {
            let (ia, ib) = &plan[r];
            (|| contrast(&pick(a, ia)?, &pick(b, ib)?, &cfg.kinds))().map_err(|e| e.to_string())
        })?;
        reducer.add(n, results)?;
    }
    let label = |s: &SampleSet| format!("region m={} N={}", s.dim(), s.len());
    Ok(reducer.finish(mode, [label(a), label(b)]))
}
