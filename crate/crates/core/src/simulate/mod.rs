//! Sampling from the scaled complex Wishart law and Monte Carlo
//! calibration of the entropy tests.

mod config;
mod harness;
mod report;
mod sampler;

pub use config::{preset, PopulationConfig, SimulationConfig};
pub use harness::{
    mc_power_experiment, mc_resample_experiment, mc_size_experiment, ExperimentMode, FailureCell, MCConfig, MCReport,
    RateCell, StatisticCell, MAX_FAILURE_RATE,
};
pub use report::{report_csv, report_json, write_report};
pub use sampler::{
    random_covariance, sample_wishart, sample_with, stream_rng, AutoSampler, BartlettSampler, MultilookSampler,
    SamplerFactory, SamplerRegistry, WishartSampler,
};
