//! Entropy-based inference for multilook polarimetric SAR covariance data.
//!
//! Pixels of a multilook PolSAR image are m×m Hermitian positive-definite
//! matrices, modeled here by the scaled complex Wishart law `W_m(Σ, L)`.
//! The crate provides
//!
//! * closed-form Shannon, Rényi and restricted Tsallis entropies
//!   ([`entropy`]),
//! * maximum-likelihood estimation of `(Σ, L)` with Fisher information,
//!   Cramér–Rao blocks and asymptotic entropy variances ([`inference`]),
//! * entropy contrast tests, goodness of fit and confidence intervals
//!   ([`hypothesis`]),
//! * samplers and a Monte Carlo harness for test size and power
//!   ([`simulate`]),
//! * a binary covariance-stack format, masks and region extraction
//!   ([`io`]).
//!
//! ```
//! use polsar_entropy::{io::fixtures::sigma_u, shannon_entropy, WishartParams};
//!
//! let p = WishartParams::new(sigma_u(), 4.0)?;
//! let h = shannon_entropy(&p)?;
//! assert!(h.value.is_finite());
//! # Ok::<(), polsar_entropy::Error>(())
//! ```

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Triangular solves index several arrays with the same counter.
#![allow(clippy::needless_range_loop)]
// Published rational-approximation coefficients are kept verbatim.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod entropy;
mod error;
pub mod hypothesis;
pub mod inference;
pub mod io;
pub mod matrix;
pub mod roots;
pub mod simulate;
pub mod special;
pub mod wishart;

pub use entropy::{
    entropy, ln_mu_tilde, mu_tilde, renyi_entropy, shannon_entropy, tsallis_entropy, EntropyKind, EntropyMeasure,
    EntropyValue, MeasureRegistry,
};
pub use error::{Error, Result};
pub use hypothesis::{
    confidence_interval, difference_interval, entropy_test, goodness_of_fit, pooled_entropy_mean, ConfidenceInterval,
    EntropyEstimate, QuantileConvention, TestOutcome,
};
pub use inference::{aic, cramer_rao, entropy_variance, estimate, estimate_on_branch, fisher_information, MLFit};
pub use matrix::HermitianMatrix;
pub use simulate::{mc_power_experiment, mc_size_experiment, sample_wishart, MCConfig, MCReport};
pub use wishart::{AsModel, ModelSummary, Regime, SampleSet, WishartParams};
