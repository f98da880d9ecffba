//! Covariance-stack files, masks, region extraction, subsampling and
//! published reference data.

pub mod fixtures;
mod mask;
mod region;
mod stack;
mod subsample;

pub use mask::{read_mask, write_mask, Mask, MASK_MAGIC};
pub use region::{extract_region, RegionSpec};
pub use stack::{read_stack, write_stack, CovarianceStack, STACK_MAGIC};
pub use subsample::{sample_indices, subsample_without_replacement, SubsampleCampaign};
