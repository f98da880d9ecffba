//! Sampling pixels without replacement, alone or as a campaign of
//! pairwise-distinct subsets.

use crate::error::{Error, Result};
use crate::wishart::SampleSet;
use rand::seq::index;
use rand::Rng;
use std::collections::HashSet;

/// Draw attempts per campaign subset before giving up on finding a new one.
pub const MAX_DRAW_ATTEMPTS: usize = 1000;

/// `n` distinct positions out of `0..population`, in draw order.
pub fn sample_indices<R: Rng + ?Sized>(population: usize, n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n > population {
        return Err(Error::SubsampleTooLarge {
            requested: n,
            available: population,
        });
    }
    if n == 0 {
        return Err(Error::EmptySelection);
    }
    Ok(index::sample(rng, population, n).into_vec())
}

pub fn subsample_without_replacement<R: Rng + ?Sized>(sample: &SampleSet, n: usize, rng: &mut R) -> Result<SampleSet> {
    let picked = sample_indices(sample.len(), n, rng)?;
    SampleSet::new(picked.into_iter().map(|i| sample.items()[i].clone()).collect())
}

/// Tracks the subsets drawn so far and redraws any repeat, so that no two
/// subsets of a campaign select the same set of pixels.
#[derive(Debug, Clone)]
pub struct SubsampleCampaign {
    population: usize,
    n: usize,
    seen: HashSet<Vec<usize>>,
    rejected: usize,
}

impl SubsampleCampaign {
    pub fn new(population: usize, n: usize) -> Result<Self> {
        if n > population {
            return Err(Error::SubsampleTooLarge {
                requested: n,
                available: population,
            });
        }
        Ok(SubsampleCampaign {
            population,
            n,
            seen: HashSet::new(),
            rejected: 0,
        })
    }

    /// The next subset, guaranteed different (as a set) from all previous.
    pub fn next_indices<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Vec<usize>> {
        for _ in 0..MAX_DRAW_ATTEMPTS {
            let picked = sample_indices(self.population, self.n, rng)?;
            let mut key = picked.clone();
            key.sort_unstable();
            if self.seen.insert(key) {
                return Ok(picked);
            }
            self.rejected += 1;
        }
        Err(Error::InvalidParameter(format!(
            "no new distinct subset of size {} from {} after {MAX_DRAW_ATTEMPTS} attempts",
            self.n, self.population
        )))
    }

    /// Subsets drawn so far.
    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Draws discarded because they repeated an earlier subset.
    pub fn rejected(&self) -> usize {
        self.rejected
    }
}
