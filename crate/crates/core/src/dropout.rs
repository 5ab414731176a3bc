//! Inverted dropout: during training each element is zeroed with the given
//! probability, survivors are scaled by 1 / (1 - rate) so the expectation is
//! preserved; at inference the kernel is the identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Identifier of the random source, recorded in run metadata so a
/// reproduction in another language can match the stream statistically.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64/sequential-f64";

#[derive(Debug, Error, PartialEq)]
pub enum DropoutError {
    #[error("dropout rate {0} outside [0, 1)")]
    Rate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropoutSpec {
    /// Probability of zeroing an element; strictly below 1.
    pub rate: f64,
    pub seed: u64,
    pub training: bool,
}

impl DropoutSpec {
    pub fn new(rate: f64, seed: u64) -> Self {
        Self { rate, seed, training: true }
    }
}

/// Apply inverted dropout to a flat array. Identical specs produce
/// bit-identical outputs; `training = false` or rate 0 are exact identities.
pub fn apply_dropout(values: &[f64], spec: &DropoutSpec) -> Result<Vec<f64>, DropoutError> {
    if !(0.0..1.0).contains(&spec.rate) {
        return Err(DropoutError::Rate(spec.rate));
    }
    if !spec.training || spec.rate == 0.0 {
        return Ok(values.to_vec());
    }
    let scale = 1.0 / (1.0 - spec.rate);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(values
        .iter()
        .map(|&v| {
            if rng.random::<f64>() < spec.rate {
                0.0
            } else {
                v * scale
            }
        })
        .collect())
}
