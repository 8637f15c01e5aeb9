//! Random amplitude samples and the data-constraint projection.
//!
//! A [`SampleMask`] is the problem statement handed to every completer: the
//! sampled locations, their exact values, and nothing else. Masks deliberately
//! do not reference the state they were drawn from, so reconstruction code
//! cannot peek at unsampled truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

use crate::{C64, StateVector};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("sample rate must lie in (0, 1], got {0}")]
    RateOutOfRange(f64),
    #[error("mask addresses a {mask}-amplitude state, got {state}")]
    DimensionMismatch { mask: usize, state: usize },
    #[error("mask indices must be strictly increasing and in range")]
    BadIndices,
}

/// Sampled subset `S` of a state's amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMask {
    total: usize,
    indices: Vec<usize>,
    values: Vec<C64>,
    seed: u64,
    rate: f64,
}

impl SampleMask {
    /// Assemble a mask from raw parts, enforcing the ordering invariant.
    pub fn from_parts(
        total: usize,
        indices: Vec<usize>,
        values: Vec<C64>,
        seed: u64,
        rate: f64,
    ) -> Result<Self, SamplingError> {
        if indices.len() != values.len() || indices.is_empty() {
            return Err(SamplingError::BadIndices);
        }
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !increasing || *indices.last().unwrap() >= total {
            return Err(SamplingError::BadIndices);
        }
        Ok(Self { total, indices, values, seed, rate })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of sampled amplitudes `k = |S|`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Sorted complement `S'` (the unsampled locations).
    pub fn complement(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total - self.len());
        let mut it = self.indices.iter().copied().peekable();
        for i in 0..self.total {
            if it.peek() == Some(&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        out
    }
}

/// Number of samples implied by a rate: nearest integer, clamped to
/// `[1, total]`.
pub fn sample_count(total: usize, rate: f64) -> usize {
    ((rate * total as f64).round() as usize).clamp(1, total)
}

/// Uniform sample (without replacement) of `round(rate·d^N)` amplitudes.
pub fn draw_mask(state: &StateVector, rate: f64, seed: u64) -> Result<SampleMask, SamplingError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(SamplingError::RateOutOfRange(rate));
    }
    let total = state.dim();
    let count = sample_count(total, rate);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Floyd's algorithm: uniform k-subset in O(k) draws
    let mut chosen: HashSet<usize> = HashSet::with_capacity(count);
    for j in (total - count)..total {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut indices: Vec<usize> = chosen.into_iter().collect();
    indices.sort_unstable();
    let values = indices.iter().map(|&i| state.amplitudes()[i]).collect();
    Ok(SampleMask { total, indices, values, seed, rate })
}

/// Zero-filled completion input: sampled amplitudes at their exact values,
/// every unsampled amplitude exactly zero.
pub fn build_initial(mask: &SampleMask, num_sites: usize, local_dim: usize) -> Result<StateVector, SamplingError> {
    let mut state = StateVector::zeros(num_sites, local_dim);
    if state.dim() != mask.total {
        return Err(SamplingError::DimensionMismatch { mask: mask.total, state: state.dim() });
    }
    let amps = state.amplitudes_mut();
    for (&i, &v) in mask.indices.iter().zip(&mask.values) {
        amps[i] = v;
    }
    Ok(state)
}

/// Overwrite sampled entries with their exact values; unsampled entries are
/// untouched. Idempotent and bit-exact.
pub fn project_data_in_place(state: &mut StateVector, mask: &SampleMask) -> Result<(), SamplingError> {
    if state.dim() != mask.total {
        return Err(SamplingError::DimensionMismatch { mask: mask.total, state: state.dim() });
    }
    let amps = state.amplitudes_mut();
    for (&i, &v) in mask.indices.iter().zip(&mask.values) {
        amps[i] = v;
    }
    Ok(())
}

/// Pure variant of [`project_data_in_place`].
pub fn project_data(state: &StateVector, mask: &SampleMask) -> Result<StateVector, SamplingError> {
    let mut out = state.clone();
    project_data_in_place(&mut out, mask)?;
    Ok(out)
}
