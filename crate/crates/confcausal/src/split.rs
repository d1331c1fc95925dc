//! Deterministic random partitioning of row indices into a training fold
//! and a calibration fold.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;

use crate::types::CoreError;

/// A disjoint partition of `0..n` into a training and a calibration fold.
/// Both folds are always non-empty and stored in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub calib: Vec<usize>,
}

impl SplitIndices {
    pub fn n(&self) -> usize {
        self.train.len() + self.calib.len()
    }
}

/// Uniformly random partition of `0..n` with `floor(train_frac * n)` rows
/// in the training fold (clamped so neither fold is empty) and the rest in
/// the calibration fold. Deterministic for a fixed generator state.
pub fn split(n: usize, train_frac: f64, rng: &mut ChaCha20Rng) -> Result<SplitIndices, CoreError> {
    if n < 2 {
        return Err(CoreError::TooFewToSplit(n));
    }
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(CoreError::InvalidTrainFraction(train_frac));
    }
    let k = ((train_frac * n as f64).floor() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut train = order[..k].to_vec();
    let mut calib = order[k..].to_vec();
    train.sort_unstable();
    calib.sort_unstable();
    Ok(SplitIndices { train, calib })
}
