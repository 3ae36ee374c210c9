use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::LabeledRow;

/// RNG stream reserved for train/test splitting.
const SPLIT_STREAM: u64 = 1;

pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: Vec<LabeledRow>,
    /// Held-out rows for parameter tuning; empty unless requested.
    pub validation: Vec<LabeledRow>,
    pub test: Vec<LabeledRow>,
    pub ratio: f64,
    pub seed: u64,
}

/// Seeded shuffle, then the first `floor(ratio * n)` rows train and the rest test.
pub fn split(rows: &[LabeledRow], ratio: f64, seed: u64) -> Result<SplitDataset> {
    split_with_validation(rows, ratio, 0.0, seed)
}

/// Like [`split`], carving `floor(validation_ratio * n)` rows out of the
/// remainder (taken right after the training rows) for validation.
pub fn split_with_validation(
    rows: &[LabeledRow],
    ratio: f64,
    validation_ratio: f64,
    seed: u64,
) -> Result<SplitDataset> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    if !(0.0..1.0).contains(&validation_ratio) || ratio + validation_ratio >= 1.0 {
        return Err(Error::InvalidRatio(validation_ratio));
    }
    let n = rows.len();
    if n < 2 {
        return Err(Error::TooFewRows {
            n,
            reason: "at least two rows are required",
        });
    }
    let n_train = (ratio * n as f64).floor() as usize;
    let n_validation = (validation_ratio * n as f64).floor() as usize;
    if n_train == 0 {
        return Err(Error::TooFewRows {
            n,
            reason: "the training side would be empty",
        });
    }
    if n_train + n_validation >= n {
        return Err(Error::TooFewRows {
            n,
            reason: "the test side would be empty",
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(seed, SPLIT_STREAM));
    let take = |idx: &[usize]| idx.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>();

    Ok(SplitDataset {
        train: take(&order[..n_train]),
        validation: take(&order[n_train..n_train + n_validation]),
        test: take(&order[n_train + n_validation..]),
        ratio,
        seed,
    })
}
