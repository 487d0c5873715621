//! Train/test splits over a [`Dataset`].

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, FrameRef};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SplitSpec {
    /// Hold out random windows of consecutive frames, about a tenth of the data.
    Interpolation { window: usize, seed: u64 },
    /// Hold out one whole sequence.
    Extrapolation { held_out: String },
}

impl SplitSpec {
    pub fn interpolation(seed: u64) -> Self {
        Self::Interpolation { window: 10, seed }
    }

    pub fn apply(&self, dataset: &Dataset) -> Result<Split> {
        match self {
            Self::Interpolation { window, seed } => split_interpolation(dataset, *window, *seed),
            Self::Extrapolation { held_out } => split_extrapolation(dataset, held_out),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Interpolation { window, seed } => {
                format!("interpolation(window={window};seed={seed})")
            }
            Self::Extrapolation { held_out } => format!("extrapolation(held_out={held_out})"),
        }
    }
}

/// Frame references in dataset order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<FrameRef>,
    pub test: Vec<FrameRef>,
}

/// Picks `floor(total / (10 * window))` disjoint windows of `window`
/// consecutive frames, one at a time, uniformly among the placements that do
/// not overlap earlier picks. Windows never straddle two sequences.
pub fn split_interpolation(dataset: &Dataset, window: usize, seed: u64) -> Result<Split> {
    if window == 0 {
        return Err(Error::arg("window must be positive"));
    }
    let total = dataset.num_frames();
    let wanted = total / 10 / window;
    if wanted == 0 || dataset.sequences().iter().all(|s| s.frames.len() < window) {
        return Err(Error::arg(format!(
            "{total} frames are too few for one test window of {window}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken: Vec<Vec<bool>> = dataset
        .sequences()
        .iter()
        .map(|s| vec![false; s.frames.len()])
        .collect();
    for _ in 0..wanted {
        let placements: Vec<(usize, usize)> = taken
            .iter()
            .enumerate()
            .flat_map(|(s, used)| {
                (0..(used.len() + 1).saturating_sub(window))
                    .filter(move |&start| !used[start..start + window].iter().any(|&u| u))
                    .map(move |start| (s, start))
            })
            .collect();
        if placements.is_empty() {
            break;
        }
        let (s, start) = placements[rng.random_range(0..placements.len())];
        taken[s][start..start + window].iter_mut().for_each(|u| *u = true);
    }
    let (test, train) = dataset
        .frame_refs()
        .into_iter()
        .partition(|r| taken[r.sequence][r.frame]);
    Ok(Split { train, test })
}

/// Tests on every frame of `held_out`, trains on the rest.
pub fn split_extrapolation(dataset: &Dataset, held_out: &str) -> Result<Split> {
    let idx = dataset.sequence_index(held_out).ok_or_else(|| {
        Error::arg(format!(
            "unknown sequence `{held_out}`; available: {}",
            dataset
                .sequences()
                .iter()
                .map(|s| s.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    })?;
    let (test, train) = dataset
        .frame_refs()
        .into_iter()
        .partition(|r| r.sequence == idx);
    Ok(Split { train, test })
}

/// True when `train` and `test` are disjoint and together cover the dataset.
pub fn is_partition(dataset: &Dataset, split: &Split) -> bool {
    let train: BTreeSet<_> = split.train.iter().collect();
    let test: BTreeSet<_> = split.test.iter().collect();
    train.len() == split.train.len()
        && test.len() == split.test.len()
        && train.is_disjoint(&test)
        && train.len() + test.len() == dataset.num_frames()
}
