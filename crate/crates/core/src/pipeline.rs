//! Shared preprocessing for experiment runs: the training floor replaces
//! sentinels in every split and anchors the powed transform.

use crate::dataset::{compute_floor, replace_sentinels, FingerprintDataset, PowedConfig};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub train: FingerprintDataset,
    /// Other splits, in the order given.
    pub splits: Vec<FingerprintDataset>,
    pub floor: f64,
    pub powed: PowedConfig,
}

impl Preprocessed {
    /// Uses `floor` when given, otherwise the training set's minimum
    /// non-sentinel RSSI.
    pub fn new(
        train: &FingerprintDataset,
        splits: &[FingerprintDataset],
        beta: f64,
        floor: Option<f64>,
    ) -> Result<Self> {
        for s in splits {
            train.check_compatible(s)?;
        }
        let floor = match floor {
            Some(f) => f,
            None => compute_floor(train)?,
        };
        let powed = PowedConfig::new(beta, floor)?;
        Ok(Preprocessed {
            train: replace_sentinels(train, floor)?,
            splits: splits
                .iter()
                .map(|s| replace_sentinels(s, floor))
                .collect::<Result<_>>()?,
            floor,
            powed,
        })
    }
}
