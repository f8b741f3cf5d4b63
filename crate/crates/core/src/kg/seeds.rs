use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EntityId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.2,
            valid: 0.1,
            test: 0.7,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::Config(format!("split ratios must be non-negative: {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split ratios sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

/// Gold pairs, each tagged with the split it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedAlignment {
    pairs: Vec<(EntityId, EntityId)>,
    splits: Vec<Split>,
}

impl SeedAlignment {
    /// Builds an alignment from tagged pairs, rejecting entities that appear twice.
    pub fn new(pairs: Vec<(EntityId, EntityId)>, splits: Vec<Split>) -> Result<Self> {
        if pairs.len() != splits.len() {
            return Err(Error::InvalidData(format!(
                "{} pairs but {} split tags",
                pairs.len(),
                splits.len()
            )));
        }
        check_one_to_one(&pairs)?;
        Ok(SeedAlignment { pairs, splits })
    }

    pub fn pairs(&self) -> &[(EntityId, EntityId)] {
        &self.pairs
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn of(&self, split: Split) -> Vec<(EntityId, EntityId)> {
        self.pairs
            .iter()
            .zip(&self.splits)
            .filter(|(_, s)| **s == split)
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn train(&self) -> Vec<(EntityId, EntityId)> {
        self.of(Split::Train)
    }

    pub fn valid(&self) -> Vec<(EntityId, EntityId)> {
        self.of(Split::Valid)
    }

    pub fn test(&self) -> Vec<(EntityId, EntityId)> {
        self.of(Split::Test)
    }
}

pub(crate) fn check_one_to_one(pairs: &[(EntityId, EntityId)]) -> Result<()> {
    let mut left = HashSet::new();
    let mut right = HashSet::new();
    for &(a, b) in pairs {
        if !left.insert(a) {
            return Err(Error::InvalidData(format!("kg1 entity {a} appears in more than one link")));
        }
        if !right.insert(b) {
            return Err(Error::InvalidData(format!("kg2 entity {b} appears in more than one link")));
        }
    }
    Ok(())
}

/// Shuffles `pairs` with a seeded generator and cuts them into contiguous
/// train/valid/test blocks of sizes `round(n * ratio)` (test takes the rest).
pub fn split_seeds(pairs: &[(EntityId, EntityId)], ratios: SplitRatios, rng_seed: u64) -> Result<SeedAlignment> {
    ratios.validate()?;
    if pairs.is_empty() {
        return Err(Error::InvalidData("no gold links to split".into()));
    }
    check_one_to_one(pairs)?;

    let n = pairs.len();
    let n_train = ((n as f64) * ratios.train).round() as usize;
    let n_valid = (((n as f64) * ratios.valid).round() as usize).min(n - n_train.min(n));
    let n_train = n_train.min(n);

    let mut shuffled = pairs.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let splits = (0..n)
        .map(|i| {
            if i < n_train {
                Split::Train
            } else if i < n_train + n_valid {
                Split::Valid
            } else {
                Split::Test
            }
        })
        .collect();
    Ok(SeedAlignment {
        pairs: shuffled,
        splits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(n: usize) -> Vec<(EntityId, EntityId)> {
        (0..n).map(|i| (EntityId::from(i), EntityId::from(n - 1 - i))).collect()
    }

    #[test]
    fn protocol_split_sizes() {
        let s = split_seeds(&pairs(15000), SplitRatios::default(), 7).unwrap();
        assert_eq!(s.train().len(), 3000);
        assert_eq!(s.valid().len(), 1500);
        assert_eq!(s.test().len(), 10500);
    }

    #[test]
    fn all_train() {
        let r = SplitRatios {
            train: 1.0,
            valid: 0.0,
            test: 0.0,
        };
        let s = split_seeds(&pairs(17), r, 1).unwrap();
        assert!(s.splits().iter().all(|t| *t == Split::Train));
    }

    #[test]
    fn same_seed_same_partition() {
        let a = split_seeds(&pairs(100), SplitRatios::default(), 42).unwrap();
        let b = split_seeds(&pairs(100), SplitRatios::default(), 42).unwrap();
        assert_eq!(a, b);
        let c = split_seeds(&pairs(100), SplitRatios::default(), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bad_ratios_are_config_errors() {
        let r = SplitRatios {
            train: 0.5,
            valid: 0.1,
            test: 0.1,
        };
        assert!(matches!(split_seeds(&pairs(10), r, 0), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_entities_are_rejected() {
        let p = vec![(EntityId(0), EntityId(1)), (EntityId(0), EntityId(2))];
        assert!(split_seeds(&p, SplitRatios::default(), 0).is_err());
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(split_seeds(&[], SplitRatios::default(), 0).is_err());
    }
}
