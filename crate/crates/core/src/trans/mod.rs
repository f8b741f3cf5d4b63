//! Translation-based aligners.
//!
//! Entities of both graphs live in one embedding table; every training seed pair
//! shares a single row. Relations of the two graphs stay separate. A triple is
//! scored by `||h + r - t||`; three objectives are available:
//!
//! * [`Objective::Translation`] sums the positive scores (MTransE),
//! * [`Objective::Triplet`] is the margin hinge `[gamma + f(pos) - f(neg)]+` with
//!   uniform negatives (IPTransE),
//! * [`Objective::Contrastive`] is `[f(pos) - gamma1]+ + [gamma2 - f(neg)]+` with
//!   epsilon-truncated negatives (BootEA).

mod bootstrap;
mod loss;
mod negatives;
mod space;
mod train;

use ndarray::{Array2, ArrayView1, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bootstrap::bootstrap_augment;
pub use loss::{epoch_loss, loss_and_gradient, TranslationGrad};
pub use negatives::{
    sample_negatives_truncated, sample_negatives_uniform, truncated_pool_size, NegativeTriple, NeighborPools,
    MAX_SAMPLING_RETRIES,
};
pub use space::JointSpace;
pub(crate) use train::compare_validation;
pub use train::{train, EpochRecord, Method, TrainConfig, TrainedModel};

/// A relation triple in joint-space row indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        Triple { head, relation, tail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Translation,
    Triplet,
    Contrastive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossConfig {
    /// triplet margin
    pub gamma: f64,
    /// contrastive cap on positive scores
    pub gamma1: f64,
    /// contrastive floor on negative scores
    pub gamma2: f64,
    /// weight of each positive/negative pair term
    pub beta: f64,
    /// truncation fraction for neighbor-restricted negatives
    pub epsilon: f64,
    pub negatives_per_positive: usize,
    pub norm: Norm,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            gamma: 1.0,
            gamma1: 0.01,
            gamma2: 2.0,
            beta: 1.0,
            epsilon: 0.9,
            negatives_per_positive: 10,
            norm: Norm::L2,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.gamma >= 0.0) {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.gamma1 > 0.0 && self.gamma2 > 0.0) {
            return bad(format!("gamma1 and gamma2 must be positive, got {} and {}", self.gamma1, self.gamma2));
        }
        if !(self.gamma1 < self.gamma2) {
            return bad(format!("gamma1 ({}) must be below gamma2 ({})", self.gamma1, self.gamma2));
        }
        if !(self.beta >= 0.0) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return bad(format!("epsilon must lie in [0, 1), got {}", self.epsilon));
        }
        if self.negatives_per_positive == 0 {
            return bad("negatives_per_positive must be positive".into());
        }
        Ok(())
    }
}

/// Entity and relation vectors of a translation model.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub entities: Array2<f64>,
    pub relations: Array2<f64>,
}

impl EmbeddingTable {
    pub fn new(entities: Array2<f64>, relations: Array2<f64>) -> Result<Self> {
        if entities.ncols() != relations.ncols() && relations.nrows() > 0 {
            return Err(Error::Shape(format!(
                "entity dim {} != relation dim {}",
                entities.ncols(),
                relations.ncols()
            )));
        }
        Ok(EmbeddingTable { entities, relations })
    }

    /// Entries uniform in `[-6/sqrt(d), 6/sqrt(d)]`, then every row scaled to unit length.
    pub fn random<R: Rng>(entity_count: usize, relation_count: usize, dim: usize, rng: &mut R) -> Self {
        let bound = 6.0 / (dim as f64).sqrt();
        let mut draw = |rows: usize| {
            let mut m = Array2::from_shape_simple_fn((rows, dim), || rng.gen_range(-bound..=bound));
            normalize_rows(&mut m);
            m
        };
        let entities = draw(entity_count);
        let relations = draw(relation_count);
        EmbeddingTable { entities, relations }
    }

    pub fn dim(&self) -> usize {
        self.entities.ncols()
    }

    pub fn normalize_entities(&mut self) {
        normalize_rows(&mut self.entities);
    }

    pub fn is_finite(&self) -> bool {
        self.entities.iter().chain(self.relations.iter()).all(|x| x.is_finite())
    }

    fn check(&self, t: &Triple) -> Result<()> {
        let bad = |what: &'static str, i: usize| {
            Err(Error::Lookup {
                kind: what,
                key: i.to_string(),
            })
        };
        if t.head >= self.entities.nrows() {
            return bad("entity row", t.head);
        }
        if t.tail >= self.entities.nrows() {
            return bad("entity row", t.tail);
        }
        if t.relation >= self.relations.nrows() {
            return bad("relation row", t.relation);
        }
        Ok(())
    }
}

pub(crate) fn normalize_rows(m: &mut Array2<f64>) {
    for mut row in m.axis_iter_mut(Axis(0)) {
        let n = row.dot(&row).sqrt();
        if n > 0.0 {
            row /= n;
        }
    }
}

pub(crate) fn norm_of(v: ArrayView1<f64>, norm: Norm) -> f64 {
    match norm {
        Norm::L1 => v.iter().map(|x| x.abs()).sum(),
        Norm::L2 => v.dot(&v).sqrt(),
    }
}

/// `||h + r - t||` under `norm`.
pub fn score_triple(emb: &EmbeddingTable, triple: &Triple, norm: Norm) -> Result<f64> {
    emb.check(triple)?;
    let v = &emb.entities.row(triple.head) + &emb.relations.row(triple.relation) - emb.entities.row(triple.tail);
    Ok(norm_of(v.view(), norm))
}

/// `max(0, gamma + pos - neg)`
pub fn triplet_loss(pos_score: f64, neg_score: f64, gamma: f64) -> f64 {
    (gamma + pos_score - neg_score).max(0.0)
}

/// `max(0, pos - gamma1) + max(0, gamma2 - neg)`
pub fn contrastive_loss(pos_score: f64, neg_score: f64, gamma1: f64, gamma2: f64) -> f64 {
    (pos_score - gamma1).max(0.0) + (gamma2 - neg_score).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table() -> EmbeddingTable {
        // h = (1,0), t = (0,0); r = (0,1)
        EmbeddingTable::new(array![[1.0, 0.0], [0.0, 0.0]], array![[0.0, 1.0]]).unwrap()
    }

    #[test]
    fn exact_translation_scores_zero() {
        let emb = EmbeddingTable::new(array![[1.0, 0.0], [1.0, 1.0]], array![[0.0, 1.0]]).unwrap();
        for norm in [Norm::L1, Norm::L2] {
            assert_eq!(score_triple(&emb, &Triple::new(0, 0, 1), norm).unwrap(), 0.0);
        }
    }

    #[test]
    fn hand_scores() {
        let t = Triple::new(0, 0, 1);
        assert!((score_triple(&table(), &t, Norm::L2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(score_triple(&table(), &t, Norm::L1).unwrap(), 2.0);
    }

    #[test]
    fn unknown_rows_are_lookup_errors() {
        assert!(matches!(
            score_triple(&table(), &Triple::new(0, 3, 1), Norm::L2),
            Err(Error::Lookup { .. })
        ));
        assert!(matches!(
            score_triple(&table(), &Triple::new(9, 0, 1), Norm::L2),
            Err(Error::Lookup { .. })
        ));
    }

    #[test]
    fn triplet_hinge_values() {
        assert_eq!(triplet_loss(0.7, 0.7, 0.5), 0.5);
        assert_eq!(triplet_loss(0.5, 2.0, 1.0), 0.0);
        assert!((triplet_loss(1.0, 1.2, 0.5) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn contrastive_hinge_values() {
        assert_eq!(contrastive_loss(0.0, 2.0, 0.1, 2.0), 0.0);
        assert_eq!(contrastive_loss(0.0, 3.5, 0.1, 2.0), 0.0);
        assert!((contrastive_loss(0.4, 1.5, 0.1, 2.0) - 0.8).abs() < 1e-12);
        assert_eq!(contrastive_loss(0.05, 2.5, 0.1, 2.0), 0.0);
    }

    #[test]
    fn zero_positive_score_leaves_only_the_negative_hinge() {
        for neg in [0.0, 0.3, 1.0, 2.5] {
            assert_eq!(triplet_loss(0.0, neg, 1.0), (1.0 - neg).max(0.0));
        }
    }

    #[test]
    fn random_table_rows_are_unit_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = EmbeddingTable::random(7, 3, 16, &mut rng);
        for row in t.entities.rows() {
            assert!((row.dot(&row).sqrt() - 1.0).abs() < 1e-12);
        }
        assert_eq!(t.dim(), 16);
    }

    #[test]
    fn loss_config_validation() {
        assert!(LossConfig::default().validate().is_ok());
        let bad = LossConfig {
            gamma1: 2.0,
            gamma2: 1.0,
            ..LossConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = LossConfig {
            epsilon: 1.0,
            ..LossConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
