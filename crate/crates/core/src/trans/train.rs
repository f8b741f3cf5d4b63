use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    bootstrap_augment, loss_and_gradient, normalize_rows, sample_negatives_truncated, sample_negatives_uniform,
    EmbeddingTable, JointSpace, LossConfig, NegativeTriple, NeighborPools, Objective, TranslationGrad, Triple,
};
use crate::error::{Error, Result};
use crate::kg::{EntityId, KnowledgeGraph, SeedAlignment};
use crate::matcher::{hits_at_k, similarity_matrix, SimMetric};
use crate::optim::{OptimizerConfig, ParamOptimizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    MTransE,
    IPTransE,
    BootEA,
}

impl Method {
    pub fn objective(self) -> Objective {
        match self {
            Method::MTransE => Objective::Translation,
            Method::IPTransE => Objective::Triplet,
            Method::BootEA => Objective::Contrastive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::MTransE => "mtranse",
            Method::IPTransE => "iptranse",
            Method::BootEA => "bootea",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mtranse" => Ok(Method::MTransE),
            "iptranse" => Ok(Method::IPTransE),
            "bootea" => Ok(Method::BootEA),
            other => Err(Error::Config(format!("unknown translation method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub optimizer: OptimizerConfig,
    pub loss: LossConfig,
    pub max_epochs: usize,
    /// relation triples per batch, drawn jointly from both graphs
    pub batch_size: usize,
    /// validation Hits@1 is computed every this many epochs
    pub eval_every: usize,
    /// evaluations without improvement before stopping
    pub patience: usize,
    pub normalize_entities: bool,
    /// epochs between rebuilds of the truncated-sampling neighbour pools
    pub neighbor_refresh: usize,
    pub bootstrap_threshold: f64,
    pub bootstrap_rounds: usize,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            optimizer: OptimizerConfig::sgd(0.01),
            loss: LossConfig::default(),
            max_epochs: 1000,
            batch_size: 5000,
            eval_every: 10,
            patience: 10,
            normalize_entities: true,
            neighbor_refresh: 10,
            bootstrap_threshold: 0.7,
            bootstrap_rounds: 1,
            rng_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        let positive = [
            ("dim", self.dim),
            ("batch_size", self.batch_size),
            ("eval_every", self.eval_every),
            ("patience", self.patience),
            ("neighbor_refresh", self.neighbor_refresh),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if !(self.optimizer.learning_rate() > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(self.bootstrap_threshold > 0.0 && self.bootstrap_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "bootstrap_threshold must lie in (0, 1], got {}",
                self.bootstrap_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    /// validation Hits@1 in percent, on evaluation epochs
    pub valid_hits_at_1: Option<f64>,
    /// pairs added by bootstrapping at this epoch
    pub bootstrapped: usize,
}

/// A trained translation model with the row mapping of both graphs.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub method: Method,
    pub table: EmbeddingTable,
    kg1_rows: Vec<usize>,
    kg2_rows: Vec<usize>,
    /// epoch of the returned snapshot (0 = initialization)
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub best_valid_hits_at_1: Option<f64>,
    pub history: Vec<EpochRecord>,
    /// pairs merged by bootstrapping, in the order they were added
    pub bootstrapped: Vec<(EntityId, EntityId)>,
}

impl TrainedModel {
    fn gather(&self, rows: &[usize]) -> Array2<f64> {
        self.table.entities.select(ndarray::Axis(0), rows)
    }

    /// KG1 entity vectors in KG1 id order.
    pub fn kg1_embeddings(&self) -> Array2<f64> {
        self.gather(&self.kg1_rows)
    }

    /// KG2 entity vectors in KG2 id order.
    pub fn kg2_embeddings(&self) -> Array2<f64> {
        self.gather(&self.kg2_rows)
    }
}

struct Snapshot {
    table: EmbeddingTable,
    kg1_rows: Vec<usize>,
    kg2_rows: Vec<usize>,
    epoch: usize,
    hits: Option<f64>,
}

fn snapshot(table: &EmbeddingTable, space: &JointSpace, epoch: usize, hits: Option<f64>) -> Snapshot {
    Snapshot {
        table: table.clone(),
        kg1_rows: space.kg1_rows().to_vec(),
        kg2_rows: space.kg2_rows().to_vec(),
        epoch,
        hits,
    }
}

/// `(improved, tied)` of a validation score against the best so far. Without a
/// validation split every evaluation counts as an improvement.
pub(crate) fn compare_validation(hits: Option<f64>, best: Option<f64>) -> (bool, bool) {
    match (hits, best) {
        (Some(h), Some(b)) => (h > b, h == b),
        _ => (true, false),
    }
}

fn rows_of(space: &JointSpace, ids: &[(EntityId, EntityId)]) -> (Vec<usize>, Vec<usize>) {
    ids.iter().map(|&(a, b)| (space.kg1_row(a), space.kg2_row(b))).unzip()
}

fn validation_hits(table: &EmbeddingTable, space: &JointSpace, valid: &[(EntityId, EntityId)]) -> Result<Option<f64>> {
    if valid.is_empty() {
        return Ok(None);
    }
    let (r1, r2) = rows_of(space, valid);
    let a = table.entities.select(ndarray::Axis(0), &r1);
    let b = table.entities.select(ndarray::Axis(0), &r2);
    let sim = similarity_matrix(a.view(), b.view(), SimMetric::Cosine)?;
    let gold: Vec<(usize, usize)> = (0..valid.len()).map(|i| (i, i)).collect();
    Ok(Some(hits_at_k(&sim, &gold, 1)?))
}

/// Bootstraps over entities outside the train and validation seeds.
fn bootstrap_round(
    table: &EmbeddingTable,
    space: &mut JointSpace,
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
    seeds: &SeedAlignment,
    aligned: &mut Vec<(EntityId, EntityId)>,
    config: &TrainConfig,
) -> Result<usize> {
    let mut used1 = vec![false; kg1.entity_count()];
    let mut used2 = vec![false; kg2.entity_count()];
    for &(a, b) in seeds.train().iter().chain(&seeds.valid()).chain(aligned.iter()) {
        used1[a.index()] = true;
        used2[b.index()] = true;
    }
    let left: Vec<EntityId> = (0..used1.len()).filter(|&i| !used1[i]).map(EntityId::from).collect();
    let right: Vec<EntityId> = (0..used2.len()).filter(|&i| !used2[i]).map(EntityId::from).collect();
    if left.is_empty() || right.is_empty() {
        return Ok(0);
    }
    let r1: Vec<usize> = left.iter().map(|&e| space.kg1_row(e)).collect();
    let r2: Vec<usize> = right.iter().map(|&e| space.kg2_row(e)).collect();
    let a = table.entities.select(ndarray::Axis(0), &r1);
    let b = table.entities.select(ndarray::Axis(0), &r2);
    let sim = similarity_matrix(a.view(), b.view(), SimMetric::Cosine)?;
    let added = bootstrap_augment(&sim, &left, &right, &[], config.bootstrap_threshold, config.bootstrap_rounds)?;
    space.merge(&added)?;
    aligned.extend_from_slice(&added);
    Ok(added.len())
}

fn draw_negatives(
    method: Method,
    batch: &[Triple],
    space: &JointSpace,
    pools: Option<&NeighborPools>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<NegativeTriple>>> {
    if method == Method::MTransE {
        return Ok(Vec::new());
    }
    batch
        .iter()
        .map(|&p| match pools {
            Some(pools) => match sample_negatives_truncated(p, space, pools, k, rng) {
                Err(Error::Sampling(_)) => sample_negatives_uniform(p, space, k, rng),
                other => other,
            },
            None => sample_negatives_uniform(p, space, k, rng),
        })
        .collect()
}

/// Trains a translation aligner on both graphs in one shared space.
///
/// Train seed pairs share a row from the start. Every `eval_every` epochs the
/// validation Hits@1 (cosine) is measured; the best snapshot is returned and
/// training stops after `patience` evaluations without improvement. BootEA also
/// rebuilds its neighbour pools every `neighbor_refresh` epochs and runs one
/// bootstrap round after each evaluation. With `max_epochs = 0` the
/// initialization is returned.
pub fn train(
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
    seeds: &SeedAlignment,
    method: Method,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    let train_pairs = seeds.train();
    let valid_pairs = seeds.valid();
    if train_pairs.is_empty() {
        return Err(Error::Config("training needs at least one train seed pair".into()));
    }
    let mut space = JointSpace::new(kg1, kg2, &train_pairs)?;
    if space.triples().is_empty() {
        return Err(Error::InvalidData("no relation triples to train on".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut table = EmbeddingTable::random(space.row_count(), space.relation_count(), config.dim, &mut rng);

    let initial_hits = validation_hits(&table, &space, &valid_pairs)?;
    let mut best = snapshot(&table, &space, 0, initial_hits);
    let mut history = Vec::new();
    let mut aligned: Vec<(EntityId, EntityId)> = Vec::new();
    let mut epochs_run = 0;

    let mut opt_e = ParamOptimizer::new(config.optimizer, table.entities.dim());
    let mut opt_r = ParamOptimizer::new(config.optimizer, table.relations.dim());
    let mut grad = TranslationGrad::for_table(&table);
    let mut pools: Option<NeighborPools> = None;
    let mut stale = 0;
    let objective = method.objective();

    for epoch in 1..=config.max_epochs {
        if method == Method::BootEA && (pools.is_none() || (epoch - 1) % config.neighbor_refresh == 0) {
            pools = Some(NeighborPools::build(&table.entities, space.active_rows(), config.loss.epsilon)?);
        }
        let mut order: Vec<Triple> = space.triples().to_vec();
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let negatives = draw_negatives(
                method,
                batch,
                &space,
                pools.as_ref(),
                config.loss.negatives_per_positive,
                &mut rng,
            )
            .map_err(|e| match e {
                Error::Sampling(m) => Error::Sampling(format!("epoch {epoch}: {m}")),
                other => other,
            })?;
            grad.clear();
            epoch_loss += loss_and_gradient(&table, batch, &negatives, &config.loss, objective, &mut grad)?;
            let touched: Vec<usize> = grad.touched_entities().to_vec();
            opt_e.step(&mut table.entities, &grad.entities, Some(&touched));
            opt_r.step(&mut table.relations, &grad.relations, Some(grad.touched_relations()));
            if config.normalize_entities {
                for &r in &touched {
                    let mut row = table.entities.row_mut(r);
                    let n = row.dot(&row).sqrt();
                    if n > 0.0 {
                        row /= n;
                    }
                }
            }
        }
        epochs_run = epoch;
        if !epoch_loss.is_finite() || !table.is_finite() {
            return Err(Error::Diverged {
                epoch,
                detail: format!("loss {epoch_loss}"),
            });
        }
        let mut record = EpochRecord {
            epoch,
            loss: epoch_loss,
            valid_hits_at_1: None,
            bootstrapped: 0,
        };
        if epoch % config.eval_every == 0 || epoch == config.max_epochs {
            let hits = validation_hits(&table, &space, &valid_pairs)?;
            record.valid_hits_at_1 = hits;
            // ties refresh the snapshot but still count toward patience
            let (improved, tied) = compare_validation(hits, best.hits);
            if improved || tied {
                best = snapshot(&table, &space, epoch, hits);
            }
            stale = if improved { 0 } else { stale + 1 };
            if stale >= config.patience {
                history.push(record);
                log::info!("early stop at epoch {epoch}, best epoch {}", best.epoch);
                break;
            }
            if method == Method::BootEA {
                record.bootstrapped = bootstrap_round(&table, &mut space, kg1, kg2, seeds, &mut aligned, config)?;
                if record.bootstrapped > 0 {
                    log::debug!("epoch {epoch}: bootstrapped {} pairs", record.bootstrapped);
                }
            }
        }
        history.push(record);
    }

    if config.max_epochs > 0 && best.epoch == 0 && valid_pairs.is_empty() {
        best = snapshot(&table, &space, epochs_run, None);
    }
    let mut final_table = best.table;
    if config.normalize_entities && best.epoch > 0 {
        normalize_rows(&mut final_table.entities);
    }
    Ok(TrainedModel {
        method,
        table: final_table,
        kg1_rows: best.kg1_rows,
        kg2_rows: best.kg2_rows,
        best_epoch: best.epoch,
        epochs_run,
        best_valid_hits_at_1: best.hits,
        history,
        bootstrapped: aligned,
    })
}
