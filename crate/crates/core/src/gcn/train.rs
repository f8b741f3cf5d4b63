use indexmap::IndexMap;
use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    build_adjacency, gcn_backward, gcn_forward_cached, margin_alignment_loss_grad, AdjacencyMode, Features,
    GcnParameters, SparseMatrix, WeightedAdjacency,
};
use crate::error::{Error, Result};
use crate::kg::{EntityId, KnowledgeGraph, SeedAlignment};
use crate::matcher::{combined_similarity, hits_at_k, similarity_matrix, SimMetric, SimilarityMatrix};
use crate::optim::{OptimizerConfig, ParamOptimizer};
use crate::trans::compare_validation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcnConfig {
    pub dim: usize,
    pub structure_margin: f64,
    pub attribute_margin: f64,
    /// weight of the structure similarity in the combined similarity
    pub mix: f64,
    pub negatives_per_positive: usize,
    pub optimizer: OptimizerConfig,
    pub max_epochs: usize,
    pub eval_every: usize,
    pub patience: usize,
    pub use_attributes: bool,
    /// structure-channel features start uniform in `±scale * sqrt(6 / (n + dim))`
    pub feature_init_scale: f64,
    /// graph the attribute channel convolves over
    pub attribute_graph: AdjacencyMode,
    pub rng_seed: u64,
}

impl Default for GcnConfig {
    fn default() -> Self {
        GcnConfig {
            dim: 100,
            structure_margin: 3.0,
            attribute_margin: 3.0,
            mix: 0.9,
            negatives_per_positive: 5,
            optimizer: OptimizerConfig::sgd(0.001),
            max_epochs: 1000,
            eval_every: 10,
            patience: 10,
            use_attributes: true,
            feature_init_scale: 0.01,
            attribute_graph: AdjacencyMode::Structure,
            rng_seed: 0,
        }
    }
}

impl GcnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.dim == 0 || self.eval_every == 0 || self.patience == 0 || self.negatives_per_positive == 0 {
            return bad("dim, eval_every, patience and negatives_per_positive must be positive".into());
        }
        if !(self.feature_init_scale > 0.0 && self.feature_init_scale.is_finite()) {
            return bad(format!("feature_init_scale must be positive, got {}", self.feature_init_scale));
        }
        if !(self.structure_margin >= 0.0 && self.attribute_margin >= 0.0) {
            return bad("margins must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.mix) {
            return bad(format!("mix must lie in [0, 1], got {}", self.mix));
        }
        if !(self.optimizer.learning_rate() > 0.0) {
            return bad("learning rate must be positive".into());
        }
        Ok(())
    }
}

/// Attribute-channel inputs: one column per attribute name of either graph, holding
/// `ln(|T_attr| / count(a))` for the attributes an entity has; rows L2-normalized.
/// KG2 entities follow KG1 entities.
pub fn attribute_features(kg1: &KnowledgeGraph, kg2: &KnowledgeGraph) -> SparseMatrix {
    let mut columns: IndexMap<&str, usize> = IndexMap::new();
    let sides = [(kg1, 0usize), (kg2, kg1.entity_count())];
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for (kg, off) in sides {
        for t in kg.attr_triples() {
            let name = kg.attributes().name(t.attribute.index()).expect("attribute id in range");
            let next = columns.len();
            let c = *columns.entry(name).or_insert(next);
            cells.push((off + t.entity.index(), c));
        }
    }
    let total = cells.len();
    let mut counts = vec![0usize; columns.len()];
    for &(_, c) in &cells {
        counts[c] += 1;
    }
    cells.sort_unstable();
    cells.dedup();
    let n = kg1.entity_count() + kg2.entity_count();
    let mut entries: Vec<(usize, usize, f64)> = cells
        .into_iter()
        .map(|(r, c)| (r, c, (total as f64 / counts[c] as f64).ln()))
        .collect();
    let mut norms = vec![0.0; n];
    for &(r, _, v) in &entries {
        norms[r] += v * v;
    }
    for e in entries.iter_mut() {
        let s = norms[e.0].sqrt();
        if s > 0.0 {
            e.2 /= s;
        }
    }
    SparseMatrix::from_triplets(n, columns.len(), entries).expect("cells in range")
}

struct Channel {
    adj: SparseMatrix,
    adj_t: SparseMatrix,
    features: Features,
    params: GcnParameters,
    margin: f64,
    weight_opts: Vec<ParamOptimizer>,
    feature_opt: Option<ParamOptimizer>,
}

impl Channel {
    fn new<R: Rng>(adj: &WeightedAdjacency, features: Features, config: &GcnConfig, margin: f64, rng: &mut R) -> Self {
        let params = GcnParameters::glorot(&[features.cols(), config.dim, config.dim], rng);
        let weight_opts = params
            .weights
            .iter()
            .map(|w| ParamOptimizer::new(config.optimizer, w.dim()))
            .collect();
        let feature_opt = match &features {
            Features::Dense(x) => Some(ParamOptimizer::new(config.optimizer, x.dim())),
            Features::Sparse(_) => None,
        };
        Channel {
            adj: adj.normalized.clone(),
            adj_t: adj.normalized.transpose(),
            features,
            params,
            margin,
            weight_opts,
            feature_opt,
        }
    }

    fn output(&self) -> Result<Array2<f64>> {
        Ok(gcn_forward_cached(&self.adj, &self.features, &self.params)?.output)
    }

    fn step(&mut self, positives: &[(usize, usize)], negatives: &[Vec<(usize, usize)>]) -> Result<f64> {
        let cache = gcn_forward_cached(&self.adj, &self.features, &self.params)?;
        let (loss, grad) = margin_alignment_loss_grad(&cache.output, positives, negatives, self.margin)?;
        let grads = gcn_backward(&self.adj_t, &self.features, &self.params, &cache, &grad)?;
        for ((w, g), opt) in self.params.weights.iter_mut().zip(&grads.weights).zip(&mut self.weight_opts) {
            opt.step(w, g, None);
        }
        if let (Features::Dense(x), Some(g), Some(opt)) = (&mut self.features, &grads.features, &mut self.feature_opt) {
            opt.step(x, g, None);
        }
        Ok(loss)
    }

    fn is_finite(&self) -> bool {
        self.params.is_finite()
            && match &self.features {
                Features::Dense(x) => x.iter().all(|v| v.is_finite()),
                Features::Sparse(_) => true,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcnEpochRecord {
    pub epoch: usize,
    pub structure_loss: f64,
    pub attribute_loss: Option<f64>,
    pub valid_hits_at_1: Option<f64>,
}

/// Output embeddings of both channels; KG1 rows first, then KG2 rows.
#[derive(Debug, Clone)]
pub struct GcnModel {
    pub structure: Array2<f64>,
    pub attribute: Option<Array2<f64>>,
    pub kg1_entities: usize,
    pub mix: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub best_valid_hits_at_1: Option<f64>,
    pub history: Vec<GcnEpochRecord>,
}

impl GcnModel {
    fn split(&self, m: &Array2<f64>, kg2: bool) -> Array2<f64> {
        let (a, b) = m.view().split_at(Axis(0), self.kg1_entities);
        if kg2 { b.to_owned() } else { a.to_owned() }
    }

    pub fn kg1_structure(&self) -> Array2<f64> {
        self.split(&self.structure, false)
    }

    pub fn kg2_structure(&self) -> Array2<f64> {
        self.split(&self.structure, true)
    }

    pub fn kg1_attribute(&self) -> Option<Array2<f64>> {
        self.attribute.as_ref().map(|m| self.split(m, false))
    }

    pub fn kg2_attribute(&self) -> Option<Array2<f64>> {
        self.attribute.as_ref().map(|m| self.split(m, true))
    }

    /// Negated-L1 similarity between KG1 entities `left` and KG2 entities `right`,
    /// mixing the two channels with `self.mix`.
    pub fn similarity(&self, left: &[EntityId], right: &[EntityId]) -> Result<SimilarityMatrix> {
        pair_similarity(&self.structure, self.attribute.as_ref(), self.kg1_entities, left, right, self.mix)
    }
}

fn pair_similarity(
    structure: &Array2<f64>,
    attribute: Option<&Array2<f64>>,
    n1: usize,
    left: &[EntityId],
    right: &[EntityId],
    mix: f64,
) -> Result<SimilarityMatrix> {
    let l: Vec<usize> = left.iter().map(|e| e.index()).collect();
    let r: Vec<usize> = right.iter().map(|e| n1 + e.index()).collect();
    if let Some(&bad) = l.iter().chain(&r).find(|&&i| i >= structure.nrows()) {
        return Err(Error::Lookup {
            kind: "entity row",
            key: bad.to_string(),
        });
    }
    let sim = |m: &Array2<f64>| {
        similarity_matrix(m.select(Axis(0), &l).view(), m.select(Axis(0), &r).view(), SimMetric::NegL1)
    };
    let s = sim(structure)?;
    match attribute {
        Some(a) => combined_similarity(&s, &sim(a)?, mix),
        None => Ok(s),
    }
}

fn draw_negatives<R: Rng>(
    positives: &[(usize, usize)],
    n1: usize,
    n2: usize,
    k: usize,
    rng: &mut R,
) -> Vec<Vec<(usize, usize)>> {
    positives
        .iter()
        .map(|&(a, b)| {
            (0..k)
                .map(|_| {
                    if rng.gen_bool(0.5) && n2 > 1 {
                        let mut c = b;
                        while c == b {
                            c = n1 + rng.gen_range(0..n2);
                        }
                        (a, c)
                    } else if n1 > 1 {
                        let mut c = a;
                        while c == a {
                            c = rng.gen_range(0..n1);
                        }
                        (c, b)
                    } else {
                        (a, b)
                    }
                })
                .collect()
        })
        .collect()
}

/// Trains the structure and attribute channels on the block-diagonal graph of
/// both KGs. Each channel has its own optimizers and takes one full-batch step
/// per epoch on the margin loss over train seeds. Validation Hits@1 of the mixed
/// similarity drives early stopping as in the translation trainer.
pub fn train_gcnalign(
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
    seeds: &SeedAlignment,
    config: &GcnConfig,
) -> Result<GcnModel> {
    config.validate()?;
    let train = seeds.train();
    if train.is_empty() {
        return Err(Error::Config("training needs at least one train seed pair".into()));
    }
    let (n1, n2) = (kg1.entity_count(), kg2.entity_count());
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let structure_adj = WeightedAdjacency::block_diagonal(
        &build_adjacency(kg1, AdjacencyMode::Structure),
        &build_adjacency(kg2, AdjacencyMode::Structure),
    )?;
    let bound = config.feature_init_scale * (6.0 / (n1 + n2 + config.dim) as f64).sqrt();
    let x = Array2::from_shape_simple_fn((n1 + n2, config.dim), || rng.gen_range(-bound..=bound));
    let mut structure = Channel::new(&structure_adj, Features::Dense(x), config, config.structure_margin, &mut rng);

    let attr_x = attribute_features(kg1, kg2);
    let mut attribute = if config.use_attributes && attr_x.cols() > 0 {
        let adj = match config.attribute_graph {
            AdjacencyMode::Structure => structure_adj.clone(),
            AdjacencyMode::Attribute => WeightedAdjacency::block_diagonal(
                &build_adjacency(kg1, AdjacencyMode::Attribute),
                &build_adjacency(kg2, AdjacencyMode::Attribute),
            )?,
        };
        Some(Channel::new(&adj, Features::Sparse(attr_x), config, config.attribute_margin, &mut rng))
    } else {
        None
    };

    let positives: Vec<(usize, usize)> = train.iter().map(|&(a, b)| (a.index(), n1 + b.index())).collect();
    let valid = seeds.valid();
    let (vl, vr): (Vec<EntityId>, Vec<EntityId>) = valid.iter().copied().unzip();
    let gold: Vec<(usize, usize)> = (0..valid.len()).map(|i| (i, i)).collect();
    let evaluate = |s: &Array2<f64>, a: Option<&Array2<f64>>| -> Result<Option<f64>> {
        if valid.is_empty() {
            return Ok(None);
        }
        let sim = pair_similarity(s, a, n1, &vl, &vr, config.mix)?;
        Ok(Some(hits_at_k(&sim, &gold, 1)?))
    };

    let mut best_s = structure.output()?;
    let mut best_a = attribute.as_ref().map(Channel::output).transpose()?;
    let mut best_hits = evaluate(&best_s, best_a.as_ref())?;
    let mut best_epoch = 0;
    let mut stale = 0;
    let mut epochs_run = 0;
    let mut history = Vec::new();

    for epoch in 1..=config.max_epochs {
        let negatives = draw_negatives(&positives, n1, n2, config.negatives_per_positive, &mut rng);
        let s_loss = structure.step(&positives, &negatives)?;
        let a_loss = attribute.as_mut().map(|c| c.step(&positives, &negatives)).transpose()?;
        epochs_run = epoch;
        let finite = s_loss.is_finite()
            && structure.is_finite()
            && a_loss.is_none_or(f64::is_finite)
            && attribute.as_ref().is_none_or(Channel::is_finite);
        if !finite {
            return Err(Error::Diverged {
                epoch,
                detail: format!("structure loss {s_loss}, attribute loss {a_loss:?}"),
            });
        }
        let mut record = GcnEpochRecord {
            epoch,
            structure_loss: s_loss,
            attribute_loss: a_loss,
            valid_hits_at_1: None,
        };
        if epoch % config.eval_every == 0 || epoch == config.max_epochs {
            let s = structure.output()?;
            let a = attribute.as_ref().map(Channel::output).transpose()?;
            let finite = |m: &Array2<f64>| m.iter().all(|v| v.is_finite());
            if !finite(&s) || a.as_ref().is_some_and(|a| !finite(a)) {
                return Err(Error::Diverged {
                    epoch,
                    detail: "non-finite output embeddings".into(),
                });
            }
            let hits = evaluate(&s, a.as_ref())?;
            record.valid_hits_at_1 = hits;
            let (improved, tied) = compare_validation(hits, best_hits);
            if improved || tied {
                best_s = s;
                best_a = a;
                best_hits = hits;
                best_epoch = epoch;
            }
            stale = if improved { 0 } else { stale + 1 };
            history.push(record);
            if stale >= config.patience {
                log::info!("early stop at epoch {epoch}, best epoch {best_epoch}");
                break;
            }
            continue;
        }
        history.push(record);
    }

    Ok(GcnModel {
        structure: best_s,
        attribute: best_a,
        kg1_entities: n1,
        mix: config.mix,
        best_epoch,
        epochs_run,
        best_valid_hits_at_1: best_hits,
        history,
    })
}
