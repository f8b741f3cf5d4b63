//! Analytic gradients against central finite differences.
//!
//! Each check returns the relative error of every gradient it compares, on
//! fixtures where some hinges are active and some are not.

use kgalign::gcn::{
    gcn_backward, gcn_forward, gcn_forward_cached, margin_alignment_loss, margin_alignment_loss_grad, Features,
    GcnParameters, SparseMatrix,
};
use kgalign::trans::{
    epoch_loss, loss_and_gradient, score_triple, EmbeddingTable, LossConfig, NegativeTriple, Norm, Objective,
    TranslationGrad, Triple,
};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-6;
pub const TOLERANCE: f64 = 1e-4;

fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let a: f64 = analytic.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n: f64 = numeric.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / a.max(n).max(1e-12)
}

/// Central differences of `f` over every entry of `param`.
fn numeric_grad(param: &mut Array2<f64>, mut f: impl FnMut(&Array2<f64>) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(param.len());
    for i in 0..param.nrows() {
        for j in 0..param.ncols() {
            let x = param[[i, j]];
            param[[i, j]] = x + H;
            let up = f(param);
            param[[i, j]] = x - H;
            let down = f(param);
            param[[i, j]] = x;
            out.push((up - down) / (2.0 * H));
        }
    }
    out
}

/// A threshold halfway between the two middle values, so hinges split into active
/// and inactive ones with no argument near zero.
fn split_point(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    (v[m - 1] + v[m]) / 2.0
}

struct TransFixture {
    table: EmbeddingTable,
    positives: Vec<Triple>,
    negatives: Vec<Vec<NegativeTriple>>,
}

fn trans_fixture() -> TransFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let table = EmbeddingTable::random(10, 3, 6, &mut rng);
    let triple = |rng: &mut ChaCha8Rng| Triple::new(rng.gen_range(0..10), rng.gen_range(0..3), rng.gen_range(0..10));
    let positives: Vec<Triple> = (0..8).map(|_| triple(&mut rng)).collect();
    let negatives = positives
        .iter()
        .map(|&p| {
            (0..3)
                .map(|_| NegativeTriple {
                    triple: triple(&mut rng),
                    source: p,
                })
                .collect()
        })
        .collect();
    TransFixture {
        table,
        positives,
        negatives,
    }
}

fn trans_config(objective: Objective, fx: &TransFixture) -> LossConfig {
    let score = |t: &Triple| score_triple(&fx.table, t, Norm::L2).unwrap();
    match objective {
        Objective::Translation => LossConfig::default(),
        Objective::Triplet => {
            let margins: Vec<f64> = fx
                .positives
                .iter()
                .zip(&fx.negatives)
                .flat_map(|(p, ns)| ns.iter().map(move |n| (p, n)))
                .map(|(p, n)| score(&n.triple) - score(p))
                .collect();
            let gamma = split_point(margins.clone());
            assert!(margins.iter().any(|&m| gamma > m) && margins.iter().any(|&m| gamma < m));
            LossConfig {
                gamma,
                beta: 0.7,
                norm: Norm::L2,
                ..LossConfig::default()
            }
        }
        Objective::Contrastive => {
            let pos: Vec<f64> = fx.positives.iter().map(score).collect();
            let neg: Vec<f64> = fx.negatives.iter().flatten().map(|n| score(&n.triple)).collect();
            LossConfig {
                gamma1: split_point(pos),
                gamma2: split_point(neg),
                beta: 1.3,
                norm: Norm::L2,
                ..LossConfig::default()
            }
        }
    }
}

/// Relative errors of the entity and relation gradients of `epoch_loss`.
pub fn translation_errors(objective: Objective) -> [f64; 2] {
    let mut fx = trans_fixture();
    let config = trans_config(objective, &fx);
    let mut grad = TranslationGrad::for_table(&fx.table);
    loss_and_gradient(&fx.table, &fx.positives, &fx.negatives, &config, objective, &mut grad).unwrap();

    let (positives, negatives) = (fx.positives.clone(), fx.negatives.clone());
    let relations = fx.table.relations.clone();
    let num_entities = numeric_grad(&mut fx.table.entities, |e| {
        let t = EmbeddingTable::new(e.clone(), relations.clone()).unwrap();
        epoch_loss(&t, &positives, &negatives, &config, objective).unwrap()
    });
    let entities = fx.table.entities.clone();
    let num_relations = numeric_grad(&mut fx.table.relations, |r| {
        let t = EmbeddingTable::new(entities.clone(), r.clone()).unwrap();
        epoch_loss(&t, &positives, &negatives, &config, objective).unwrap()
    });
    [
        relative_error(grad.entities.as_slice().unwrap(), &num_entities),
        relative_error(grad.relations.as_slice().unwrap(), &num_relations),
    ]
}

fn six_node_adjacency() -> SparseMatrix {
    // two triangles, one per graph, with uneven edge weights and self-loops
    let mut t = Vec::new();
    for (a, b, w) in [(0, 1, 1.0), (1, 2, 0.5), (0, 2, 2.0), (3, 4, 1.0), (4, 5, 0.5), (3, 5, 2.0)] {
        t.push((a, b, w));
        t.push((b, a, w));
    }
    t.extend((0..6).map(|i| (i, i, 1.0)));
    SparseMatrix::from_triplets(6, 6, t).unwrap().row_normalized()
}

const POSITIVES: [(usize, usize); 2] = [(0, 3), (1, 4)];

fn negatives() -> Vec<Vec<(usize, usize)>> {
    vec![vec![(0, 4), (2, 3)], vec![(1, 5), (0, 4)]]
}

fn channel_loss(adj: &SparseMatrix, features: &Features, params: &GcnParameters, margin: f64) -> f64 {
    let out = gcn_forward(adj, features, params).unwrap();
    margin_alignment_loss(&out, &POSITIVES, &negatives(), margin).unwrap()
}

fn hinge_split_margin(adj: &SparseMatrix, features: &Features, params: &GcnParameters) -> f64 {
    let out = gcn_forward(adj, features, params).unwrap();
    let l1 = |a: usize, b: usize| -> f64 { out.row(a).iter().zip(out.row(b)).map(|(x, y)| (x - y).abs()).sum() };
    let gaps: Vec<f64> = POSITIVES
        .iter()
        .zip(negatives())
        .flat_map(|(&(a, b), ns)| ns.into_iter().map(move |(c, d)| (a, b, c, d)))
        .map(|(a, b, c, d)| l1(c, d) - l1(a, b))
        .collect();
    split_point(gaps)
}

/// Relative errors of every layer's weight gradient, then of the feature
/// gradient when the features are dense.
fn channel_errors(features: Features, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adj = six_node_adjacency();
    let params = GcnParameters::glorot(&[features.cols(), 4, 3], &mut rng);
    let margin = hinge_split_margin(&adj, &features, &params);

    let cache = gcn_forward_cached(&adj, &features, &params).unwrap();
    let (_, grad_out) = margin_alignment_loss_grad(&cache.output, &POSITIVES, &negatives(), margin).unwrap();
    let grads = gcn_backward(&adj.transpose(), &features, &params, &cache, &grad_out).unwrap();

    let mut errors = Vec::new();
    for layer in 0..params.weights.len() {
        let mut w = params.weights[layer].clone();
        let numeric = numeric_grad(&mut w, |w| {
            let mut p = params.clone();
            p.weights[layer] = w.clone();
            channel_loss(&adj, &features, &p, margin)
        });
        errors.push(relative_error(grads.weights[layer].as_slice().unwrap(), &numeric));
    }
    match &features {
        Features::Dense(x) => {
            let mut x = x.clone();
            let numeric = numeric_grad(&mut x, |x| channel_loss(&adj, &Features::Dense(x.clone()), &params, margin));
            let analytic = grads.features.as_ref().expect("dense features get a gradient");
            errors.push(relative_error(analytic.as_slice().unwrap(), &numeric));
        }
        Features::Sparse(_) => assert!(grads.features.is_none()),
    }
    errors
}

pub fn structure_channel_errors() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = Array2::from_shape_simple_fn((6, 5), || rng.gen_range(-1.0..1.0));
    channel_errors(Features::Dense(x), 12)
}

pub fn attribute_channel_errors() -> Vec<f64> {
    let cells = vec![
        (0, 0, 0.6),
        (0, 2, 0.8),
        (1, 1, 1.0),
        (2, 0, 0.3),
        (2, 3, 0.95),
        (3, 0, 0.6),
        (3, 2, 0.8),
        (4, 1, 1.0),
        (5, 3, 1.0),
    ];
    channel_errors(Features::Sparse(SparseMatrix::from_triplets(6, 4, cells).unwrap()), 13)
}
