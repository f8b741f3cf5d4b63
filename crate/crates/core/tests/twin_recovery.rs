//! Recovery of a graph's renamed copy with single channels and the bootstrapping
//! variant.

use std::collections::HashSet;

use kgalign::gcn::{train_gcnalign, GcnConfig};
use kgalign::kg::{split_seeds, SplitRatios};
use kgalign::matcher::{hits_at_k, similarity_matrix, SimMetric};
use kgalign::optim::OptimizerConfig;
use kgalign::synthetic::{isomorphic_twin, TwinConfig};
use kgalign::trans::{train, Method, TrainConfig};
use ndarray::Axis;

#[test]
fn structure_channel_alone_recovers_the_twin() {
    let data = isomorphic_twin(&TwinConfig::default());
    let seeds = split_seeds(&data.links, SplitRatios::default(), 0).unwrap();
    let config = GcnConfig {
        use_attributes: false,
        ..GcnConfig::default()
    };
    let model = train_gcnalign(&data.kg1, &data.kg2, &seeds, &config).unwrap();
    assert!(model.attribute.is_none());
    let (left, right): (Vec<_>, Vec<_>) = seeds.test().into_iter().unzip();
    let gold: Vec<(usize, usize)> = (0..left.len()).map(|i| (i, i)).collect();
    let test = hits_at_k(&model.similarity(&left, &right).unwrap(), &gold, 1).unwrap();
    let valid = model.best_valid_hits_at_1.unwrap_or(0.0);
    assert!(test >= 80.0 || valid >= 80.0, "test {test}, validation {valid}");
}

#[test]
fn bootea_on_the_twin_proposes_correct_one_to_one_pairs() {
    let data = isomorphic_twin(&TwinConfig::default());
    let seeds = split_seeds(&data.links, SplitRatios::default(), 0).unwrap();
    let config = TrainConfig {
        optimizer: OptimizerConfig::sgd(0.1),
        max_epochs: 200,
        ..TrainConfig::default()
    };
    let model = train(&data.kg1, &data.kg2, &seeds, Method::BootEA, &config).unwrap();
    let train_pairs: HashSet<_> = seeds.train().into_iter().collect();
    let lefts: HashSet<_> = model.bootstrapped.iter().map(|p| p.0).collect();
    let rights: HashSet<_> = model.bootstrapped.iter().map(|p| p.1).collect();
    assert_eq!(lefts.len(), model.bootstrapped.len());
    assert_eq!(rights.len(), model.bootstrapped.len());
    assert!(model.bootstrapped.iter().all(|p| !train_pairs.contains(p)));

    let test = seeds.test();
    let rows: Vec<usize> = test.iter().map(|p| p.0.index()).collect();
    let cols: Vec<usize> = test.iter().map(|p| p.1.index()).collect();
    let sim = similarity_matrix(
        model.kg1_embeddings().select(Axis(0), &rows).view(),
        model.kg2_embeddings().select(Axis(0), &cols).view(),
        SimMetric::Cosine,
    )
    .unwrap();
    let gold: Vec<(usize, usize)> = (0..test.len()).map(|i| (i, i)).collect();
    let hits = hits_at_k(&sim, &gold, 1).unwrap();
    assert!(hits >= 50.0, "BootEA test Hits@1 {hits}");
}
