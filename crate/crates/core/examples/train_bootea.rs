//! BootEA on a twin graph: contrastive loss, epsilon-truncated negatives and
//! bootstrapped pairs merged into the shared space as training proceeds.

use kgalign::kg::{split_seeds, SplitRatios};
use kgalign::matcher::{hits_at_k, similarity_matrix, SimMetric};
use kgalign::optim::OptimizerConfig;
use kgalign::synthetic::{isomorphic_twin, TwinConfig};
use kgalign::trans::{train, Method, TrainConfig};
use ndarray::Axis;

fn main() -> kgalign::Result<()> {
    let data = isomorphic_twin(&TwinConfig::default());
    let seeds = split_seeds(&data.links, SplitRatios::default(), 0)?;
    let config = TrainConfig {
        optimizer: OptimizerConfig::sgd(0.05),
        max_epochs: 300,
        ..TrainConfig::default()
    };
    let model = train(&data.kg1, &data.kg2, &seeds, Method::BootEA, &config)?;

    let test = seeds.test();
    let truth: std::collections::HashSet<_> = test.iter().copied().collect();
    let right = model.bootstrapped.iter().filter(|p| truth.contains(p)).count();
    println!(
        "{} epochs; {} pairs bootstrapped, {right} of them correct",
        model.epochs_run,
        model.bootstrapped.len()
    );
    for r in model.history.iter().filter(|r| r.bootstrapped > 0).take(10) {
        println!("  epoch {:>4}: +{} pairs", r.epoch, r.bootstrapped);
    }

    let rows: Vec<usize> = test.iter().map(|p| p.0.index()).collect();
    let cols: Vec<usize> = test.iter().map(|p| p.1.index()).collect();
    let sim = similarity_matrix(
        model.kg1_embeddings().select(Axis(0), &rows).view(),
        model.kg2_embeddings().select(Axis(0), &cols).view(),
        SimMetric::Cosine,
    )?;
    let gold: Vec<(usize, usize)> = (0..test.len()).map(|i| (i, i)).collect();
    println!("test Hits@1 {:.1}", hits_at_k(&sim, &gold, 1)?);
    Ok(())
}
