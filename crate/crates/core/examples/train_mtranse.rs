//! Recover the alignment of a graph and its renamed copy with MTransE and
//! IPTransE, and report test Hits@1 from the stored snapshot.
//!
//! ```text
//! cargo run --release --example train_mtranse [-- <seed>]
//! ```

use kgalign::kg::{split_seeds, SplitRatios};
use kgalign::matcher::{hits_at_k, mrr, similarity_matrix, SimMetric};
use kgalign::optim::OptimizerConfig;
use kgalign::synthetic::{isomorphic_twin, TwinConfig};
use kgalign::trans::{train, Method, TrainConfig};
use ndarray::Axis;

fn main() -> kgalign::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let data = isomorphic_twin(&TwinConfig {
        rng_seed: seed,
        ..TwinConfig::default()
    });
    let seeds = split_seeds(&data.links, SplitRatios::default(), seed)?;
    let test = seeds.test();
    let rows: Vec<usize> = test.iter().map(|p| p.0.index()).collect();
    let cols: Vec<usize> = test.iter().map(|p| p.1.index()).collect();
    let gold: Vec<(usize, usize)> = (0..test.len()).map(|i| (i, i)).collect();

    for method in [Method::MTransE, Method::IPTransE] {
        let config = TrainConfig {
            optimizer: OptimizerConfig::sgd(0.1),
            rng_seed: seed,
            ..TrainConfig::default()
        };
        let model = train(&data.kg1, &data.kg2, &seeds, method, &config)?;
        let e1 = model.kg1_embeddings().select(Axis(0), &rows);
        let e2 = model.kg2_embeddings().select(Axis(0), &cols);
        let sim = similarity_matrix(e1.view(), e2.view(), SimMetric::Cosine)?;
        println!(
            "{}: {} epochs, snapshot {} (valid Hits@1 {:?}); test Hits@1 {:.1}, MRR {:.3}",
            method.name(),
            model.epochs_run,
            model.best_epoch,
            model.best_valid_hits_at_1,
            hits_at_k(&sim, &gold, 1)?,
            mrr(&sim, &gold)?
        );
        let valid: Vec<String> = model
            .history
            .iter()
            .filter_map(|r| r.valid_hits_at_1.map(|h| format!("{h:.0}")))
            .collect();
        println!("  validation Hits@1 per check: {}", valid.join(" "));
    }
    Ok(())
}
