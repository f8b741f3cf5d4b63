//! A planted hub: one target vector close to many sources. Plain nearest-neighbour
//! search sends a crowd of sources to it; CSLS rescaling spreads them back out.

use kgalign::matcher::{align_top1, csls_rescale, h_score, hits_at_k, similarity_matrix, SimMetric};
use kgalign::synthetic::{planted_hub, HubConfig};

fn main() -> kgalign::Result<()> {
    let config = HubConfig::default();
    let fx = planted_hub(&config);
    let n = config.entities;
    let sim = similarity_matrix(fx.sources.view(), fx.targets.view(), SimMetric::Cosine)?;
    let gold: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for (label, s) in [("nearest neighbour", sim.clone()), ("CSLS, k = 10", csls_rescale(&sim, 10)?)] {
        let result = align_top1(&s, false);
        println!(
            "{label:>18}: Hits@1 {:5.1}  h-score {:.3}  sources sent to the hub {}",
            hits_at_k(&s, &gold, 1)?,
            h_score(&result, n),
            result.target_counts(n)[fx.hub]
        );
    }
    Ok(())
}
