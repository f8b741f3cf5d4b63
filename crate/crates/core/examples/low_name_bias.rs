//! Draw a low-name-bias subset from a dataset where a few pairs have
//! near-identical names, and check how much name matching alone still finds.

use kgalign::lnb::{name_nn_hits_at_1, pair_name_similarity, sample_dataset, SamplerConfig};
use kgalign::synthetic::{name_bias_fixture, NameBiasConfig};

fn main() -> kgalign::Result<()> {
    let fx = name_bias_fixture(&NameBiasConfig::default())?;
    let d = &fx.dataset;
    let config = SamplerConfig {
        num_bins: 10,
        target_pair_count: 940,
        drop_scale: 1.0,
        rng_seed: 0,
    };
    let sampled = sample_dataset(d, &fx.names1, &fx.names2, &config)?;
    let s = &sampled.dataset;

    let before = name_nn_hits_at_1(&d.links, &d.kg1, &d.kg2, &fx.names1, &fx.names2)?;
    let after = name_nn_hits_at_1(&s.links, &s.kg1, &s.kg2, &fx.names1, &fx.names2)?;
    let high = |sims: Vec<f64>| sims.iter().filter(|&&x| x > 0.5).count();
    let high_before = high(pair_name_similarity(&d.links, &d.kg1, &d.kg2, &fx.names1, &fx.names2)?);
    let high_after = high(pair_name_similarity(&s.links, &s.kg1, &s.kg2, &fx.names1, &fx.names2)?);

    println!("pairs: {} -> {}", d.links.len(), s.links.len());
    println!(
        "mean name cosine: {:.4} -> {:.4}",
        sampled.outcome.mean_similarity_before, sampled.outcome.mean_similarity_after
    );
    println!("pairs with name cosine > 0.5: {high_before} -> {high_after}");
    println!("name-only Hits@1: {before:.1} -> {after:.1}");
    println!(
        "degree histogram L1 distance: KG1 {:.3}, KG2 {:.3}",
        sampled.degree_l1_kg1, sampled.degree_l1_kg2
    );
    println!("bin  degrees         size quota drawn dropped kept");
    for b in &sampled.outcome.bins {
        println!(
            "{:>3}  [{:>5.1}, {:>5.1}]  {:>5} {:>5} {:>5} {:>7} {:>4}",
            b.bin, b.degree_lo, b.degree_hi, b.size, b.quota, b.drawn, b.dropped, b.retained
        );
    }
    Ok(())
}
