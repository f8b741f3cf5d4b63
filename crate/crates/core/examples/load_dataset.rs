//! Write a dataset directory, load it back and split its links.
//!
//! ```text
//! cargo run --example load_dataset [-- <dataset dir>]
//! ```
//!
//! Without an argument a synthetic twin is written to a temporary directory
//! first. A dataset directory holds `rel_triples_1`, `rel_triples_2`,
//! `attr_triples_1`, `attr_triples_2` and `ent_links`, all tab separated.

use kgalign::kg::{dataset_stats, split_seeds, Dataset, SplitRatios};
use kgalign::synthetic::{isomorphic_twin, TwinConfig};

fn main() -> kgalign::Result<()> {
    let dir = match std::env::args().nth(1) {
        Some(d) => d.into(),
        None => isomorphic_twin(&TwinConfig::default()).write(std::env::temp_dir().join("kgalign-twin"))?,
    };
    let data = Dataset::load(&dir)?;
    println!("{}", dir.display());
    for (side, kg) in [("KG1", &data.kg1), ("KG2", &data.kg2)] {
        let s = dataset_stats(kg);
        let max_degree = s.degree_histogram.keys().last().copied().unwrap_or(0);
        println!(
            "{side}: {} entities, {} relations, {} attributes, {} relation triples, {} attribute triples, max degree {max_degree}",
            s.entity_count, s.relation_count, s.attribute_count, s.rel_triple_count, s.attr_triple_count
        );
    }

    let seeds = split_seeds(&data.links, SplitRatios::default(), 0)?;
    println!(
        "{} links: {} train / {} valid / {} test",
        seeds.len(),
        seeds.train().len(),
        seeds.valid().len(),
        seeds.test().len()
    );
    let (a, b) = seeds.train()[0];
    println!("first training pair: {} = {}", data.kg1.entity_name(a)?, data.kg2.entity_name(b)?);
    Ok(())
}
