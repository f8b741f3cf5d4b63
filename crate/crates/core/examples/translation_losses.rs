//! Scores and losses of the translation objectives on a hand-made table, and the
//! two ways of drawing negative triples.

use kgalign::kg::KgBuilder;
use kgalign::trans::{
    contrastive_loss, epoch_loss, sample_negatives_truncated, sample_negatives_uniform, score_triple,
    triplet_loss, truncated_pool_size, EmbeddingTable, JointSpace, LossConfig, NeighborPools, Norm, Objective,
    Triple,
};
use ndarray::array;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> kgalign::Result<()> {
    // paris + capital_of = france exactly; berlin is off by one unit
    let table = EmbeddingTable::new(
        array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
        array![[1.0, 0.0]],
    )?;
    let pos = Triple::new(0, 0, 1);
    let neg = Triple::new(2, 0, 1);
    let (fp, fneg) = (score_triple(&table, &pos, Norm::L2)?, score_triple(&table, &neg, Norm::L2)?);
    println!("f(pos) = {fp:.3}, f(neg) = {fneg:.3}");
    println!("triplet loss, gamma 1:           {:.3}", triplet_loss(fp, fneg, 1.0));
    println!("contrastive loss, gammas 0.01/2: {:.3}", contrastive_loss(fp, fneg, 0.01, 2.0));

    let config = LossConfig::default();
    let negatives = vec![vec![kgalign::trans::NegativeTriple { triple: neg, source: pos }]];
    for objective in [Objective::Translation, Objective::Triplet, Objective::Contrastive] {
        let l = epoch_loss(&table, &[pos], &negatives, &config, objective)?;
        println!("{objective:?} batch loss: {l:.3}");
    }

    // negatives on a 10-entity ring
    let mut b = KgBuilder::new();
    for i in 0..10 {
        b.add_rel(&format!("e{i}"), "next", &format!("e{}", (i + 1) % 10));
    }
    let space = JointSpace::single(&b.build());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let emb = EmbeddingTable::random(space.row_count(), space.relation_count(), 8, &mut rng);
    let positive = space.triples()[0];
    let uniform = sample_negatives_uniform(positive, &space, 5, &mut rng)?;
    println!("uniform negatives of {positive:?}:");
    for n in &uniform {
        println!("  {:?}", n.triple);
    }

    let epsilon = 0.7;
    let pools = NeighborPools::build(&emb.entities, space.active_rows(), epsilon)?;
    println!(
        "truncated pools keep the {} nearest of {} entities (epsilon {epsilon})",
        truncated_pool_size(space.active_rows().len(), epsilon),
        space.active_rows().len()
    );
    let truncated = sample_negatives_truncated(positive, &space, &pools, 5, &mut rng)?;
    for n in &truncated {
        println!("  {:?}", n.triple);
    }
    Ok(())
}
