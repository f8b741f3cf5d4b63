//! Ranking metrics over a similarity matrix and the hubness score.
//!
//! Gold pairs are `(row, column)` indices into the matrix. The rank of a gold
//! column is `1 + #{strictly greater entries} + #{equal entries in a lower column}`,
//! which agrees with the lowest-column tie rule of [`super::align_top1`].

use super::{AlignmentResult, SimilarityMatrix};
use crate::error::{Error, Result};

fn check_gold(sim: &SimilarityMatrix, gold: &[(usize, usize)]) -> Result<()> {
    if gold.is_empty() {
        return Err(Error::Evaluation("no gold pairs to evaluate".into()));
    }
    for &(r, c) in gold {
        if r >= sim.rows() || c >= sim.cols() {
            return Err(Error::Evaluation(format!(
                "gold pair ({r}, {c}) outside a {}x{} similarity matrix",
                sim.rows(),
                sim.cols()
            )));
        }
    }
    Ok(())
}

pub fn rank_of(sim: &SimilarityMatrix, row: usize, col: usize) -> usize {
    let r = sim.values.row(row);
    let g = r[col];
    1 + r
        .iter()
        .enumerate()
        .filter(|&(j, &v)| v > g || (v == g && j < col))
        .count()
}

pub fn gold_ranks(sim: &SimilarityMatrix, gold: &[(usize, usize)]) -> Result<Vec<usize>> {
    check_gold(sim, gold)?;
    Ok(gold.iter().map(|&(r, c)| rank_of(sim, r, c)).collect())
}

/// Percentage of gold rows whose counterpart ranks within the top `k`.
pub fn hits_at_k(sim: &SimilarityMatrix, gold: &[(usize, usize)], k: usize) -> Result<f64> {
    let ranks = gold_ranks(sim, gold)?;
    Ok(hits_from_ranks(&ranks, k))
}

pub fn hits_from_ranks(ranks: &[usize], k: usize) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    100.0 * ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64
}

pub fn mrr(sim: &SimilarityMatrix, gold: &[(usize, usize)]) -> Result<f64> {
    let ranks = gold_ranks(sim, gold)?;
    Ok(mrr_from_ranks(&ranks))
}

pub fn mrr_from_ranks(ranks: &[usize]) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64
}

/// Number of hubs that make up the top 10%: `ceil(0.1 n)`.
pub fn hub_set_size(target_entity_count: usize) -> usize {
    // integer ceiling of n / 10, so 0.1 * n never lands a hair above an integer
    target_entity_count.div_ceil(10)
}

/// Hubness score: the share of all target entities' alignment mass held by the
/// largest 10% of hubs.
///
/// `hub(z) = |{s : top1(s) = z}| / target_entity_count`; the hub set takes the
/// `ceil(0.1 n)` targets with the largest hub value (ties to the lowest id), and
/// the score is the sum of their hub values.
pub fn h_score(result: &AlignmentResult, target_entity_count: usize) -> f64 {
    if target_entity_count == 0 {
        return 0.0;
    }
    let mut counts: Vec<(usize, usize)> = result
        .target_counts(target_entity_count)
        .into_iter()
        .enumerate()
        .collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let top: usize = counts
        .iter()
        .take(hub_set_size(target_entity_count))
        .map(|(_, c)| *c)
        .sum();
    top as f64 / target_entity_count as f64
}
