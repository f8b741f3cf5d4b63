use std::collections::BTreeMap;

use super::metrics::gold_ranks;
use super::SimilarityMatrix;
use crate::error::Result;

/// Top-1 predictions for every source row of a similarity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentResult {
    /// `top1[row]` is the predicted target column; `None` only when an injective
    /// assignment ran out of targets.
    pub top1: Vec<Option<usize>>,
    /// Rank of the gold counterpart per source row, filled by [`AlignmentResult::with_gold`].
    pub ranks: BTreeMap<usize, usize>,
    pub injective: bool,
}

impl AlignmentResult {
    pub fn with_gold(mut self, sim: &SimilarityMatrix, gold: &[(usize, usize)]) -> Result<Self> {
        let ranks = gold_ranks(sim, gold)?;
        self.ranks = gold.iter().map(|g| g.0).zip(ranks).collect();
        Ok(self)
    }

    pub fn is_correct(&self, row: usize, col: usize) -> bool {
        self.top1.get(row).copied().flatten() == Some(col)
    }

    /// Number of sources predicted onto each target column.
    pub fn target_counts(&self, target_count: usize) -> Vec<usize> {
        let mut counts = vec![0usize; target_count];
        for &c in self.top1.iter().flatten() {
            if c < target_count {
                counts[c] += 1;
            }
        }
        counts
    }

    pub fn is_one_to_one(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.top1.iter().flatten().all(|c| seen.insert(*c))
    }
}

/// Per-row argmax (ties go to the lowest target column), or, when `injective`,
/// a greedy global assignment that repeatedly takes the largest remaining entry
/// whose row and column are both free (ties by row, then column).
pub fn align_top1(sim: &SimilarityMatrix, injective: bool) -> AlignmentResult {
    let (rows, cols) = sim.values.dim();
    let top1 = if !injective {
        sim.values
            .rows()
            .into_iter()
            .map(|r| {
                let mut best: Option<(usize, f64)> = None;
                for (j, &v) in r.iter().enumerate() {
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((j, v));
                    }
                }
                best.map(|(j, _)| j)
            })
            .collect()
    } else {
        let mut entries: Vec<(usize, usize)> = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
        entries.sort_by(|&(i1, j1), &(i2, j2)| {
            sim.values[[i2, j2]]
                .total_cmp(&sim.values[[i1, j1]])
                .then(i1.cmp(&i2))
                .then(j1.cmp(&j2))
        });
        let mut top1 = vec![None; rows];
        let mut col_used = vec![false; cols];
        let mut assigned = 0;
        for (i, j) in entries {
            if assigned == rows.min(cols) {
                break;
            }
            if top1[i].is_none() && !col_used[j] {
                top1[i] = Some(j);
                col_used[j] = true;
                assigned += 1;
            }
        }
        top1
    };
    AlignmentResult {
        top1,
        ranks: BTreeMap::new(),
        injective,
    }
}
