use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::kg::EntityId;
use crate::matcher::SimilarityMatrix;

/// Grows `train` with confident mutual nearest neighbours.
///
/// `sim` rows correspond to `row_ids` (KG1 entities) and columns to `col_ids`
/// (KG2 entities). Entities already in `train` are skipped. Each round pairs every
/// still-free row with its best free column when the two are mutual nearest
/// neighbours and their similarity reaches `threshold`; candidates are taken in
/// descending similarity so the result stays one-to-one. Rounds continue until
/// nothing is added or `max_rounds` is reached. The returned list starts with
/// `train` unchanged.
pub fn bootstrap_augment(
    sim: &SimilarityMatrix,
    row_ids: &[EntityId],
    col_ids: &[EntityId],
    train: &[(EntityId, EntityId)],
    threshold: f64,
    max_rounds: usize,
) -> Result<Vec<(EntityId, EntityId)>> {
    if row_ids.len() != sim.rows() || col_ids.len() != sim.cols() {
        return Err(Error::Shape(format!(
            "{}x{} ids for a {}x{} similarity matrix",
            row_ids.len(),
            col_ids.len(),
            sim.rows(),
            sim.cols()
        )));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!("bootstrap threshold must lie in (0, 1], got {threshold}")));
    }
    let taken_left: HashSet<EntityId> = train.iter().map(|p| p.0).collect();
    let taken_right: HashSet<EntityId> = train.iter().map(|p| p.1).collect();
    let mut row_free: Vec<bool> = row_ids.iter().map(|e| !taken_left.contains(e)).collect();
    let mut col_free: Vec<bool> = col_ids.iter().map(|e| !taken_right.contains(e)).collect();
    let mut out = train.to_vec();

    let best = |free: &[bool], n: usize, value: &dyn Fn(usize) -> f64| -> Option<usize> {
        let mut arg: Option<usize> = None;
        for j in (0..n).filter(|&j| free[j]) {
            if arg.is_none_or(|a| value(j) > value(a)) {
                arg = Some(j);
            }
        }
        arg
    };

    for _ in 0..max_rounds {
        let mut found: Vec<(f64, usize, usize)> = Vec::new();
        for i in (0..sim.rows()).filter(|&i| row_free[i]) {
            let Some(j) = best(&col_free, sim.cols(), &|j| sim.get(i, j)) else {
                break;
            };
            let back = best(&row_free, sim.rows(), &|r| sim.get(r, j));
            let s = sim.get(i, j);
            if back == Some(i) && s >= threshold {
                found.push((s, i, j));
            }
        }
        if found.is_empty() {
            break;
        }
        found.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        for (_, i, j) in found {
            if row_free[i] && col_free[j] {
                row_free[i] = false;
                col_free[j] = false;
                out.push((row_ids[i], col_ids[j]));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::SimMetric;
    use ndarray::{array, Array2};

    fn ids(n: u32) -> Vec<EntityId> {
        (0..n).map(EntityId).collect()
    }

    fn brute_force_mutual(v: &Array2<f64>, threshold: f64) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for i in 0..v.nrows() {
            for j in 0..v.ncols() {
                let row_best = (0..v.ncols()).all(|k| k == j || v[[i, k]] < v[[i, j]]);
                let col_best = (0..v.nrows()).all(|k| k == i || v[[k, j]] < v[[i, j]]);
                if row_best && col_best && v[[i, j]] >= threshold {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn single_confident_mutual_pair() {
        let v = array![[0.9, 0.2, 0.1], [0.3, 0.5, 0.4], [0.2, 0.6, 0.55]];
        assert_eq!(brute_force_mutual(&v, 0.7), vec![(0, 0)]);
        let sim = SimilarityMatrix::new(v, SimMetric::Cosine);
        let out = bootstrap_augment(&sim, &ids(3), &ids(3), &[], 0.7, 5).unwrap();
        assert_eq!(out, vec![(EntityId(0), EntityId(0))]);
    }

    #[test]
    fn threshold_one_adds_nothing_without_duplicates() {
        let sim = SimilarityMatrix::new(array![[0.99, 0.1], [0.2, 0.98]], SimMetric::Cosine);
        assert!(bootstrap_augment(&sim, &ids(2), &ids(2), &[], 1.0, 3).unwrap().is_empty());
    }

    #[test]
    fn keeps_train_and_skips_its_members() {
        let sim = SimilarityMatrix::new(array![[0.95, 0.9], [0.94, 0.8]], SimMetric::Cosine);
        let train = vec![(EntityId(0), EntityId(0))];
        let out = bootstrap_augment(&sim, &ids(2), &ids(2), &train, 0.7, 3).unwrap();
        assert_eq!(out, vec![(EntityId(0), EntityId(0)), (EntityId(1), EntityId(1))]);
    }

    #[test]
    fn later_rounds_pick_up_freed_pairs() {
        // round 1 takes (0,0); then row 1 and column 1 become mutual
        let v = array![[0.95, 0.2], [0.9, 0.8]];
        let sim = SimilarityMatrix::new(v, SimMetric::Cosine);
        let one = bootstrap_augment(&sim, &ids(2), &ids(2), &[], 0.7, 1).unwrap();
        assert_eq!(one.len(), 1);
        let two = bootstrap_augment(&sim, &ids(2), &ids(2), &[], 0.7, 2).unwrap();
        assert_eq!(two, vec![(EntityId(0), EntityId(0)), (EntityId(1), EntityId(1))]);
    }

    #[test]
    fn rejects_bad_threshold() {
        let sim = SimilarityMatrix::new(array![[0.5]], SimMetric::Cosine);
        assert!(bootstrap_augment(&sim, &ids(1), &ids(1), &[], 0.0, 1).is_err());
    }
}
