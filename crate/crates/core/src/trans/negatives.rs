//! Corrupted-triple samplers.

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;

use super::{JointSpace, Triple};
use crate::error::{Error, Result};

/// Draws allowed per requested negative before giving up.
pub const MAX_SAMPLING_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NegativeTriple {
    pub triple: Triple,
    pub source: Triple,
}

fn corrupt<R: Rng>(
    positive: Triple,
    space: &JointSpace,
    k: usize,
    rng: &mut R,
    mut draw: impl FnMut(usize, &mut R) -> Result<usize>,
) -> Result<Vec<NegativeTriple>> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut found = None;
        for _ in 0..MAX_SAMPLING_RETRIES {
            let replace_head = rng.gen_bool(0.5);
            let replaced = if replace_head { positive.head } else { positive.tail };
            let e = draw(replaced, rng)?;
            let cand = if replace_head {
                Triple { head: e, ..positive }
            } else {
                Triple { tail: e, ..positive }
            };
            if !space.contains(&cand) && cand != positive {
                found = Some(cand);
                break;
            }
        }
        let triple = found.ok_or_else(|| {
            Error::Sampling(format!(
                "no negative for {positive:?} after {MAX_SAMPLING_RETRIES} draws"
            ))
        })?;
        out.push(NegativeTriple {
            triple,
            source: positive,
        });
    }
    Ok(out)
}

/// `k` negatives for `positive`, each replacing the head or the tail (fair coin)
/// with an entity drawn uniformly from the space's active rows.
pub fn sample_negatives_uniform<R: Rng>(
    positive: Triple,
    space: &JointSpace,
    k: usize,
    rng: &mut R,
) -> Result<Vec<NegativeTriple>> {
    let pool = space.active_rows();
    if k > 0 && pool.len() < 2 {
        return Err(Error::Sampling("need at least two entities to corrupt a triple".into()));
    }
    corrupt(positive, space, k, rng, |_, rng| Ok(pool[rng.gen_range(0..pool.len())]))
}

/// `ceil((1 - epsilon) * n)`, guarded against float noise just above an integer.
pub fn truncated_pool_size(n: usize, epsilon: f64) -> usize {
    let x = (1.0 - epsilon) * n as f64;
    ((x - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Cosine nearest-neighbour lists used by epsilon-truncated sampling.
///
/// Each list holds the `truncated_pool_size(n, epsilon)` candidates most similar to
/// the row, never the row itself (so at most `n - 1`), ordered by descending
/// similarity with ties to the lower row.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborPools {
    pools: Vec<Vec<u32>>,
    size: usize,
}

impl NeighborPools {
    pub fn build(entities: &Array2<f64>, candidates: &[usize], epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Config(format!("epsilon must lie in [0, 1), got {epsilon}")));
        }
        if let Some(&bad) = candidates.iter().find(|&&c| c >= entities.nrows()) {
            return Err(Error::Lookup {
                kind: "entity row",
                key: bad.to_string(),
            });
        }
        let n = candidates.len();
        let size = truncated_pool_size(n, epsilon).max(1);
        let keep = size.min(n.saturating_sub(1));
        let norms: Vec<f64> = candidates
            .iter()
            .map(|&c| {
                let r = entities.row(c);
                r.dot(&r).sqrt()
            })
            .collect();
        let lists: Vec<(usize, Vec<u32>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = entities.row(candidates[i]);
                let mut scored: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d = norms[i] * norms[j];
                        let s = if d > 0.0 { xi.dot(&entities.row(candidates[j])) / d } else { 0.0 };
                        (s, candidates[j])
                    })
                    .collect();
                let order = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
                if keep < scored.len() && keep > 0 {
                    scored.select_nth_unstable_by(keep - 1, order);
                }
                scored.truncate(keep);
                scored.sort_by(order);
                (candidates[i], scored.into_iter().map(|(_, c)| c as u32).collect())
            })
            .collect();
        let mut pools = vec![Vec::new(); entities.nrows()];
        for (row, list) in lists {
            pools[row] = list;
        }
        Ok(NeighborPools { pools, size })
    }

    /// Nominal pool size before excluding the row itself.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pool(&self, row: usize) -> &[u32] {
        self.pools.get(row).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Like [`sample_negatives_uniform`], but the replacement for entity `x` is drawn
/// uniformly from `x`'s nearest-neighbour pool.
pub fn sample_negatives_truncated<R: Rng>(
    positive: Triple,
    space: &JointSpace,
    pools: &NeighborPools,
    k: usize,
    rng: &mut R,
) -> Result<Vec<NegativeTriple>> {
    corrupt(positive, space, k, rng, |x, rng| {
        let pool = pools.pool(x);
        if pool.is_empty() {
            return Err(Error::Sampling(format!("entity row {x} has an empty neighbour pool")));
        }
        Ok(pool[rng.gen_range(0..pool.len())] as usize)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::KgBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(n: usize) -> JointSpace {
        let mut b = KgBuilder::new();
        for i in 0..n - 1 {
            b.add_rel(&format!("e{i}"), "r", &format!("e{}", i + 1));
        }
        JointSpace::single(&b.build())
    }

    #[test]
    fn zero_negatives() {
        let s = chain(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_negatives_uniform(s.triples()[0], &s, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn two_entity_graph_enumerates_its_candidates() {
        let s = chain(2);
        let p = s.triples()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let negs = sample_negatives_uniform(p, &s, 200, &mut rng).unwrap();
        for n in &negs {
            assert!(n.triple == Triple::new(0, 0, 0) || n.triple == Triple::new(1, 0, 1));
            if n.triple.head == p.head {
                assert_eq!(n.triple, Triple::new(0, 0, 0));
            }
        }
    }

    #[test]
    fn negatives_leave_the_positive_set_and_change_one_slot() {
        let s = chain(12);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &p in s.triples() {
            for n in sample_negatives_uniform(p, &s, 20, &mut rng).unwrap() {
                assert!(!s.contains(&n.triple));
                assert_eq!(n.source, p);
                let changed = (n.triple.head != p.head) as u8 + (n.triple.tail != p.tail) as u8;
                assert_eq!(changed, 1);
                assert_eq!(n.triple.relation, p.relation);
            }
        }
    }

    #[test]
    fn exhausted_retries_are_a_sampling_error() {
        // the only other entity always yields a positive triple
        let mut b = KgBuilder::new();
        b.add_rel("a", "r", "b");
        b.add_rel("a", "r", "a");
        b.add_rel("b", "r", "b");
        b.add_rel("b", "r", "a");
        let s = JointSpace::single(&b.build());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_negatives_uniform(s.triples()[0], &s, 1, &mut rng),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn pool_sizes() {
        assert_eq!(truncated_pool_size(10, 0.9), 1);
        assert_eq!(truncated_pool_size(10, 0.0), 10);
        assert_eq!(truncated_pool_size(15000, 0.9), 1500);
        assert_eq!(truncated_pool_size(7, 0.5), 4);
    }

    fn brute_force_neighbours(e: &Array2<f64>, i: usize, s: usize) -> Vec<usize> {
        let cos = |a: usize, b: usize| {
            let (x, y) = (e.row(a), e.row(b));
            x.dot(&y) / (x.dot(&x).sqrt() * y.dot(&y).sqrt())
        };
        let mut all: Vec<usize> = (0..e.nrows()).filter(|&j| j != i).collect();
        all.sort_by(|&a, &b| cos(i, b).partial_cmp(&cos(i, a)).unwrap().then(a.cmp(&b)));
        all.truncate(s);
        all
    }

    #[test]
    fn pools_match_brute_force_nearest_neighbours() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = Array2::from_shape_simple_fn((10, 4), || rng.gen_range(-1.0..1.0));
        let rows: Vec<usize> = (0..10).collect();
        let pools = NeighborPools::build(&e, &rows, 0.9).unwrap();
        assert_eq!(pools.size(), 1);
        for i in 0..10 {
            let got: Vec<usize> = pools.pool(i).iter().map(|&x| x as usize).collect();
            assert_eq!(got, brute_force_neighbours(&e, i, 1));
        }
        let pools = NeighborPools::build(&e, &rows, 0.7).unwrap();
        for i in 0..10 {
            let got: Vec<usize> = pools.pool(i).iter().map(|&x| x as usize).collect();
            assert_eq!(got, brute_force_neighbours(&e, i, 3));
        }
    }

    #[test]
    fn zero_epsilon_pool_is_every_other_entity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = Array2::from_shape_simple_fn((6, 3), || rng.gen_range(-1.0..1.0));
        let pools = NeighborPools::build(&e, &(0..6).collect::<Vec<_>>(), 0.0).unwrap();
        for i in 0..6 {
            let mut got: Vec<u32> = pools.pool(i).to_vec();
            got.sort();
            let want: Vec<u32> = (0..6).filter(|&j| j != i as u32).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn truncated_replacements_come_from_the_pool() {
        let s = chain(20);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = Array2::from_shape_simple_fn((20, 5), || rng.gen_range(-1.0..1.0));
        let pools = NeighborPools::build(&e, s.active_rows(), 0.8).unwrap();
        for &p in s.triples() {
            for n in sample_negatives_truncated(p, &s, &pools, 5, &mut rng).unwrap() {
                assert!(!s.contains(&n.triple));
                let (old, new) = if n.triple.head != p.head {
                    (p.head, n.triple.head)
                } else {
                    (p.tail, n.triple.tail)
                };
                assert!(pools.pool(old).contains(&(new as u32)));
            }
        }
    }
}
