use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::kg::KnowledgeGraph;

/// Co-occurrence edges kept per attribute in attribute mode.
pub const MAX_PAIRS_PER_ATTRIBUTE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjacencyMode {
    #[default]
    Structure,
    Attribute,
}

/// Symmetric idf-weighted adjacency with unit self-loops, plus its row-normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAdjacency {
    pub mode: AdjacencyMode,
    /// symmetric weights including the self-loops
    pub weights: SparseMatrix,
    pub normalized: SparseMatrix,
}

fn idf(total: usize, count: usize) -> f64 {
    (total as f64 / count as f64).ln()
}

/// Symmetrizes by max, drops zero and diagonal entries and puts weight 1 on the diagonal.
fn finish(n: usize, directed: BTreeMap<(usize, usize), f64>, mode: AdjacencyMode) -> WeightedAdjacency {
    let mut sym: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(i, j), &w) in &directed {
        if i == j || w == 0.0 {
            continue;
        }
        for key in [(i, j), (j, i)] {
            let e = sym.entry(key).or_insert(w);
            *e = e.max(w);
        }
    }
    let mut entries: Vec<(usize, usize, f64)> = sym.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    entries.extend((0..n).map(|i| (i, i, 1.0)));
    let weights = SparseMatrix::from_triplets(n, n, entries).expect("entity ids in range");
    let normalized = weights.row_normalized();
    WeightedAdjacency {
        mode,
        weights,
        normalized,
    }
}

/// Builds the entity graph of `kg`.
///
/// Structure mode weighs edge `(h, t)` by the sum of `idf(r) = ln(|T| / count(r))`
/// over the relations linking `h` to `t`. Attribute mode links every pair of
/// entities sharing attribute `a` with weight `idf(a)`, computed the same way over
/// attribute triples, keeping the first [`MAX_PAIRS_PER_ATTRIBUTE`] pairs `(i < j)`
/// in ascending order. Both modes take the max of the two directions, ignore
/// self-loop triples and zero weights, add weight-1 self-loops and row-normalize.
pub fn build_adjacency(kg: &KnowledgeGraph, mode: AdjacencyMode) -> WeightedAdjacency {
    let n = kg.entity_count();
    let mut directed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    match mode {
        AdjacencyMode::Structure => {
            let total = kg.rel_triples().len();
            let mut counts = vec![0usize; kg.relations().len()];
            for t in kg.rel_triples() {
                counts[t.relation.index()] += 1;
            }
            for t in kg.rel_triples() {
                *directed.entry((t.head.index(), t.tail.index())).or_insert(0.0) +=
                    idf(total, counts[t.relation.index()]);
            }
        }
        AdjacencyMode::Attribute => {
            let total = kg.attr_triples().len();
            let mut holders: Vec<Vec<usize>> = vec![Vec::new(); kg.attributes().len()];
            for t in kg.attr_triples() {
                holders[t.attribute.index()].push(t.entity.index());
            }
            for list in holders.iter_mut() {
                let weight = idf(total, list.len());
                list.sort_unstable();
                list.dedup();
                let pairs = list
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &i)| list[k + 1..].iter().map(move |&j| (i, j)))
                    .take(MAX_PAIRS_PER_ATTRIBUTE);
                for (i, j) in pairs {
                    *directed.entry((i, j)).or_insert(0.0) += weight;
                }
            }
        }
    }
    finish(n, directed, mode)
}

impl WeightedAdjacency {
    /// `a` on rows `0..n_a`, `b` on rows `n_a..n_a + n_b`, no edges between them.
    pub fn block_diagonal(a: &WeightedAdjacency, b: &WeightedAdjacency) -> Result<WeightedAdjacency> {
        if a.mode != b.mode {
            return Err(Error::Config("cannot join adjacencies of different modes".into()));
        }
        let off = a.weights.rows();
        let n = off + b.weights.rows();
        let join = |x: &SparseMatrix, y: &SparseMatrix| {
            let mut t = x.triplets();
            t.extend(y.triplets().into_iter().map(|(i, j, w)| (i + off, j + off, w)));
            SparseMatrix::from_triplets(n, n, t)
        };
        Ok(WeightedAdjacency {
            mode: a.mode,
            weights: join(&a.weights, &b.weights)?,
            normalized: join(&a.normalized, &b.normalized)?,
        })
    }

    /// Writes the normalized matrix as `i<TAB>j<TAB>w` lines.
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (i, j, v) in self.normalized.triplets() {
            writeln!(w, "{i}\t{j}\t{v}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
