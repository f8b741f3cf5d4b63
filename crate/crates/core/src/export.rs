//! Named vector tables on disk and the embedding artifacts of a trained model.
//!
//! Tables are text files with one `name<TAB>v1 v2 ... vd` line per entity. Floats
//! are written with Rust's shortest round-trip formatting, so a table reloads to
//! the same bits and identical inputs give byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcn::GcnModel;
use crate::kg::KnowledgeGraph;
use crate::matcher::SimMetric;
use crate::trans::TrainedModel;

pub const KG1_EMBEDDINGS: &str = "kg1_embeddings.tsv";
pub const KG2_EMBEDDINGS: &str = "kg2_embeddings.tsv";
pub const EMBEDDING_META: &str = "embeddings.json";

/// Vectors keyed by entity name, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VectorTable {
    index: IndexMap<String, usize>,
    vectors: Vec<Array1<f64>>,
    dim: usize,
}

impl VectorTable {
    pub fn from_rows(rows: impl IntoIterator<Item = (String, Vec<f64>)>) -> Result<Self> {
        let mut t = VectorTable::default();
        for (i, (name, v)) in rows.into_iter().enumerate() {
            t.push(name, v).map_err(|m| Error::InvalidData(format!("row {}: {m}", i + 1)))?;
        }
        Ok(t)
    }

    /// Row `i` of `matrix` under `names[i]`.
    pub fn from_matrix<S: AsRef<str>>(names: &[S], matrix: ArrayView2<f64>) -> Result<Self> {
        if names.len() != matrix.nrows() {
            return Err(Error::Shape(format!("{} names for {} rows", names.len(), matrix.nrows())));
        }
        Self::from_rows(
            names
                .iter()
                .zip(matrix.axis_iter(Axis(0)))
                .map(|(n, r)| (n.as_ref().to_owned(), r.to_vec())),
        )
    }

    fn push(&mut self, name: String, v: Vec<f64>) -> std::result::Result<(), String> {
        if self.vectors.is_empty() {
            self.dim = v.len();
        } else if v.len() != self.dim {
            return Err(format!("expected {} dimensions, found {}", self.dim, v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err("non-finite entry".into());
        }
        if self.index.contains_key(&name) {
            return Err(format!("duplicate entity {name:?}"));
        }
        self.index.insert(name, self.vectors.len());
        self.vectors.push(Array1::from(v));
        Ok(())
    }

    /// Reads `entity<TAB>v1 v2 ... vd` lines; blank lines are skipped.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut t = VectorTable::default();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (name, rest) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected entity<TAB>vector".into()))?;
            let v = rest
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|e| parse_err(format!("{x:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            t.push(name.to_string(), v).map_err(parse_err)?;
        }
        Ok(t)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (name, &i) in &self.index {
            let v: Vec<String> = self.vectors[i].iter().map(|x| x.to_string()).collect();
            writeln!(w, "{name}\t{}", v.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<ArrayView1<'_, f64>> {
        self.index.get(name).map(|&i| self.vectors[i].view())
    }

    /// Stacks the vectors of `names` in order, failing with every missing name.
    pub fn matrix(&self, names: &[&str]) -> Result<Array2<f64>> {
        let missing: Vec<String> = names
            .iter()
            .filter(|n| !self.index.contains_key(**n))
            .map(|n| n.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Missing {
                kind: "vector for entity",
                keys: missing,
            });
        }
        let mut m = Array2::zeros((names.len(), self.dim));
        for (r, n) in names.iter().enumerate() {
            m.row_mut(r).assign(&self.vectors[self.index[*n]]);
        }
        Ok(m)
    }
}

/// Sidecar describing a pair of embedding tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub method: String,
    pub dim: usize,
    /// epoch of the exported snapshot
    pub epoch: usize,
    pub epochs_run: usize,
    pub rng_seed: u64,
    /// similarity the vectors are meant to be compared with
    pub metric: SimMetric,
    pub best_valid_hits_at_1: Option<f64>,
}

/// Both sides of a trained model, rows in entity-id order.
#[derive(Debug, Clone)]
pub struct ExportedEmbeddings {
    pub kg1: VectorTable,
    pub kg2: VectorTable,
    pub meta: EmbeddingMeta,
}

fn names(kg: &KnowledgeGraph) -> Vec<&str> {
    kg.entities().iter().collect()
}

impl ExportedEmbeddings {
    pub fn from_translation(model: &TrainedModel, kg1: &KnowledgeGraph, kg2: &KnowledgeGraph, rng_seed: u64) -> Result<Self> {
        Ok(ExportedEmbeddings {
            kg1: VectorTable::from_matrix(&names(kg1), model.kg1_embeddings().view())?,
            kg2: VectorTable::from_matrix(&names(kg2), model.kg2_embeddings().view())?,
            meta: EmbeddingMeta {
                method: model.method.name().to_owned(),
                dim: model.table.dim(),
                epoch: model.best_epoch,
                epochs_run: model.epochs_run,
                rng_seed,
                metric: SimMetric::Cosine,
                best_valid_hits_at_1: model.best_valid_hits_at_1,
            },
        })
    }

    /// Concatenates `mix * structure` and `(1 - mix) * attribute`. Negated L1
    /// distance is additive over coordinates, so comparing the concatenations
    /// reproduces the model's mixed similarity exactly.
    pub fn from_gcn(model: &GcnModel, kg1: &KnowledgeGraph, kg2: &KnowledgeGraph, rng_seed: u64) -> Result<Self> {
        let join = |s: Array2<f64>, a: Option<Array2<f64>>| -> Array2<f64> {
            match a {
                Some(a) => ndarray::concatenate(Axis(1), &[(s * model.mix).view(), (a * (1.0 - model.mix)).view()])
                    .expect("channels have equal row counts"),
                None => s,
            }
        };
        let e1 = join(model.kg1_structure(), model.kg1_attribute());
        let e2 = join(model.kg2_structure(), model.kg2_attribute());
        Ok(ExportedEmbeddings {
            meta: EmbeddingMeta {
                method: "gcnalign".into(),
                dim: e1.ncols(),
                epoch: model.best_epoch,
                epochs_run: model.epochs_run,
                rng_seed,
                metric: SimMetric::NegL1,
                best_valid_hits_at_1: model.best_valid_hits_at_1,
            },
            kg1: VectorTable::from_matrix(&names(kg1), e1.view())?,
            kg2: VectorTable::from_matrix(&names(kg2), e2.view())?,
        })
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.kg1.write(dir.join(KG1_EMBEDDINGS))?;
        self.kg2.write(dir.join(KG2_EMBEDDINGS))?;
        let path = dir.join(EMBEDDING_META);
        let json = serde_json::to_string_pretty(&self.meta)?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = dir.join(EMBEDDING_META);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let out = ExportedEmbeddings {
            kg1: VectorTable::load(dir.join(KG1_EMBEDDINGS))?,
            kg2: VectorTable::load(dir.join(KG2_EMBEDDINGS))?,
            meta: serde_json::from_str(&text)?,
        };
        if out.kg1.dim() != out.kg2.dim() && !out.kg1.is_empty() && !out.kg2.is_empty() {
            return Err(Error::Shape(format!(
                "KG1 embeddings have {} dimensions, KG2 embeddings {}",
                out.kg1.dim(),
                out.kg2.dim()
            )));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn table_round_trips_bit_exactly() {
        let m = array![[0.1, -1.0 / 3.0], [1e-300, 2.5e10]];
        let t = VectorTable::from_matrix(&["a", "b"], m.view()).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        t.write(f.path()).unwrap();
        let back = VectorTable::load(f.path()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.matrix(&["a", "b"]).unwrap(), m);
    }

    #[test]
    fn missing_names_are_listed_together() {
        let t = VectorTable::from_rows([("a".to_string(), vec![1.0])]).unwrap();
        match t.matrix(&["x", "a", "y"]) {
            Err(Error::Missing { keys, .. }) => assert_eq!(keys, vec!["x", "y"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_rows_are_rejected_with_a_line_number() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "a\t1 2\nb\t3\n").unwrap();
        assert!(matches!(VectorTable::load(f.path()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn mixed_concatenation_reproduces_mixed_l1() {
        use crate::matcher::{combined_similarity, similarity_matrix};
        let s1 = array![[0.0, 1.0], [2.0, -1.0]];
        let s2 = array![[0.5, 0.5], [1.0, 1.0]];
        let a1 = array![[1.0], [0.0]];
        let a2 = array![[0.0], [3.0]];
        let mix = 0.7;
        let direct = combined_similarity(
            &similarity_matrix(s1.view(), s2.view(), SimMetric::NegL1).unwrap(),
            &similarity_matrix(a1.view(), a2.view(), SimMetric::NegL1).unwrap(),
            mix,
        )
        .unwrap();
        let cat = |s: &Array2<f64>, a: &Array2<f64>| {
            ndarray::concatenate(Axis(1), &[(s * mix).view(), (a * (1.0 - mix)).view()]).unwrap()
        };
        let joined = similarity_matrix(cat(&s1, &a1).view(), cat(&s2, &a2).view(), SimMetric::NegL1).unwrap();
        for (x, y) in direct.values.iter().zip(joined.values.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
