use ndarray::parallel::prelude::*;
use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMetric {
    Cosine,
    NegL1,
    NegL2,
    /// Output of [`csls_rescale`]; never used to compute a matrix directly.
    Csls,
}

impl SimMetric {
    pub fn name(self) -> &'static str {
        match self {
            SimMetric::Cosine => "cosine",
            SimMetric::NegL1 => "neg_l1",
            SimMetric::NegL2 => "neg_l2",
            SimMetric::Csls => "csls",
        }
    }
}

impl std::str::FromStr for SimMetric {
    type Err = Error;

    /// Base metrics only; CSLS is requested separately.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(SimMetric::Cosine),
            "neg_l1" => Ok(SimMetric::NegL1),
            "neg_l2" => Ok(SimMetric::NegL2),
            other => Err(Error::Config(format!(
                "unknown similarity metric {other:?} (expected cosine, neg_l1 or neg_l2)"
            ))),
        }
    }
}

/// Dense `|source| x |target|` scores; higher means more similar.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub values: Array2<f64>,
    pub metric: SimMetric,
}

impl SimilarityMatrix {
    pub fn new(values: Array2<f64>, metric: SimMetric) -> Self {
        SimilarityMatrix { values, metric }
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[[row, col]]
    }
}

pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(&b) / (na * nb)).clamp(-1.0, 1.0)
}

fn unit_rows(m: ArrayView2<f64>) -> Array2<f64> {
    let mut out = m.to_owned();
    for mut row in out.axis_iter_mut(Axis(0)) {
        let n = row.dot(&row).sqrt();
        if n > 0.0 {
            row /= n;
        }
    }
    out
}

/// Scores every source row against every target row. Rows are computed in
/// parallel; each entry depends only on its two vectors, so the result does not
/// depend on the schedule.
pub fn similarity_matrix(src: ArrayView2<f64>, tgt: ArrayView2<f64>, metric: SimMetric) -> Result<SimilarityMatrix> {
    if src.ncols() != tgt.ncols() {
        return Err(Error::Shape(format!(
            "source dim {} != target dim {}",
            src.ncols(),
            tgt.ncols()
        )));
    }
    for (side, m) in [("source", &src), ("target", &tgt)] {
        if let Some(i) = m.axis_iter(Axis(0)).position(|r| r.iter().any(|v| !v.is_finite())) {
            return Err(Error::Evaluation(format!("non-finite value in {side} embedding row {i}")));
        }
    }
    let values = match metric {
        SimMetric::Cosine => {
            let s = unit_rows(src);
            let t = unit_rows(tgt);
            let mut v = s.dot(&t.t());
            v.mapv_inplace(|x| x.clamp(-1.0, 1.0));
            v
        }
        SimMetric::NegL1 | SimMetric::NegL2 => {
            let mut v = Array2::zeros((src.nrows(), tgt.nrows()));
            v.axis_iter_mut(Axis(0))
                .into_par_iter()
                .zip(src.axis_iter(Axis(0)))
                .for_each(|(mut out, s)| {
                    for (o, t) in out.iter_mut().zip(tgt.axis_iter(Axis(0))) {
                        let d = if metric == SimMetric::NegL1 {
                            s.iter().zip(t.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>()
                        } else {
                            s.iter().zip(t.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
                        };
                        *o = -d;
                    }
                });
            v
        }
        SimMetric::Csls => {
            return Err(Error::Config("csls is a rescaling, not a base metric".into()));
        }
    };
    Ok(SimilarityMatrix::new(values, metric))
}

fn mean_top_k(values: impl Iterator<Item = f64>, k: usize) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v[..k].iter().sum::<f64>() / k as f64
}

/// Cross-domain similarity local scaling.
///
/// Entry `(i, j)` becomes `2 sim(i, j) - r_t(i) - r_s(j)` where `r_t(i)` is the mean
/// of the `k` largest entries of row `i` and `r_s(j)` the mean of the `k` largest
/// entries of column `j`.
pub fn csls_rescale(sim: &SimilarityMatrix, k: usize) -> Result<SimilarityMatrix> {
    let (rows, cols) = sim.values.dim();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::Config(format!(
            "csls k={k} outside 1..={}",
            rows.min(cols)
        )));
    }
    let row_density: Vec<f64> = sim
        .values
        .axis_iter(Axis(0))
        .into_par_iter()
        .map(|r| mean_top_k(r.iter().copied(), k))
        .collect();
    let col_density: Vec<f64> = sim
        .values
        .axis_iter(Axis(1))
        .into_par_iter()
        .map(|c| mean_top_k(c.iter().copied(), k))
        .collect();
    let mut values = sim.values.clone();
    for ((i, j), v) in values.indexed_iter_mut() {
        *v = 2.0 * *v - row_density[i] - col_density[j];
    }
    Ok(SimilarityMatrix::new(values, SimMetric::Csls))
}

/// Entrywise `mix * structure + (1 - mix) * attribute`.
pub fn combined_similarity(
    structure: &SimilarityMatrix,
    attribute: &SimilarityMatrix,
    mix: f64,
) -> Result<SimilarityMatrix> {
    if structure.values.dim() != attribute.values.dim() {
        return Err(Error::Shape(format!(
            "structure similarity {:?} vs attribute similarity {:?}",
            structure.values.dim(),
            attribute.values.dim()
        )));
    }
    if !(0.0..=1.0).contains(&mix) {
        return Err(Error::Config(format!("mix {mix} outside [0, 1]")));
    }
    let values = &structure.values * mix + &attribute.values * (1.0 - mix);
    Ok(SimilarityMatrix::new(values, structure.metric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identical_vectors_have_cosine_one() {
        let a = array![[0.3, -0.4]];
        let s = similarity_matrix(a.view(), a.view(), SimMetric::Cosine).unwrap();
        assert!((s.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_vectors_have_cosine_zero() {
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        let s = similarity_matrix(a.view(), a.view(), SimMetric::Cosine).unwrap();
        assert_eq!(s.get(0, 1), 0.0);
        assert_eq!(s.get(1, 0), 0.0);
    }

    #[test]
    fn hand_computed_two_by_two() {
        let src = array![[1.0, 1.0], [1.0, 0.0]];
        let tgt = array![[2.0, 0.0], [1.0, 2.0]];
        let cos = similarity_matrix(src.view(), tgt.view(), SimMetric::Cosine).unwrap();
        // (1,1)·(2,0) = 2 over √2·2
        assert!((cos.get(0, 0) - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        // (1,1)·(1,2) = 3 over √2·√5
        assert!((cos.get(0, 1) - 3.0 / (2f64.sqrt() * 5f64.sqrt())).abs() < 1e-12);
        assert!((cos.get(1, 0) - 1.0).abs() < 1e-12);
        assert!((cos.get(1, 1) - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        let l1 = similarity_matrix(src.view(), tgt.view(), SimMetric::NegL1).unwrap();
        assert_eq!(l1.values, array![[-2.0, -1.0], [-1.0, -2.0]]);
        let l2 = similarity_matrix(src.view(), tgt.view(), SimMetric::NegL2).unwrap();
        assert!((l2.get(0, 0) + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dim_mismatch_is_a_shape_error() {
        let a = array![[1.0, 0.0]];
        let b = array![[1.0, 0.0, 0.0]];
        assert!(matches!(
            similarity_matrix(a.view(), b.view(), SimMetric::Cosine),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn csls_single_entry_cancels() {
        let s = SimilarityMatrix::new(array![[0.37]], SimMetric::Cosine);
        assert_eq!(csls_rescale(&s, 1).unwrap().values, array![[0.0]]);
    }

    #[test]
    fn csls_two_by_two_hand_values() {
        let s = SimilarityMatrix::new(array![[0.9, 0.1], [0.2, 0.8]], SimMetric::Cosine);
        let c = csls_rescale(&s, 1).unwrap();
        assert!((c.get(0, 0) - 0.0).abs() < 1e-12);
        assert!((c.get(0, 1) - (-1.5)).abs() < 1e-12);
        // rows still prefer the diagonal
        assert!(c.get(0, 0) > c.get(0, 1));
        assert!(c.get(1, 1) > c.get(1, 0));
    }

    #[test]
    fn csls_k_out_of_range() {
        let s = SimilarityMatrix::new(array![[0.9, 0.1]], SimMetric::Cosine);
        assert!(matches!(csls_rescale(&s, 0), Err(Error::Config(_))));
        assert!(matches!(csls_rescale(&s, 2), Err(Error::Config(_))));
    }

    #[test]
    fn csls_constant_shift_keeps_row_differences() {
        let s = SimilarityMatrix::new(array![[0.9, 0.1, 0.4], [0.2, 0.8, 0.3]], SimMetric::Cosine);
        let shifted = SimilarityMatrix::new(&s.values + 0.25, SimMetric::Cosine);
        let a = csls_rescale(&s, 2).unwrap();
        let b = csls_rescale(&shifted, 2).unwrap();
        for i in 0..2 {
            for j in 1..3 {
                let da = a.get(i, j) - a.get(i, 0);
                let db = b.get(i, j) - b.get(i, 0);
                assert!((da - db).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixing_extremes_and_midpoint() {
        let s = SimilarityMatrix::new(array![[1.0, 0.0], [0.5, 0.2]], SimMetric::Cosine);
        let a = SimilarityMatrix::new(array![[0.0, 1.0], [0.1, 0.4]], SimMetric::Cosine);
        assert_eq!(combined_similarity(&s, &a, 1.0).unwrap().values, s.values);
        assert_eq!(combined_similarity(&s, &a, 0.0).unwrap().values, a.values);
        let mid = combined_similarity(&s, &a, 0.5).unwrap();
        assert!((mid.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((mid.get(0, 1) - 0.5).abs() < 1e-12);
        assert!((mid.get(1, 0) - 0.3).abs() < 1e-12);
        assert!((mid.get(1, 1) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn mixing_shape_mismatch() {
        let s = SimilarityMatrix::new(array![[1.0, 0.0]], SimMetric::Cosine);
        let a = SimilarityMatrix::new(array![[1.0], [0.0]], SimMetric::Cosine);
        assert!(matches!(combined_similarity(&s, &a, 0.5), Err(Error::Shape(_))));
    }
}
