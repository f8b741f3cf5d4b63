use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{align_top1, gold_ranks, h_score, hits_from_ranks, mrr_from_ranks, AlignmentResult, SimilarityMatrix};
use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A partition of the integers into consecutive inclusive ranges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    upper_edges: Vec<i64>,
}

impl Buckets {
    /// `upper_edges = [a, b, c]` gives `(-inf, a]`, `[a+1, b]`, `[b+1, c]`, `[c+1, inf)`.
    pub fn from_upper_edges(mut upper_edges: Vec<i64>) -> Self {
        upper_edges.sort_unstable();
        upper_edges.dedup();
        Buckets { upper_edges }
    }

    /// `<=1, 2, 3, 4-5, 6-10, >10`
    pub fn default_degree() -> Self {
        Self::from_upper_edges(vec![1, 2, 3, 5, 10])
    }

    /// `<=-5, -4..-2, -1..1, 2..4, >=5`
    pub fn default_degree_diff() -> Self {
        Self::from_upper_edges(vec![-5, -2, 1, 4])
    }

    pub fn len(&self) -> usize {
        self.upper_edges.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, value: i64) -> usize {
        self.upper_edges.partition_point(|&e| e < value)
    }

    pub fn bounds(&self, index: usize) -> (Option<i64>, Option<i64>) {
        let lo = index.checked_sub(1).map(|i| self.upper_edges[i] + 1);
        let hi = self.upper_edges.get(index).copied();
        (lo, hi)
    }

    pub fn label(&self, index: usize) -> String {
        match self.bounds(index) {
            (None, Some(hi)) => format!("<={hi}"),
            (Some(lo), None) => format!(">={lo}"),
            (Some(lo), Some(hi)) if lo == hi => format!("{lo}"),
            (Some(lo), Some(hi)) => format!("{lo}..{hi}"),
            (None, None) => "all".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub label: String,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    /// `None` for an empty bucket.
    pub hits_at_1: Option<f64>,
    pub support: usize,
}

fn tabulate(result: &AlignmentResult, gold: &[(usize, usize)], keys: &[i64], buckets: &Buckets) -> Vec<BucketRow> {
    let mut correct = vec![0usize; buckets.len()];
    let mut support = vec![0usize; buckets.len()];
    for (&(r, c), &key) in gold.iter().zip(keys) {
        let b = buckets.index_of(key);
        support[b] += 1;
        if result.is_correct(r, c) {
            correct[b] += 1;
        }
    }
    (0..buckets.len())
        .map(|b| {
            let (lo, hi) = buckets.bounds(b);
            BucketRow {
                label: buckets.label(b),
                lo,
                hi,
                hits_at_1: (support[b] > 0).then(|| 100.0 * correct[b] as f64 / support[b] as f64),
                support: support[b],
            }
        })
        .collect()
}

fn lookup_degree(degrees: &[usize], idx: usize, side: &str) -> Result<i64> {
    degrees
        .get(idx)
        .map(|&d| d as i64)
        .ok_or_else(|| Error::Evaluation(format!("no degree for {side} index {idx}")))
}

/// Hits@1 per source-degree bucket. `source_degrees` is indexed by matrix row.
pub fn degree_bucket_report(
    result: &AlignmentResult,
    gold: &[(usize, usize)],
    source_degrees: &[usize],
    buckets: &Buckets,
) -> Result<Vec<BucketRow>> {
    let keys = gold
        .iter()
        .map(|&(r, _)| lookup_degree(source_degrees, r, "source"))
        .collect::<Result<Vec<_>>>()?;
    Ok(tabulate(result, gold, &keys, buckets))
}

/// Hits@1 per bucket of signed degree difference `deg_1(e1) - deg_2(e2)`.
pub fn degree_diff_report(
    result: &AlignmentResult,
    gold: &[(usize, usize)],
    source_degrees: &[usize],
    target_degrees: &[usize],
    buckets: &Buckets,
) -> Result<Vec<BucketRow>> {
    let keys = gold
        .iter()
        .map(|&(r, c)| Ok(lookup_degree(source_degrees, r, "source")? - lookup_degree(target_degrees, c, "target")?))
        .collect::<Result<Vec<_>>>()?;
    Ok(tabulate(result, gold, &keys, buckets))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSettings {
    pub hits_ks: Vec<usize>,
    pub injective: bool,
    pub degree_buckets: Buckets,
    pub degree_diff_buckets: Buckets,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            hits_ks: vec![1, 5, 10],
            injective: false,
            degree_buckets: Buckets::default_degree(),
            degree_diff_buckets: Buckets::default_degree_diff(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub method: String,
    pub variant: String,
    pub metric: String,
    pub test_size: usize,
    /// k -> percent, from gold ranks
    pub hits_at: BTreeMap<usize, f64>,
    pub mrr: f64,
    /// Percent of sources whose top-1 prediction is gold (injective when requested).
    pub top1_accuracy: f64,
    pub injective: bool,
    pub h_score: f64,
    pub degree_buckets: Vec<BucketRow>,
    pub degree_diff_buckets: Vec<BucketRow>,
}

impl EvalReport {
    /// Flat `metric name -> value` view used for tables.
    pub fn flat_metrics(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for (k, v) in &self.hits_at {
            m.insert(format!("hits@{k}"), *v);
        }
        m.insert("mrr".into(), self.mrr);
        m.insert("top1_accuracy".into(), self.top1_accuracy);
        m.insert("h_score".into(), self.h_score);
        for row in &self.degree_buckets {
            if let Some(h) = row.hits_at_1 {
                m.insert(format!("degree[{}]", row.label), h);
            }
        }
        for row in &self.degree_diff_buckets {
            if let Some(h) = row.hits_at_1 {
                m.insert(format!("degree_diff[{}]", row.label), h);
            }
        }
        m
    }

    pub fn write_metrics_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["metric", "value"])?;
        w.write_record(["test_size", &self.test_size.to_string()])?;
        for (k, v) in self.flat_metrics() {
            w.write_record([k, v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Plot-ready bucket table.
pub fn write_bucket_tsv(rows: &[BucketRow], path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = String::from("bucket\tlo\thi\thits_at_1\tsupport\n");
    let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.label,
            opt(r.lo),
            opt(r.hi),
            r.hits_at_1.map(|h| h.to_string()).unwrap_or_else(|| "NA".into()),
            r.support
        ));
    }
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Runs every metric on one similarity matrix.
///
/// `gold` holds `(row, column)` pairs; `source_degrees[row]` and
/// `target_degrees[column]` feed the degree tables.
pub fn evaluate(
    sim: &SimilarityMatrix,
    gold: &[(usize, usize)],
    source_degrees: &[usize],
    target_degrees: &[usize],
    settings: &EvalSettings,
) -> Result<EvalReport> {
    let ranks = gold_ranks(sim, gold)?;
    let result = align_top1(sim, settings.injective);
    let correct = gold.iter().filter(|&&(r, c)| result.is_correct(r, c)).count();
    let report = EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        method: String::new(),
        variant: String::new(),
        metric: sim.metric.name().to_owned(),
        test_size: gold.len(),
        hits_at: settings
            .hits_ks
            .iter()
            .map(|&k| (k, hits_from_ranks(&ranks, k)))
            .collect(),
        mrr: mrr_from_ranks(&ranks),
        top1_accuracy: 100.0 * correct as f64 / gold.len() as f64,
        injective: settings.injective,
        h_score: h_score(&result, sim.cols()),
        degree_buckets: degree_bucket_report(&result, gold, source_degrees, &settings.degree_buckets)?,
        degree_diff_buckets: degree_diff_report(
            &result,
            gold,
            source_degrees,
            target_degrees,
            &settings.degree_diff_buckets,
        )?,
    };
    Ok(report)
}
