//! Alignment inference and evaluation: similarity matrices, CSLS rescaling,
//! top-1 assignment, Hits@k / MRR, the hubness score and degree diagnostics.

mod align;
mod metrics;
mod report;
mod similarity;

pub use align::{align_top1, AlignmentResult};
pub use metrics::{
    gold_ranks, h_score, hits_at_k, hits_from_ranks, hub_set_size, mrr, mrr_from_ranks, rank_of,
};
pub use report::{
    degree_bucket_report, degree_diff_report, evaluate, write_bucket_tsv, BucketRow, Buckets, EvalReport,
    EvalSettings, REPORT_SCHEMA_VERSION,
};
pub use similarity::{combined_similarity, cosine, csls_rescale, similarity_matrix, SimMetric, SimilarityMatrix};
