//! Graph-convolution aligner with a structure channel and an attribute channel.
//!
//! Both graphs are joined into one block-diagonal graph whose edges carry idf
//! weights of their relations. The structure channel convolves trainable entity
//! vectors; the attribute channel convolves fixed idf attribute indicators through
//! trainable projections. Each is a two-layer stack trained with an L1 margin loss
//! on the seed pairs, and the final similarity mixes the two.

mod adjacency;
mod model;
mod sparse;
mod train;

pub use adjacency::{build_adjacency, AdjacencyMode, WeightedAdjacency, MAX_PAIRS_PER_ATTRIBUTE};
pub use model::{
    gcn_backward, gcn_forward, gcn_forward_cached, margin_alignment_loss, margin_alignment_loss_grad, Activation,
    Features, ForwardCache, GcnGradients, GcnParameters,
};
pub use sparse::SparseMatrix;
pub use train::{attribute_features, train_gcnalign, GcnConfig, GcnEpochRecord, GcnModel};
