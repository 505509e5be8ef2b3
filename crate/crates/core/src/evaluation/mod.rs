//! Experiment harness: synthetic datasets, Adjusted Rand Index, a DBSCAN
//! reference baseline on precomputed distances, and the
//! cluster-count × tuples-per-cluster benchmark grid.

mod ari;
mod data;
mod dbscan;
mod grid;

use thiserror::Error;

pub use ari::adjusted_rand_index;
pub use data::{
    generate_descriptor_dataset, generate_float_dataset, DescriptorDataset, LabeledDataset,
    FIXTURE_INTER_MIN_BITS, FIXTURE_INTRA_MAX_BITS, PIVOT_NOISE,
};
pub use dbscan::{dbscan_precomputed, DistanceMatrix, DBSCAN_DEFAULT_EPS, DBSCAN_DEFAULT_MIN_SAMPLES, NOISE};
pub use grid::{benchmark_grid, cell_seed, BenchmarkGrid, GridRun, GridSpec, TaskKind};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("label sequences differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("at least two items are required, got {0}")]
    TooFewItems(usize),

    #[error("invalid distance matrix at ({row}, {col}): {reason}")]
    InvalidDistance {
        row: usize,
        col: usize,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Similarity(#[from] crate::similarity::SimilarityError),

    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
}
