//! Clustering by simulated ant nestmate recognition.
//!
//! Each dataset item becomes an ant. Ants learn an acceptance template from
//! random encounters, then meet pairwise and apply a rule set that creates,
//! grows, merges and splits colonies. Low-fitness colonies are dissolved at
//! the end and leftover ants join the colony of their most similar neighbour.
//! The number of clusters is never given up front.
//!
//! Modules:
//! - [`model`]: ants, parameters, results
//! - [`similarity`]: per-feature similarity functions and dataset ingestion
//! - [`rules`]: acceptance, estimator updates, replaceable rule sets
//! - [`engine`]: the seeded clustering run
//! - [`evaluation`]: ARI, synthetic data, DBSCAN baseline, benchmark grid
//! - [`cli`]: the `antclust` command line

pub mod cli;
pub mod engine;
pub mod evaluation;
pub mod model;
pub mod rules;
pub mod similarity;

pub use engine::{run_antclust, Engine, EngineError, RunStats};
pub use model::{Ant, ClusteringResult, ColonyId, LabelAllocator, Parameters};
pub use rules::RuleSet;
pub use similarity::{FeatureColumn, FeatureSet, SimilarityMatrix, SimilaritySource};
