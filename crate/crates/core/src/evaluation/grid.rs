//! Cluster-count × tuples-per-cluster benchmark grid.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{adjusted_rand_index, generate_descriptor_dataset, generate_float_dataset, EvaluationError};
use crate::engine::run_antclust;
use crate::model::Parameters;
use crate::rules::RuleSet;
use crate::similarity::{FeatureColumn, FeatureSet, SimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// Scalar items around integer pivots.
    Float,
    /// Planted binary-descriptor clusters.
    Descriptor { descriptors_per_item: usize },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Float => "float",
            TaskKind::Descriptor { .. } => "descriptor",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub task: TaskKind,
    pub cluster_counts: Vec<usize>,
    pub tuple_counts: Vec<usize>,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Engine parameters; the seed is replaced per run.
    pub params: Parameters,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl GridSpec {
    pub fn new(task: TaskKind, cluster_counts: Vec<usize>, tuple_counts: Vec<usize>) -> Self {
        Self {
            task,
            cluster_counts,
            tuple_counts,
            repetitions: 1,
            base_seed: 0,
            params: Parameters::default(),
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRun {
    pub clusters: usize,
    pub tuples: usize,
    pub repetition: usize,
    pub ari: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkGrid {
    pub task: TaskKind,
    pub cluster_counts: Vec<usize>,
    pub tuple_counts: Vec<usize>,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Mean ARI per cell, `scores[cluster_idx][tuple_idx]`.
    pub scores: Vec<Vec<f64>>,
    pub runs: Vec<GridRun>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one grid run: SplitMix64 folded over base seed, cluster count,
/// tuple count and repetition. Data generation uses this seed directly and
/// the engine uses `splitmix64(seed)`.
pub fn cell_seed(base: u64, clusters: usize, tuples: usize, repetition: usize) -> u64 {
    [clusters as u64, tuples as u64, repetition as u64]
        .into_iter()
        .fold(splitmix64(base), |acc, v| splitmix64(acc ^ v))
}

fn run_cell(
    spec: &GridSpec,
    rules: &RuleSet,
    clusters: usize,
    tuples: usize,
    repetition: usize,
) -> Result<GridRun, EvaluationError> {
    let seed = cell_seed(spec.base_seed, clusters, tuples, repetition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = Parameters {
        seed: splitmix64(seed),
        ..spec.params
    };
    let (result, truth) = match spec.task {
        TaskKind::Float => {
            let data = generate_float_dataset(clusters, tuples, &mut rng)?;
            let features = FeatureSet::new(vec![FeatureColumn::scalar_normalized(&data.values)])?;
            (run_antclust(&features, params, rules)?, data.truth)
        }
        TaskKind::Descriptor { descriptors_per_item } => {
            let data = generate_descriptor_dataset(clusters, tuples, descriptors_per_item, &mut rng)?;
            let features = FeatureSet::new(vec![FeatureColumn::Descriptor(data.items)])?;
            let matrix = SimilarityMatrix::from_source(&features);
            (run_antclust(&matrix, params, rules)?, data.truth)
        }
    };
    let ari = if truth.len() < 2 {
        1.0
    } else {
        adjusted_rand_index(&truth, &result.labels)?
    };
    Ok(GridRun {
        clusters,
        tuples,
        repetition,
        ari,
        seed,
    })
}

/// Runs every (clusters, tuples, repetition) combination and averages ARI per cell.
pub fn benchmark_grid(spec: &GridSpec, rules: &RuleSet) -> Result<BenchmarkGrid, EvaluationError> {
    if spec.cluster_counts.is_empty() || spec.tuple_counts.is_empty() || spec.repetitions == 0 {
        return Err(EvaluationError::InvalidArgument(
            "grid needs at least one cluster count, tuple count and repetition".into(),
        ));
    }
    if spec.cluster_counts.contains(&0) || spec.tuple_counts.contains(&0) {
        return Err(EvaluationError::InvalidArgument("grid counts must be positive".into()));
    }
    let mut cells = Vec::new();
    for &c in &spec.cluster_counts {
        for &t in &spec.tuple_counts {
            for r in 0..spec.repetitions {
                cells.push((c, t, r));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| EvaluationError::InvalidArgument(e.to_string()))?;
    let runs: Vec<GridRun> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(c, t, r)| run_cell(spec, rules, c, t, r))
            .collect::<Result<_, _>>()
    })?;

    let reps = spec.repetitions;
    let scores = spec
        .cluster_counts
        .iter()
        .enumerate()
        .map(|(ci, _)| {
            (0..spec.tuple_counts.len())
                .map(|ti| {
                    let start = (ci * spec.tuple_counts.len() + ti) * reps;
                    runs[start..start + reps].iter().map(|r| r.ari).sum::<f64>() / reps as f64
                })
                .collect()
        })
        .collect();

    Ok(BenchmarkGrid {
        task: spec.task,
        cluster_counts: spec.cluster_counts.clone(),
        tuple_counts: spec.tuple_counts.clone(),
        repetitions: reps,
        base_seed: spec.base_seed,
        scores,
        runs,
    })
}

#[derive(Serialize)]
struct CellSummary {
    clusters: usize,
    tuples: usize,
    mean_ari: f64,
}

#[derive(Serialize)]
struct GridSummary<'a> {
    task: &'static str,
    repetitions: usize,
    base_seed: u64,
    cluster_counts: &'a [usize],
    tuple_counts: &'a [usize],
    cells: Vec<CellSummary>,
}

impl BenchmarkGrid {
    pub fn score(&self, clusters: usize, tuples: usize) -> Option<f64> {
        let ci = self.cluster_counts.iter().position(|&c| c == clusters)?;
        let ti = self.tuple_counts.iter().position(|&t| t == tuples)?;
        Some(self.scores[ci][ti])
    }

    /// Mean cell score over the cluster counts accepted by `pick`.
    pub fn mean_over_clusters(&self, pick: impl Fn(usize) -> bool) -> Option<f64> {
        let vals: Vec<f64> = self
            .cluster_counts
            .iter()
            .zip(&self.scores)
            .filter(|(&c, _)| pick(c))
            .flat_map(|(_, row)| row.iter().copied())
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    /// Per-run CSV: `clusters,tuples,repetition,ari,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for run in &self.runs {
            w.serialize(run)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> String {
        let mut cells = Vec::new();
        for (ci, &clusters) in self.cluster_counts.iter().enumerate() {
            for (ti, &tuples) in self.tuple_counts.iter().enumerate() {
                cells.push(CellSummary {
                    clusters,
                    tuples,
                    mean_ari: self.scores[ci][ti],
                });
            }
        }
        let summary = GridSummary {
            task: self.task.name(),
            repetitions: self.repetitions,
            base_seed: self.base_seed,
            cluster_counts: &self.cluster_counts,
            tuple_counts: &self.tuple_counts,
            cells,
        };
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    }
}
