//! DBSCAN over a precomputed distance matrix.

use std::collections::VecDeque;

use super::EvaluationError;
use crate::similarity::SimilaritySource;

pub const DBSCAN_DEFAULT_EPS: f64 = 0.33;
pub const DBSCAN_DEFAULT_MIN_SAMPLES: usize = 2;
/// Label given to points that belong to no cluster.
pub const NOISE: i64 = -1;

/// Square, symmetric, non-negative matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, EvaluationError> {
        if values.len() != n * n {
            return Err(EvaluationError::InvalidArgument(format!(
                "expected {} distances, got {}",
                n * n,
                values.len()
            )));
        }
        for row in 0..n {
            for col in 0..n {
                let v = values[row * n + col];
                let reason = if !v.is_finite() || v < 0.0 {
                    Some("distance must be finite and non-negative")
                } else if row == col && v != 0.0 {
                    Some("diagonal must be zero")
                } else if (v - values[col * n + row]).abs() > 1e-9 {
                    Some("matrix must be symmetric")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(EvaluationError::InvalidDistance { row, col, reason });
                }
            }
        }
        Ok(Self { n, values })
    }

    /// `1 - similarity` for every pair.
    pub fn from_similarity<S: SimilaritySource + ?Sized>(source: &S) -> Self {
        let n = source.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = 1.0 - source.similarity(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Density clustering: a point is core when at least `min_samples` points,
/// itself included, lie within `eps`. Clusters are the connected components
/// of core points plus the non-core points they reach; everything else is
/// [`NOISE`]. Cluster ids are assigned in order of the lowest core point index.
pub fn dbscan_precomputed(
    dist: &DistanceMatrix,
    eps: f64,
    min_samples: usize,
) -> Result<Vec<i64>, EvaluationError> {
    if eps.is_nan() || eps < 0.0 {
        return Err(EvaluationError::InvalidArgument(format!("eps must be non-negative, got {eps}")));
    }
    if min_samples == 0 {
        return Err(EvaluationError::InvalidArgument("min_samples must be positive".into()));
    }
    let n = dist.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| dist.get(i, j) <= eps).collect())
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_samples).collect();

    let mut labels = vec![NOISE; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if !core[start] || labels[start] != NOISE {
            continue;
        }
        labels[start] = next;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            if !core[p] {
                continue;
            }
            for &q in &neighbours[p] {
                if labels[q] == NOISE {
                    labels[q] = next;
                    queue.push_back(q);
                }
            }
        }
        next += 1;
    }
    Ok(labels)
}
