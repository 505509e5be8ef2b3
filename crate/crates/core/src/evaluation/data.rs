//! Synthetic labeled datasets.

use rand::seq::index::sample;
use rand::Rng;

use super::EvaluationError;
use crate::similarity::{DescriptorSet, DEFAULT_DESCRIPTOR_WIDTH};

/// Half-width of the uniform noise around each integer pivot.
pub const PIVOT_NOISE: f64 = 0.1;

/// Upper bound on the Hamming distance between two descriptors of one cluster.
pub const FIXTURE_INTRA_MAX_BITS: u32 = 32;
/// Lower bound on the Hamming distance between descriptors of different clusters.
pub const FIXTURE_INTER_MIN_BITS: u32 = 96;

/// Scalar items with their ground-truth cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub values: Vec<f64>,
    pub truth: Vec<usize>,
}

/// Descriptor-set items with their ground-truth cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorDataset {
    pub items: Vec<DescriptorSet>,
    pub truth: Vec<usize>,
}

/// Cluster `k` (0-based) draws `per_cluster` values uniformly from
/// `[k + 1 - 0.1, k + 1 + 0.1]`. Items are grouped by cluster.
pub fn generate_float_dataset<R: Rng + ?Sized>(
    n_clusters: usize,
    per_cluster: usize,
    rng: &mut R,
) -> Result<LabeledDataset, EvaluationError> {
    if n_clusters == 0 || per_cluster == 0 {
        return Err(EvaluationError::InvalidArgument(
            "cluster count and tuples per cluster must be positive".into(),
        ));
    }
    let mut values = Vec::with_capacity(n_clusters * per_cluster);
    let mut truth = Vec::with_capacity(n_clusters * per_cluster);
    for k in 0..n_clusters {
        let pivot = (k + 1) as f64;
        for _ in 0..per_cluster {
            values.push(pivot + rng.random_range(-PIVOT_NOISE..=PIVOT_NOISE));
            truth.push(k);
        }
    }
    Ok(LabeledDataset { values, truth })
}

/// Bit `b` of row `k` of the 256×256 Sylvester–Hadamard code. Distinct rows
/// differ in exactly 128 bits.
fn walsh_bit(k: usize, b: usize) -> bool {
    (k & b).count_ones() % 2 == 1
}

/// Planted descriptor clusters of 256-bit descriptors.
///
/// Each cluster has a centre: a shared random mask XOR a distinct Hadamard
/// row, so centres are exactly 128 bits apart. Every descriptor flips at most
/// `FIXTURE_INTRA_MAX_BITS / 2` random bits of its cluster centre, which bounds
/// intra-cluster distances by 32 bits and inter-cluster distances below by
/// 128 - 32 = 96 bits.
pub fn generate_descriptor_dataset<R: Rng + ?Sized>(
    n_clusters: usize,
    per_cluster: usize,
    descriptors_per_item: usize,
    rng: &mut R,
) -> Result<DescriptorDataset, EvaluationError> {
    const BITS: usize = DEFAULT_DESCRIPTOR_WIDTH * 8;
    if n_clusters == 0 || per_cluster == 0 || descriptors_per_item == 0 {
        return Err(EvaluationError::InvalidArgument(
            "cluster count, tuples and descriptors per item must be positive".into(),
        ));
    }
    if n_clusters > BITS {
        return Err(EvaluationError::InvalidArgument(format!(
            "descriptor fixture supports at most {BITS} clusters"
        )));
    }
    let mut mask = [0u8; DEFAULT_DESCRIPTOR_WIDTH];
    rng.fill(&mut mask[..]);
    let centres: Vec<[u8; DEFAULT_DESCRIPTOR_WIDTH]> = (0..n_clusters)
        .map(|k| {
            let mut c = mask;
            for b in 0..BITS {
                if walsh_bit(k, b) {
                    c[b / 8] ^= 1 << (b % 8);
                }
            }
            c
        })
        .collect();

    let max_flips = (FIXTURE_INTRA_MAX_BITS / 2) as usize;
    let mut items = Vec::with_capacity(n_clusters * per_cluster);
    let mut truth = Vec::with_capacity(n_clusters * per_cluster);
    for (k, centre) in centres.iter().enumerate() {
        for _ in 0..per_cluster {
            let descriptors: Vec<[u8; DEFAULT_DESCRIPTOR_WIDTH]> = (0..descriptors_per_item)
                .map(|_| {
                    let mut d = *centre;
                    let flips = rng.random_range(0..=max_flips);
                    for b in sample(rng, BITS, flips) {
                        d[b / 8] ^= 1 << (b % 8);
                    }
                    d
                })
                .collect();
            items.push(DescriptorSet::new(DEFAULT_DESCRIPTOR_WIDTH, descriptors)?);
            truth.push(k);
        }
    }
    Ok(DescriptorDataset { items, truth })
}
