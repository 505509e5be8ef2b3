//! Pairwise similarity between dataset items.
//!
//! An item may carry several features; each feature column has its own
//! similarity function and the per-feature scores are averaged into the
//! single `[0, 1]` similarity the ants compare against their templates.

mod descriptor;
mod io;
mod matrix;

use std::sync::Arc;

use thiserror::Error;

pub use descriptor::{hamming_distance, sim_descriptor_sets, DescriptorSet, DEFAULT_DESCRIPTOR_WIDTH};
pub use io::{
    decode_descriptor_container, encode_descriptor_container, encode_descriptor_hex,
    load_descriptor_sets, load_descriptor_sets_hex, load_scalar_csv, parse_descriptor_hex,
    parse_scalar_csv, DESCRIPTOR_MAGIC,
};
pub use matrix::{load_similarity_matrix, parse_similarity_matrix, SimilarityMatrix, SYMMETRY_TOLERANCE};

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("feature value {value} at item {item} is outside [0, 1]")]
    InvalidFeature { item: usize, value: f64 },

    #[error("incompatible descriptors: width {expected} bytes vs {got} bytes")]
    IncompatibleDescriptor { expected: usize, got: usize },

    #[error("descriptor set is empty")]
    EmptyDescriptorSet,

    #[error("descriptor width must be positive")]
    ZeroWidth,

    #[error("cannot aggregate an empty list of similarities")]
    EmptyAggregation,

    #[error("no feature columns configured")]
    NoColumns,

    #[error("column {column} has {got} items, expected {expected}")]
    ColumnLength { column: usize, expected: usize, got: usize },

    #[error("item index {index} out of bounds for {len} items")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix shape error at line {line}: expected {expected} values, found {got}")]
    Shape { line: usize, expected: usize, got: usize },

    #[error("matrix entry ({row}, {col}) = {value} is outside [0, 1]")]
    OutOfRange { row: usize, col: usize, value: f64 },

    #[error("matrix diagonal entry ({row}, {row}) = {value}, expected 1")]
    Diagonal { row: usize, value: f64 },

    #[error("matrix is asymmetric at ({row}, {col}): {upper} vs {lower}")]
    Asymmetric { row: usize, col: usize, upper: f64, lower: f64 },

    #[error("not a descriptor container (bad magic bytes)")]
    BadMagic,

    #[error("descriptor container truncated while reading item {item}")]
    Truncated { item: usize },

    #[error("item {item} has zero descriptors")]
    EmptyItem { item: usize },

    #[error("item {item}: descriptor width {got} bytes, expected {expected}")]
    WidthMismatch { item: usize, expected: usize, got: usize },

    #[error("{0} trailing bytes after the last item")]
    TrailingBytes(usize),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Something that can report the similarity of any two of its `len()` items.
///
/// Implementations are validated at construction, so lookups cannot fail;
/// indices out of bounds panic like slice indexing.
pub trait SimilaritySource: Sync {
    fn len(&self) -> usize;

    fn similarity(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `1 - |x - y|` for two features already scaled into `[0, 1]`.
pub fn sim_scalar(x: f64, y: f64) -> Result<f64, SimilarityError> {
    for v in [x, y] {
        if !(0.0..=1.0).contains(&v) {
            return Err(SimilarityError::InvalidFeature { item: 0, value: v });
        }
    }
    Ok(1.0 - (x - y).abs())
}

/// Min-max scales a column into `[0, 1]`; a constant column maps to 0.5.
pub fn normalize_scalar_features(column: &[f64]) -> Vec<f64> {
    let (min, max) = column
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if max <= min {
        return vec![0.5; column.len()];
    }
    let span = max - min;
    column
        .iter()
        .map(|&v| ((v - min) / span).clamp(0.0, 1.0))
        .collect()
}

/// Arithmetic mean of the per-feature similarities.
pub fn aggregate_similarity(per_feature: &[f64]) -> Result<f64, SimilarityError> {
    if per_feature.is_empty() {
        return Err(SimilarityError::EmptyAggregation);
    }
    Ok(per_feature.iter().sum::<f64>() / per_feature.len() as f64)
}

/// One feature of every dataset item.
#[derive(Debug, Clone)]
pub enum FeatureColumn {
    /// Real-valued feature, expected in `[0, 1]`.
    Scalar(Vec<f64>),
    /// Binary descriptor sets compared by best-match Hamming distance.
    Descriptor(Vec<DescriptorSet>),
    /// Precomputed per-pair similarities.
    Matrix(Arc<SimilarityMatrix>),
}

impl FeatureColumn {
    /// Builds a scalar column from raw values, min-max normalized.
    pub fn scalar_normalized(raw: &[f64]) -> Self {
        FeatureColumn::Scalar(normalize_scalar_features(raw))
    }

    pub fn len(&self) -> usize {
        match self {
            FeatureColumn::Scalar(v) => v.len(),
            FeatureColumn::Descriptor(v) => v.len(),
            FeatureColumn::Matrix(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<(), SimilarityError> {
        match self {
            FeatureColumn::Scalar(values) => {
                for (item, &value) in values.iter().enumerate() {
                    if !(0.0..=1.0).contains(&value) {
                        return Err(SimilarityError::InvalidFeature { item, value });
                    }
                }
            }
            FeatureColumn::Descriptor(sets) => {
                if let Some(first) = sets.first() {
                    for (item, set) in sets.iter().enumerate() {
                        if set.width() != first.width() {
                            return Err(SimilarityError::WidthMismatch {
                                item,
                                expected: first.width(),
                                got: set.width(),
                            });
                        }
                    }
                }
            }
            FeatureColumn::Matrix(_) => {}
        }
        Ok(())
    }

    fn pair(&self, i: usize, j: usize) -> Result<f64, SimilarityError> {
        match self {
            FeatureColumn::Scalar(v) => sim_scalar(v[i], v[j]),
            FeatureColumn::Descriptor(sets) => sim_descriptor_sets(&sets[i], &sets[j]),
            FeatureColumn::Matrix(m) => Ok(m.get(i, j)),
        }
    }
}

/// Similarity of items `i` and `j` averaged over all columns.
pub fn pairwise_similarity(
    columns: &[FeatureColumn],
    i: usize,
    j: usize,
) -> Result<f64, SimilarityError> {
    if columns.is_empty() {
        return Err(SimilarityError::NoColumns);
    }
    let mut per_feature = Vec::with_capacity(columns.len());
    for col in columns {
        let len = col.len();
        for index in [i, j] {
            if index >= len {
                return Err(SimilarityError::IndexOutOfBounds { index, len });
            }
        }
        per_feature.push(col.pair(i, j)?);
    }
    aggregate_similarity(&per_feature)
}

/// A validated set of feature columns of equal length.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    columns: Vec<FeatureColumn>,
    len: usize,
}

impl FeatureSet {
    pub fn new(columns: Vec<FeatureColumn>) -> Result<Self, SimilarityError> {
        let first = columns.first().ok_or(SimilarityError::NoColumns)?;
        let len = first.len();
        if len == 0 {
            return Err(SimilarityError::EmptyDataset);
        }
        for (column, col) in columns.iter().enumerate() {
            if col.len() != len {
                return Err(SimilarityError::ColumnLength {
                    column,
                    expected: len,
                    got: col.len(),
                });
            }
            col.validate()?;
        }
        Ok(Self { columns, len })
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn pairwise(&self, i: usize, j: usize) -> Result<f64, SimilarityError> {
        pairwise_similarity(&self.columns, i, j)
    }
}

impl SimilaritySource for FeatureSet {
    fn len(&self) -> usize {
        self.len
    }

    fn similarity(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.len && j < self.len, "item index out of bounds");
        let sum: f64 = self
            .columns
            .iter()
            .map(|c| c.pair(i, j).expect("columns validated at construction"))
            .sum();
        sum / self.columns.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_similarity() {
        assert_eq!(sim_scalar(0.5, 0.5).unwrap(), 1.0);
        assert_eq!(sim_scalar(0.0, 1.0).unwrap(), 0.0);
        assert!((sim_scalar(0.2, 0.5).unwrap() - 0.7).abs() < 1e-15);
        assert!(matches!(
            sim_scalar(1.2, 0.5),
            Err(SimilarityError::InvalidFeature { .. })
        ));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_scalar_features(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize_scalar_features(&[0.0, 1.0]), vec![0.0, 1.0]);
        assert_eq!(normalize_scalar_features(&[3.0, 3.0, 3.0]), vec![0.5; 3]);
    }

    #[test]
    fn aggregation() {
        assert_eq!(aggregate_similarity(&[1.0, 0.5]).unwrap(), 0.75);
        assert_eq!(aggregate_similarity(&[0.3]).unwrap(), 0.3);
        assert!((aggregate_similarity(&[0.0, 0.0, 1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            aggregate_similarity(&[]),
            Err(SimilarityError::EmptyAggregation)
        ));
    }

    #[test]
    fn pairwise_examples() {
        let cols = vec![FeatureColumn::Scalar(vec![0.0, 1.0])];
        assert_eq!(pairwise_similarity(&cols, 0, 1).unwrap(), 0.0);
        assert_eq!(pairwise_similarity(&cols, 1, 1).unwrap(), 1.0);

        let m = SimilarityMatrix::new(2, vec![1.0, 0.9, 0.9, 1.0]).unwrap();
        let cols = vec![
            FeatureColumn::Scalar(vec![0.2, 0.5]),
            FeatureColumn::Matrix(Arc::new(m)),
        ];
        assert!((pairwise_similarity(&cols, 0, 1).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            pairwise_similarity(&cols, 0, 2),
            Err(SimilarityError::IndexOutOfBounds { index: 2, len: 2 })
        ));
        assert!(matches!(
            pairwise_similarity(&[], 0, 0),
            Err(SimilarityError::NoColumns)
        ));
    }

    #[test]
    fn feature_set_validation() {
        assert!(matches!(FeatureSet::new(vec![]), Err(SimilarityError::NoColumns)));
        let err = FeatureSet::new(vec![
            FeatureColumn::Scalar(vec![0.0, 1.0]),
            FeatureColumn::Scalar(vec![0.0]),
        ])
        .unwrap_err();
        assert!(matches!(err, SimilarityError::ColumnLength { column: 1, .. }));
        let err = FeatureSet::new(vec![FeatureColumn::Scalar(vec![0.0, 2.0])]).unwrap_err();
        assert!(matches!(err, SimilarityError::InvalidFeature { item: 1, .. }));
    }

    fn descriptor_strategy() -> impl Strategy<Value = DescriptorSet> {
        prop::collection::vec(prop::collection::vec(any::<u8>(), 4), 1..5)
            .prop_map(|d| DescriptorSet::new(4, d).unwrap())
    }

    proptest! {
        #[test]
        fn mixed_columns_symmetric_identity_and_range(
            scalars in prop::collection::vec(0.0f64..=1.0, 2..12),
            descs in prop::collection::vec(descriptor_strategy(), 12),
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let n = scalars.len();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut values = vec![1.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v: f64 = rng.random();
                    values[i * n + j] = v;
                    values[j * n + i] = v;
                }
            }
            let set = FeatureSet::new(vec![
                FeatureColumn::Scalar(scalars),
                FeatureColumn::Descriptor(descs[..n].to_vec()),
                FeatureColumn::Matrix(Arc::new(SimilarityMatrix::new(n, values).unwrap())),
            ]).unwrap();
            for i in 0..n {
                prop_assert_eq!(set.similarity(i, i), 1.0);
                for j in 0..n {
                    let s = set.similarity(i, j);
                    prop_assert_eq!(s, set.similarity(j, i));
                    prop_assert!((0.0..=1.0).contains(&s));
                    prop_assert_eq!(s, set.pairwise(i, j).unwrap());
                }
            }
        }
    }
}
