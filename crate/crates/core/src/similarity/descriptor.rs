//! Binary descriptor sets and best-match Hamming similarity.

use super::SimilarityError;

/// ORB-style descriptors are 256 bits.
pub const DEFAULT_DESCRIPTOR_WIDTH: usize = 32;

/// The descriptors extracted from one item, all of the same byte width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorSet {
    width: usize,
    data: Vec<u8>,
}

impl DescriptorSet {
    pub fn new<D: AsRef<[u8]>>(width: usize, descriptors: impl IntoIterator<Item = D>) -> Result<Self, SimilarityError> {
        if width == 0 {
            return Err(SimilarityError::ZeroWidth);
        }
        let mut data = Vec::new();
        for d in descriptors {
            let d = d.as_ref();
            if d.len() != width {
                return Err(SimilarityError::IncompatibleDescriptor {
                    expected: width,
                    got: d.len(),
                });
            }
            data.extend_from_slice(d);
        }
        if data.is_empty() {
            return Err(SimilarityError::EmptyDescriptorSet);
        }
        Ok(Self { width, data })
    }

    /// Wraps `count * width` contiguous bytes.
    pub(crate) fn from_flat(width: usize, data: Vec<u8>) -> Self {
        debug_assert!(width > 0 && !data.is_empty() && data.len().is_multiple_of(width));
        Self { width, data }
    }

    /// Descriptor width in bytes.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.width)
    }
}

/// Number of differing bits between two equal-length byte strings.
#[inline]
pub fn hamming_distance(a: &[u8], b: &[u8]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    let mut a8 = a.chunks_exact(8);
    let mut b8 = b.chunks_exact(8);
    let mut total = 0;
    for (x, y) in (&mut a8).zip(&mut b8) {
        let x = u64::from_le_bytes(x.try_into().unwrap());
        let y = u64::from_le_bytes(y.try_into().unwrap());
        total += (x ^ y).count_ones();
    }
    for (x, y) in a8.remainder().iter().zip(b8.remainder()) {
        total += (x ^ y).count_ones();
    }
    total
}

/// `1 - d_min / (8 * width)` where `d_min` is the smallest Hamming distance
/// over every cross pair of descriptors.
pub fn sim_descriptor_sets(a: &DescriptorSet, b: &DescriptorSet) -> Result<f64, SimilarityError> {
    if a.width != b.width {
        return Err(SimilarityError::IncompatibleDescriptor {
            expected: a.width,
            got: b.width,
        });
    }
    let mut best = u32::MAX;
    'outer: for p in a.iter() {
        for q in b.iter() {
            best = best.min(hamming_distance(p, q));
            if best == 0 {
                break 'outer;
            }
        }
    }
    Ok(1.0 - f64::from(best) / (8 * a.width) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bit_oracle(a: &[u8], b: &[u8]) -> u32 {
        let mut n = 0;
        for (x, y) in a.iter().zip(b) {
            for bit in 0..8 {
                if (x >> bit) & 1 != (y >> bit) & 1 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn identical_sets_score_one() {
        let s = DescriptorSet::new(32, [[7u8; 32], [200u8; 32]]).unwrap();
        assert_eq!(sim_descriptor_sets(&s, &s).unwrap(), 1.0);
    }

    #[test]
    fn complements_score_zero() {
        let a = DescriptorSet::new(32, [[0x5au8; 32]]).unwrap();
        let b = DescriptorSet::new(32, [[0xa5u8; 32]]).unwrap();
        assert_eq!(sim_descriptor_sets(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn sixty_four_bits_apart() {
        // First 8 bytes fully inverted: 64 of 256 bits differ.
        let p = [0x3cu8; 32];
        let mut q = p;
        for byte in q.iter_mut().take(8) {
            *byte = !*byte;
        }
        assert_eq!(bit_oracle(&p, &q), 64);
        assert_eq!(hamming_distance(&p, &q), 64);
        let a = DescriptorSet::new(32, [p]).unwrap();
        let b = DescriptorSet::new(32, [q]).unwrap();
        assert_eq!(sim_descriptor_sets(&a, &b).unwrap(), 0.75);
    }

    #[test]
    fn width_mismatch_rejected() {
        let a = DescriptorSet::new(32, [[0u8; 32]]).unwrap();
        let b = DescriptorSet::new(16, [[0u8; 16]]).unwrap();
        assert!(matches!(
            sim_descriptor_sets(&a, &b),
            Err(SimilarityError::IncompatibleDescriptor { expected: 32, got: 16 })
        ));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            DescriptorSet::new(32, Vec::<[u8; 32]>::new()),
            Err(SimilarityError::EmptyDescriptorSet)
        ));
        assert!(matches!(
            DescriptorSet::new(32, [vec![0u8; 31]]),
            Err(SimilarityError::IncompatibleDescriptor { .. })
        ));
        assert!(matches!(
            DescriptorSet::new(0, [Vec::<u8>::new()]),
            Err(SimilarityError::ZeroWidth)
        ));
    }

    fn set(width: usize, max: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        prop::collection::vec(prop::collection::vec(any::<u8>(), width), 1..=max)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hamming_matches_bit_oracle(a in prop::collection::vec(any::<u8>(), 0..70), seed in any::<u8>()) {
            let b: Vec<u8> = a.iter().map(|x| x.wrapping_mul(seed).rotate_left(3)).collect();
            prop_assert_eq!(hamming_distance(&a, &b), bit_oracle(&a, &b));
        }

        #[test]
        fn best_match_equals_brute_force(a in set(32, 50), b in set(32, 50)) {
            let mut d_min = u32::MAX;
            for p in &a {
                for q in &b {
                    d_min = d_min.min(bit_oracle(p, q));
                }
            }
            let expected = 1.0 - d_min as f64 / 256.0;
            let sa = DescriptorSet::new(32, &a).unwrap();
            let sb = DescriptorSet::new(32, &b).unwrap();
            prop_assert_eq!(sim_descriptor_sets(&sa, &sb).unwrap(), expected);
            prop_assert_eq!(sim_descriptor_sets(&sb, &sa).unwrap(), expected);
        }
    }
}
