use std::collections::HashMap;
use std::hash::Hash;

use super::EvaluationError;

fn comb2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn pair_sum(counts: impl Iterator<Item = u64>) -> u64 {
    counts.map(comb2).sum()
}

/// Adjusted Rand Index of two labelings, from the contingency table.
///
/// When both partitions are trivial the chance-corrected denominator is zero;
/// the score is then 1.0 if the partitions agree on every pair and 0.0 otherwise.
pub fn adjusted_rand_index<A, B>(truth: &[A], predicted: &[B]) -> Result<f64, EvaluationError>
where
    A: Eq + Hash,
    B: Eq + Hash,
{
    if truth.len() != predicted.len() {
        return Err(EvaluationError::LengthMismatch {
            left: truth.len(),
            right: predicted.len(),
        });
    }
    let n = truth.len();
    if n < 2 {
        return Err(EvaluationError::TooFewItems(n));
    }

    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    let mut cells: HashMap<(&A, &B), u64> = HashMap::new();
    for (a, b) in truth.iter().zip(predicted) {
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
        *cells.entry((a, b)).or_default() += 1;
    }

    // (index - expected) / (max - expected), scaled by 2 * C(n, 2) so every
    // term is an integer and the only rounding is the final division.
    let index = pair_sum(cells.values().copied()) as i128;
    let sum_rows = pair_sum(rows.values().copied()) as i128;
    let sum_cols = pair_sum(cols.values().copied()) as i128;
    let total = comb2(n as u64) as i128;

    let numerator = 2 * total * index - 2 * sum_rows * sum_cols;
    let denominator = total * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols;
    if denominator == 0 {
        return Ok(if index == sum_rows && index == sum_cols { 1.0 } else { 0.0 });
    }
    Ok(numerator as f64 / denominator as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle over all item pairs.
    fn ari_by_pairs(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let (mut both, mut only_a, mut only_b, mut neither) = (0f64, 0f64, 0f64, 0f64);
        for i in 0..n {
            for j in (i + 1)..n {
                match (a[i] == a[j], b[i] == b[j]) {
                    (true, true) => both += 1.0,
                    (true, false) => only_a += 1.0,
                    (false, true) => only_b += 1.0,
                    (false, false) => neither += 1.0,
                }
            }
        }
        let total = both + only_a + only_b + neither;
        let pa = both + only_a;
        let pb = both + only_b;
        let expected = pa * pb / total;
        let max = 0.5 * (pa + pb);
        if max == expected {
            return if only_a == 0.0 && only_b == 0.0 { 1.0 } else { 0.0 };
        }
        (both - expected) / (max - expected)
    }

    #[test]
    fn examples() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 2]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5);
        assert!((ari_by_pairs(&[0, 0, 1, 1], &[0, 1, 0, 1]) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn trivial_partitions() {
        assert_eq!(adjusted_rand_index(&[0, 0, 0], &[5, 5, 5]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 1, 2], &[2, 1, 0]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn noise_label_is_an_ordinary_label() {
        let truth = [0usize, 0, 1, 1];
        let pred = [0i64, 0, -1, -1];
        assert_eq!(adjusted_rand_index(&truth, &pred).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            adjusted_rand_index(&[0, 1], &[0]),
            Err(EvaluationError::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(
            adjusted_rand_index(&[0], &[0]),
            Err(EvaluationError::TooFewItems(1))
        ));
    }

    fn labels() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (2usize..=200, 1usize..8, 1usize..8).prop_flat_map(|(n, ka, kb)| {
            (
                prop::collection::vec(0..ka, n),
                prop::collection::vec(0..kb, n),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_pair_counting_oracle((a, b) in labels()) {
            let fast = adjusted_rand_index(&a, &b).unwrap();
            prop_assert!((fast - ari_by_pairs(&a, &b)).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&fast));
        }

        #[test]
        fn symmetric((a, b) in labels()) {
            prop_assert_eq!(adjusted_rand_index(&a, &b).unwrap(), adjusted_rand_index(&b, &a).unwrap());
        }

        #[test]
        fn permutation_invariant((a, b) in labels(), shift in 1usize..50) {
            let relabeled: Vec<usize> = b.iter().map(|&l| (l * 7 + shift) % 1000 + 3).collect();
            prop_assert_eq!(adjusted_rand_index(&a, &b).unwrap(), adjusted_rand_index(&a, &relabeled).unwrap());
        }
    }
}
