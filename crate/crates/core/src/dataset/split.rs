use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::BinarizedDataset;
use crate::{Error, Result};

/// Stratified train/test split, deterministic per seed.
///
/// Each label stratum contributes `round(size * test_fraction)` rows to the
/// test side. Both partitions keep the original row order.
pub fn split(dataset: &BinarizedDataset, test_fraction: f64, seed: u64) -> Result<(BinarizedDataset, BinarizedDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Validation(format!("test fraction must lie in (0, 1), got {test_fraction}")));
    }
    let labels = dataset.labels();
    let (positives, negatives): (Vec<usize>, Vec<usize>) = (0..dataset.rows()).partition(|&i| labels.get(i));
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Data(format!(
            "cannot stratify: {} positive and {} negative rows",
            positives.len(),
            negatives.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; dataset.rows()];
    for mut stratum in [positives, negatives] {
        let take = (stratum.len() as f64 * test_fraction).round() as usize;
        stratum.shuffle(&mut rng);
        for &i in &stratum[..take] {
            in_test[i] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..dataset.rows()).partition(|&i| in_test[i]);
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Predicate;

    fn balanced(n: usize) -> BinarizedDataset {
        let rows: Vec<Vec<bool>> = (0..n).map(|i| vec![i % 3 == 0]).collect();
        let labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        BinarizedDataset::from_rows(vec![Predicate::greater_than("x", 0.5)], &rows, &labels).unwrap()
    }

    #[test]
    fn exact_stratification() {
        let (train, test) = split(&balanced(100), 0.2, 7).unwrap();
        assert_eq!((train.rows(), test.rows()), (80, 20));
        assert_eq!(test.positives(), 10);
    }

    #[test]
    fn deterministic_disjoint_exhaustive() {
        let data = balanced(57);
        let (a_train, a_test) = split(&data, 0.3, 11).unwrap();
        let (b_train, b_test) = split(&data, 0.3, 11).unwrap();
        assert_eq!(a_train.row_ids(), b_train.row_ids());
        assert_eq!(a_test.row_ids(), b_test.row_ids());
        let mut all: Vec<usize> = a_train.row_ids().unwrap().iter().chain(a_test.row_ids().unwrap()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..57).collect::<Vec<_>>());
    }

    #[test]
    fn bank_sized_stratum_rounding() {
        // 4640 positives and 36548 negatives, as in the 41188-row bank table
        let labels: Vec<bool> = (0..41188).map(|i| i < 4640).collect();
        let rows = vec![vec![]; 41188];
        let data = BinarizedDataset::from_rows(vec![], &rows, &labels).unwrap();
        let (train, test) = split(&data, 0.25, 0).unwrap();
        assert_eq!((train.rows(), test.rows()), (30891, 10297));
        assert_eq!(test.positives(), 1160);
    }

    #[test]
    fn single_class_is_an_error() {
        let rows = vec![vec![true]; 4];
        let data = BinarizedDataset::from_rows(vec![Predicate::greater_than("x", 0.5)], &rows, &[true; 4]).unwrap();
        assert!(split(&data, 0.5, 0).is_err());
        assert!(split(&balanced(10), 1.0, 0).is_err());
    }
}
