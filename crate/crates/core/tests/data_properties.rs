use boolrule::dataset::{
    quantile_thresholds, split, summarize, BinarizationSpec, FeatureKind, FeatureSchema, FeatureSummary, RawColumn,
    RawDataset, OTHER_CATEGORY,
};
use boolrule::metrics::{confusion, score_report, ConfusionMatrix};
use boolrule::Predicate;
use proptest::prelude::*;

const CATEGORIES: [&str; 5] = ["apr", "mar", "may", "oct", "sep"];

fn schema(name: &str, kind: FeatureKind) -> FeatureSchema {
    FeatureSchema { name: name.into(), kind, description: None, unit: None }
}

fn raw(numbers: Vec<Option<f64>>, categories: Vec<Option<usize>>, labels: Vec<bool>) -> RawDataset {
    RawDataset {
        schema: vec![schema("x", FeatureKind::Numeric), schema("month", FeatureKind::Categorical)],
        columns: vec![
            RawColumn::Numeric(numbers),
            RawColumn::Categorical(categories.into_iter().map(|c| c.map(|i| CATEGORIES[i].to_string())).collect()),
        ],
        labels,
    }
}

fn raw_strategy() -> impl Strategy<Value = RawDataset> {
    (4usize..80).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::option::weighted(0.9, (-50i32..50).prop_map(|v| v as f64 / 4.0)), n),
            prop::collection::vec(prop::option::weighted(0.9, 0usize..5), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(x, m, y)| raw(x, m, y))
    })
}

fn confusion_strategy() -> impl Strategy<Value = ConfusionMatrix> {
    (0usize..60, 0usize..60, 0usize..60, 0usize..60).prop_map(|(tp, fp, tn, fn_)| ConfusionMatrix { tp, fp, tn, fn_ })
}

proptest! {
    #[test]
    fn metrics_are_bounded_and_f1_sits_between(cm in confusion_strategy()) {
        let r = score_report(&cm);
        for v in [r.accuracy, r.precision, r.recall, r.f1, r.balanced_accuracy] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if r.precision > 0.0 && r.recall > 0.0 {
            prop_assert!(r.f1 <= r.precision.max(r.recall) + 1e-12);
            prop_assert!(r.f1 >= r.precision.min(r.recall) - 1e-12);
        }
    }

    #[test]
    fn balanced_accuracy_ignores_positive_duplication(
        rows in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60),
        k in 1usize..=5,
    ) {
        let (pred, label): (Vec<bool>, Vec<bool>) = rows.iter().copied().unzip();
        let base = score_report(&confusion(&pred, &label).unwrap());
        let mut dp = pred.clone();
        let mut dl = label.clone();
        for &(p, l) in rows.iter().filter(|r| r.1) {
            for _ in 0..k {
                dp.push(p);
                dl.push(l);
            }
        }
        let dup = score_report(&confusion(&dp, &dl).unwrap());
        prop_assert!((dup.balanced_accuracy - base.balanced_accuracy).abs() < 1e-12);
    }

    #[test]
    fn majority_predictor_accuracy_is_prevalence(labels in prop::collection::vec(any::<bool>(), 1..100)) {
        let positives = labels.iter().filter(|&&b| b).count();
        let majority = positives * 2 > labels.len();
        let cm = confusion(&vec![majority; labels.len()], &labels).unwrap();
        let expected = positives.max(labels.len() - positives) as f64 / labels.len() as f64;
        prop_assert!((score_report(&cm).accuracy - expected).abs() < 1e-12);
        prop_assert_eq!(cm.total(), labels.len());
    }

    #[test]
    fn summaries_and_thresholds_respect_bounds(data in raw_strategy(), count in 1usize..12) {
        let summaries = summarize(&data.schema, &data.columns);
        let FeatureSummary::Numeric(s) = &summaries[0] else { panic!("numeric first") };
        let RawColumn::Numeric(values) = &data.columns[0] else { unreachable!() };
        if let (Some(min), Some(max)) = (s.min, s.max) {
            let qs: Vec<f64> = s.quantiles.iter().map(|q| q.value).collect();
            prop_assert!(qs.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(qs.iter().all(|&q| min <= q && q <= max));
            let ts = quantile_thresholds(values, count);
            prop_assert!(ts.len() <= count);
            prop_assert!(ts.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(ts.iter().all(|&t| min < t && t < max));
        }
        let FeatureSummary::Categorical(c) = &summaries[1] else { panic!("categorical second") };
        prop_assert_eq!(c.frequencies.values().sum::<usize>() + c.missing, data.rows());
    }

    #[test]
    fn binarization_is_monotone_one_hot_and_pure(data in raw_strategy()) {
        let spec = BinarizationSpec::quantile_default(&data, 9, 0.05);
        let matrix = spec.apply(&data).unwrap();
        prop_assert_eq!(&matrix, &spec.apply(&data).unwrap());
        prop_assert_eq!(matrix.rows(), data.rows());

        let thresholds = &spec.numeric_thresholds["x"];
        let cols: Vec<_> = thresholds
            .iter()
            .map(|&t| matrix.column(matrix.column_index(&Predicate::greater_than("x", t)).unwrap()))
            .collect();
        for row in 0..data.rows() {
            for pair in cols.windows(2) {
                prop_assert!(!pair[1].get(row) || pair[0].get(row));
            }
        }

        let plan = &spec.categorical_plan["month"];
        // OTHER exists only when some category collapses or a value is missing
        let mut names: Vec<String> = plan.keep.clone();
        names.push(OTHER_CATEGORY.into());
        let onehot: Vec<_> = names
            .iter()
            .filter_map(|c| matrix.column_index(&Predicate::equals("month", c.as_str())))
            .map(|i| matrix.column(i))
            .collect();
        for row in 0..data.rows() {
            prop_assert_eq!(onehot.iter().filter(|c| c.get(row)).count(), 1);
        }
    }

    #[test]
    fn column_definitions_ignore_row_order(data in raw_strategy(), rotate in 0usize..80) {
        let n = data.rows();
        let order: Vec<usize> = (0..n).map(|i| (i + rotate) % n).collect();
        let shuffled = data.select_rows(&order);
        let spec = BinarizationSpec::quantile_default(&data, 9, 0.05);
        prop_assert_eq!(&spec, &BinarizationSpec::quantile_default(&shuffled, 9, 0.05));
        let a = spec.apply(&data).unwrap();
        let b = spec.apply(&shuffled).unwrap();
        prop_assert_eq!(a.predicates(), b.predicates());
        for (i, &src) in order.iter().enumerate() {
            prop_assert_eq!(b.row(i), a.row(src));
        }
    }

    #[test]
    fn split_partitions_rows(data in raw_strategy(), seed in any::<u64>(), fraction in 0.05f64..0.95) {
        let matrix = BinarizationSpec::quantile_default(&data, 9, 0.05).apply(&data).unwrap();
        let positives = matrix.positives();
        prop_assume!(positives > 0 && positives < matrix.rows());
        let ids: Vec<usize> = (0..matrix.rows()).collect();
        let matrix = matrix.with_row_ids(ids).unwrap();
        let (train, test) = split(&matrix, fraction, seed).unwrap();
        let mut all: Vec<usize> =
            train.row_ids().unwrap().iter().chain(test.row_ids().unwrap()).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..matrix.rows()).collect::<Vec<_>>());
        let again = split(&matrix, fraction, seed).unwrap();
        prop_assert_eq!(train.row_ids(), again.0.row_ids());
    }
}

#[test]
fn uniform_values_give_decile_thresholds() {
    let values: Vec<Option<f64>> = (1..=100).map(|v| Some(v as f64)).collect();
    let expected: Vec<f64> = (1..=9).map(|i| (i * 10) as f64).collect();
    assert_eq!(quantile_thresholds(&values, 9), expected);
}

#[test]
fn heavy_sentinel_mass_leaves_no_interior_deciles() {
    // 96% of rows at the maximum: every decile equals the maximum and is filtered out.
    let mut values: Vec<Option<f64>> = vec![Some(999.0); 96];
    values.extend([Some(3.0), Some(6.0), Some(4.0), Some(0.0)]);
    assert!(quantile_thresholds(&values, 9).is_empty());
}
