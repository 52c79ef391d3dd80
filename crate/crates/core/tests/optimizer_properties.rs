use std::collections::BTreeMap;

use boolrule::bits::BitColumn;
use boolrule::dataset::BinarizedDataset;
use boolrule::formula::Operator;
use boolrule::metrics::{score_report, ConfusionMatrix};
use boolrule::optimizer::{
    accept, anneal, anneal_with_hook, applicable_kinds, fit, objective, propose_move, random_rule, MoveKind,
    ObjectiveConfig,
};
use boolrule::{Predicate, Rule, RuleNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `rows` random rows over `width` binary features, labelled by `label`.
fn synthetic(rows: usize, width: usize, seed: u64, label: impl Fn(&[bool]) -> bool) -> BinarizedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let predicates = (0..width).map(|i| Predicate::greater_than(format!("f{i}"), 0.5)).collect();
    let data: Vec<Vec<bool>> = (0..rows).map(|_| (0..width).map(|_| rng.gen_bool(0.5)).collect()).collect();
    let labels: Vec<bool> = data.iter().map(|r| label(r)).collect();
    BinarizedDataset::from_rows(predicates, &data, &labels).unwrap()
}

fn planted(seed: u64) -> BinarizedDataset {
    synthetic(500, 10, seed, |r| r[..5].iter().filter(|&&b| b).count() >= 3)
}

fn balanced_accuracy(rule: &Rule, data: &BinarizedDataset) -> f64 {
    let cm = ConfusionMatrix::from_bits(&rule.predict(data).unwrap(), data.labels()).unwrap();
    score_report(&cm).balanced_accuracy
}

#[test]
fn random_rules_are_valid() {
    let cfg = ObjectiveConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let r = random_rule(12, &cfg, &mut rng);
        r.validate(12, Some(cfg.max_depth)).unwrap();
        assert!(r.complexity() <= cfg.max_complexity);
    }
    let shallow = ObjectiveConfig { max_depth: 1, ..ObjectiveConfig::default() };
    for _ in 0..200 {
        let r = random_rule(12, &shallow, &mut rng);
        assert!(r.depth() <= 1);
        assert!(r.children().iter().all(RuleNode::is_literal));
    }
    let a = random_rule(12, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
    let b = random_rule(12, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a, b);
}

#[test]
fn proposals_cover_every_kind_and_stay_valid() {
    let cfg = ObjectiveConfig::default();
    let start = RuleNode::op(
        Operator::AtLeast(1),
        vec![
            RuleNode::literal(0),
            RuleNode::op(Operator::Or, vec![RuleNode::literal(1), RuleNode::not_literal(2)]),
            RuleNode::literal(3),
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen: BTreeMap<MoveKind, usize> = BTreeMap::new();
    for _ in 0..10_000 {
        let (mv, next) = propose_move(&start, 6, &cfg, &mut rng);
        *seen.entry(mv.kind()).or_default() += 1;
        next.validate(6, Some(cfg.max_depth)).unwrap();
        assert!(next.complexity() <= cfg.max_complexity);
        assert_ne!(next, start, "{mv:?}");
    }
    assert_eq!(seen.len(), MoveKind::ALL.len(), "{seen:?}");
}

#[test]
fn random_walk_respects_bounds() {
    let cfg = ObjectiveConfig { max_complexity: 5, ..ObjectiveConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rule = random_rule(8, &cfg, &mut rng);
    for _ in 0..20_000 {
        let before = rule.complexity();
        let (mv, next) = propose_move(&rule, 8, &cfg, &mut rng);
        next.validate(8, Some(cfg.max_depth)).unwrap();
        assert!(next.complexity() <= cfg.max_complexity);
        if before == cfg.max_complexity {
            assert!(next.complexity() <= before, "{mv:?} grew a rule at the bound");
        }
        rule = next;
    }
}

#[test]
fn complexity_bound_disables_growth() {
    let cfg = ObjectiveConfig { max_complexity: 3, ..ObjectiveConfig::default() };
    let full = RuleNode::op(Operator::And, vec![RuleNode::literal(0), RuleNode::literal(1), RuleNode::literal(2)]);
    let kinds = applicable_kinds(&full, 4, &cfg);
    assert!(!kinds.contains(&MoveKind::AddLiteral) && !kinds.contains(&MoveKind::GrowSubtree));
    assert!(kinds.contains(&MoveKind::ToggleNegation));
}

#[test]
fn adjust_k_at_lower_bound_only_increases() {
    let cfg = ObjectiveConfig {
        move_weights: MoveKind::ALL.iter().map(|&k| (k, if k == MoveKind::AdjustK { 1.0 } else { 0.0 })).collect(),
        ..ObjectiveConfig::default()
    };
    let root = RuleNode::op(Operator::AtLeast(0), vec![RuleNode::literal(0), RuleNode::literal(1), RuleNode::literal(2)]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..100 {
        let (mv, next) = propose_move(&root, 3, &cfg, &mut rng);
        assert_eq!(mv.kind(), MoveKind::AdjustK);
        let RuleNode::Operator { op, .. } = next else { panic!() };
        assert_eq!(op, Operator::AtLeast(1));
    }
}

#[test]
fn metropolis_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 100_000;
    let hits = (0..trials).filter(|_| accept(-1.0, 1.0, &mut rng)).count();
    let freq = hits as f64 / trials as f64;
    assert!((freq - (-1f64).exp()).abs() <= 0.01, "{freq}");
    assert!((0..1000).all(|_| accept(0.1, 1e-9, &mut rng)));
    assert_eq!((0..10_000).filter(|_| accept(-5.0, 1e-3, &mut rng)).count(), 0);
}

#[test]
fn objective_penalizes_and_bounds() {
    let data = synthetic(64, 3, 1, |r| r[0]);
    let rule = Rule::new(RuleNode::literal(0), data.predicates().to_vec()).unwrap();
    let cfg = ObjectiveConfig { lambda: 0.0, ..ObjectiveConfig::default() };
    assert_eq!(objective(&rule, &data, &cfg).unwrap(), 1.0);
    let cfg = ObjectiveConfig { lambda: 0.01, ..ObjectiveConfig::default() };
    assert!((objective(&rule, &data, &cfg).unwrap() - 0.99).abs() < 1e-12);
    let wide = Rule::new(RuleNode::op(Operator::Or, vec![RuleNode::literal(0); 11]), data.predicates().to_vec())
        .unwrap();
    assert_eq!(objective(&wide, &data, &ObjectiveConfig::default()).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn single_column_label_is_found_quickly() {
    for seed in 0..5 {
        let data = synthetic(200, 6, 100 + seed, |r| r[2]);
        let cfg = ObjectiveConfig { lambda: 0.0, iterations: 2000, seed, ..ObjectiveConfig::default() };
        let (rule, trace) = anneal(&data, &cfg).unwrap();
        assert_eq!(rule.score, Some(1.0), "seed {seed}: {rule}");
        assert_eq!(trace.steps.last().unwrap().best_objective, 1.0);
    }
}

#[test]
fn zero_iterations_return_the_initial_rule() {
    let data = planted(0);
    let cfg = ObjectiveConfig { iterations: 0, seed: 4, ..ObjectiveConfig::default() };
    let mut first = None;
    let (rule, trace) = anneal_with_hook(&data, &cfg, 4, |n| {
        first.get_or_insert_with(|| n.clone());
    })
    .unwrap();
    assert!(trace.steps.is_empty());
    let initial = Rule::new(first.unwrap(), data.predicates().to_vec()).unwrap();
    assert!(rule.structurally_eq(&initial), "{rule} vs {initial}");
    assert!(rule.score.is_some());
}

#[test]
fn anneal_invariants_hold_on_every_candidate() {
    let data = planted(1);
    let cfg = ObjectiveConfig { iterations: 5000, max_complexity: 6, seed: 8, ..ObjectiveConfig::default() };
    let mut seen = 0;
    let (rule, trace) = anneal_with_hook(&data, &cfg, 8, |n| {
        n.validate(data.width(), Some(cfg.max_depth)).unwrap();
        assert!(n.complexity() <= cfg.max_complexity);
        seen += 1;
    })
    .unwrap();
    assert_eq!(seen, cfg.iterations + 1);
    assert_eq!(trace.steps.len(), cfg.iterations);
    assert!(trace.steps.windows(2).all(|w| w[1].best_objective >= w[0].best_objective));
    assert!(trace.steps.windows(2).all(|w| w[1].temperature < w[0].temperature));
    let best = trace.steps.last().unwrap().best_objective;
    assert!((objective(&rule, &data, &cfg).unwrap() - best).abs() < 1e-12);
    assert!(rule.complexity() <= cfg.max_complexity);
}

#[test]
fn fit_is_deterministic_and_deduplicated() {
    let data = planted(2);
    let cfg = ObjectiveConfig { iterations: 3000, restarts: 4, seed: 17, ..ObjectiveConfig::default() };
    let a = fit(&data, &cfg).unwrap();
    let b = fit(&data, &cfg).unwrap();
    assert_eq!(a, b);
    let texts: Vec<String> = a.rules.iter().map(Rule::to_text).collect();
    assert_eq!(texts, b.rules.iter().map(Rule::to_text).collect::<Vec<_>>());
    let mut unique = texts.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), texts.len());
    assert!(a.rules.len() <= 4 && !a.rules.is_empty());
    assert!(a.rules.iter().all(|r| r.complexity() <= cfg.max_complexity));
    let ranked: Vec<f64> = a.rules.iter().map(|r| objective(r, &data, &cfg).unwrap()).collect();
    assert!(ranked.windows(2).all(|w| w[0] >= w[1]), "{ranked:?}");
    let single = fit(&data, &ObjectiveConfig { restarts: 1, ..cfg }).unwrap();
    assert_eq!(single.rules.len(), 1);
}

#[test]
fn planted_rule_is_recovered() {
    let mut recovered = 0;
    for seed in 0..5 {
        let data = planted(seed);
        let cfg = ObjectiveConfig { lambda: 0.005, max_complexity: 8, seed, ..ObjectiveConfig::default() };
        let best = &fit(&data, &cfg).unwrap().rules[0];
        if balanced_accuracy(best, &data) == 1.0 {
            recovered += 1;
        }
    }
    assert!(recovered >= 4, "recovered in {recovered} of 5 seeds");
}

#[test]
fn invalid_inputs_are_rejected() {
    let data = planted(0);
    assert!(anneal(&data, &ObjectiveConfig { cooling_rate: 1.0, ..ObjectiveConfig::default() }).is_err());
    let narrow = BinarizedDataset::new(
        vec![Predicate::greater_than("f0", 0.5)],
        vec![BitColumn::ones(4)],
        BitColumn::from_bools(&[true, false, true, false]),
    )
    .unwrap();
    assert!(anneal(&narrow, &ObjectiveConfig::default()).is_err());
}
