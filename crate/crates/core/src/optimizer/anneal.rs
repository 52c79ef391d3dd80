use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bits::BitColumn;
use crate::dataset::BinarizedDataset;
use crate::formula::{Rule, RuleNode};
use crate::metrics::{score_report, ConfusionMatrix};
use crate::optimizer::moves::{propose_move, random_rule, to_rule};
use crate::optimizer::ObjectiveConfig;
use crate::{Error, Result};

/// `score - lambda * complexity`, or negative infinity when the rule exceeds
/// the complexity bound.
pub fn objective(rule: &Rule, dataset: &BinarizedDataset, cfg: &ObjectiveConfig) -> Result<f64> {
    let predictions = rule.predict(dataset)?;
    Ok(penalized(metric_score(&predictions, dataset.labels(), cfg)?, rule.complexity(), cfg))
}

fn metric_score(predictions: &BitColumn, labels: &BitColumn, cfg: &ObjectiveConfig) -> Result<f64> {
    let cm = ConfusionMatrix::from_bits(predictions, labels)?;
    Ok(score_report(&cm).get(cfg.metric))
}

fn penalized(score: f64, complexity: usize, cfg: &ObjectiveConfig) -> f64 {
    if complexity > cfg.max_complexity {
        f64::NEG_INFINITY
    } else {
        score - cfg.lambda * complexity as f64
    }
}

/// Metropolis acceptance: improvements always, otherwise with probability
/// `exp(delta / temperature)`.
pub fn accept(delta: f64, temperature: f64, rng: &mut impl Rng) -> bool {
    debug_assert!(temperature > 0.0);
    if delta >= 0.0 {
        return true;
    }
    rng.gen::<f64>() < (delta / temperature).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealStep {
    pub temperature: f64,
    pub candidate_objective: f64,
    pub accepted: bool,
    pub best_objective: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnealTrace {
    pub steps: Vec<AnnealStep>,
}

impl AnnealTrace {
    /// `iteration,temperature,objective,best` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,temperature,objective,best\n");
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{},{}", s.temperature, s.candidate_objective, s.best_objective);
        }
        out
    }
}

/// Memoized scoring over one dataset. Keys are trees over the dataset's own
/// predicate table, which identify a rule exactly as its text would.
struct Evaluator<'a> {
    dataset: &'a BinarizedDataset,
    columns: Vec<&'a BitColumn>,
    cfg: &'a ObjectiveConfig,
    cache: HashMap<RuleNode, (f64, f64)>,
}

impl<'a> Evaluator<'a> {
    fn new(dataset: &'a BinarizedDataset, cfg: &'a ObjectiveConfig) -> Self {
        Evaluator { dataset, columns: dataset.column_refs(), cfg, cache: HashMap::new() }
    }

    /// (objective, metric score)
    fn evaluate(&mut self, node: &RuleNode) -> Result<(f64, f64)> {
        if let Some(&hit) = self.cache.get(node) {
            return Ok(hit);
        }
        let predictions = node.evaluate_columns(&self.columns, self.dataset.rows())?;
        let score = metric_score(&predictions, self.dataset.labels(), self.cfg)?;
        let value = (penalized(score, node.complexity(), self.cfg), score);
        self.cache.insert(node.clone(), value);
        Ok(value)
    }
}

fn check_inputs(dataset: &BinarizedDataset, cfg: &ObjectiveConfig) -> Result<()> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::Data("cannot fit rules on an empty dataset".into()));
    }
    if dataset.width() < 2 {
        return Err(Error::Data(format!("need at least 2 predicate columns, got {}", dataset.width())));
    }
    Ok(())
}

/// One annealing run seeded with `cfg.seed`. Returns the best rule visited
/// (with its metric score attached) and the per-iteration trace.
pub fn anneal(dataset: &BinarizedDataset, cfg: &ObjectiveConfig) -> Result<(Rule, AnnealTrace)> {
    anneal_with_hook(dataset, cfg, cfg.seed, |_| {})
}

/// [`anneal`] with an explicit seed and a callback that sees every candidate tree.
pub fn anneal_with_hook(
    dataset: &BinarizedDataset,
    cfg: &ObjectiveConfig,
    seed: u64,
    mut hook: impl FnMut(&RuleNode),
) -> Result<(Rule, AnnealTrace)> {
    check_inputs(dataset, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(dataset, cfg);
    let predicate_count = dataset.width();

    let mut current = random_rule(predicate_count, cfg, &mut rng);
    hook(&current);
    let (mut current_objective, mut current_score) = eval.evaluate(&current)?;
    let mut best = current.clone();
    let (mut best_objective, mut best_score) = (current_objective, current_score);
    let mut temperature = cfg.initial_temperature;
    let mut trace = AnnealTrace { steps: Vec::with_capacity(cfg.iterations) };

    for _ in 0..cfg.iterations {
        let (_, candidate) = propose_move(&current, predicate_count, cfg, &mut rng);
        debug_assert!(candidate.validate(predicate_count, Some(cfg.max_depth)).is_ok());
        debug_assert!(candidate.complexity() <= cfg.max_complexity);
        hook(&candidate);
        let (objective, score) = eval.evaluate(&candidate)?;
        let accepted = objective.is_finite() && accept(objective - current_objective, temperature, &mut rng);
        if accepted {
            current = candidate;
            current_objective = objective;
            current_score = score;
            if current_objective > best_objective {
                best = current.clone();
                best_objective = current_objective;
                best_score = current_score;
            }
        }
        trace.steps.push(AnnealStep { temperature, candidate_objective: objective, accepted, best_objective });
        temperature *= cfg.cooling_rate;
    }
    let _ = current_score;
    Ok((to_rule(best, dataset.predicates()).with_score(best_score), trace))
}

/// Rules from independent restarts, best first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

/// Runs `cfg.restarts` annealing runs with seeds `seed, seed + 1, ...`,
/// drops duplicate rules (same text) and sorts by objective, best first.
pub fn fit(dataset: &BinarizedDataset, cfg: &ObjectiveConfig) -> Result<RuleSet> {
    check_inputs(dataset, cfg)?;
    let seeds: Vec<u64> = (0..cfg.restarts as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let run = |&seed: &u64| anneal_with_hook(dataset, cfg, seed, |_| {}).map(|(rule, _)| rule);
    #[cfg(feature = "parallel")]
    let results: Result<Vec<Rule>> = seeds.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Result<Vec<Rule>> = seeds.iter().map(run).collect();

    let mut keyed: Vec<(String, Rule)> = results?.into_iter().map(|r| (r.to_text(), r)).collect();
    let rank = |r: &Rule| penalized(r.score.unwrap_or(f64::NEG_INFINITY), r.complexity(), cfg);
    keyed.sort_by(|a, b| rank(&b.1).total_cmp(&rank(&a.1)).then_with(|| a.0.cmp(&b.0)));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(RuleSet { rules: keyed.into_iter().map(|(_, r)| r).collect() })
}
