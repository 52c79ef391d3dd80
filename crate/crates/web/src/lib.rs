//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export returns a JSON string; the plain-Rust versions are public so
//! they can be tested natively.

use boolrule::bits::BitColumn;
use boolrule::dataset::BinarizedDataset;
use boolrule::formula::{atleast_to_cnf, parse_with_warnings, Operator, OperatorKind, RuleNode};
use boolrule::insight::describe_rule;
use boolrule::metrics::{score_report, ConfusionMatrix};
use boolrule::optimizer::{anneal_with_hook, AnnealTrace, ObjectiveConfig};
use boolrule::{Predicate, Rule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_TABLE_INPUTS: usize = 6;
const PLANTED_FEATURES: usize = 8;
const TRACE_POINTS: usize = 400;
const RESTARTS: usize = 4;

#[derive(Serialize)]
struct TableRow {
    inputs: Vec<bool>,
    count: usize,
    value: bool,
}

/// Truth table of `operator` (`And`, `Or`, `AtLeast`, `AtMost`, `Choose`)
/// over `n` inputs, plus the binomial CNF size when the operator is AtLeast.
pub fn truth_table_json(operator: &str, k: usize, n: usize) -> Result<String, String> {
    if !(2..=MAX_TABLE_INPUTS).contains(&n) {
        return Err(format!("inputs must be between 2 and {MAX_TABLE_INPUTS}"));
    }
    let kind = OperatorKind::ALL
        .into_iter()
        .find(|kind| kind.to_string().eq_ignore_ascii_case(operator))
        .ok_or_else(|| format!("unknown operator `{operator}`"))?;
    if kind.is_parameterized() && k > n {
        return Err(format!("k = {k} exceeds the {n} inputs"));
    }
    let op: Operator = kind.with_k(k);
    let node = RuleNode::op(op, (0..n).map(RuleNode::literal).collect());
    let rows: Vec<TableRow> = (0..1usize << n)
        .map(|mask| {
            let inputs: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let value = node.evaluate(&inputs).map_err(|e| e.to_string())?;
            Ok(TableRow { count: inputs.iter().filter(|&&b| b).count(), inputs, value })
        })
        .collect::<Result<_, String>>()?;
    let cnf = match op {
        Operator::AtLeast(k) if k >= 1 => {
            let f = atleast_to_cnf(k, n).map_err(|e| e.to_string())?;
            Some(json!({"clauses": f.clauses.len(), "literals": f.literal_count()}))
        }
        _ => None,
    };
    let true_rows = rows.iter().filter(|r| r.value).count();
    Ok(json!({"operator": op.to_string(), "rows": rows, "true_rows": true_rows, "cnf": cnf}).to_string())
}

/// Parses rule text and reports its canonical form, size and plain-English reading.
pub fn describe_json(text: &str) -> Result<String, String> {
    let (rule, warnings) = parse_with_warnings(text).map_err(|e| e.to_string())?;
    let description = describe_rule(&rule, None, 0.0).map_err(|e| e.to_string())?;
    Ok(json!({
        "rule": rule.to_text(),
        "complexity": rule.complexity(),
        "depth": rule.depth(),
        "description": description.text,
        "warnings": warnings.iter().map(|w| w.message.clone()).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Anneals on a synthetic dataset labelled by `AtLeast3(f0, ..., f4)` and
/// returns the learned rule with a down-sampled trace.
pub fn planted_anneal_json(rows: usize, iterations: usize, seed: u64) -> Result<String, String> {
    if !(50..=5000).contains(&rows) || !(100..=50_000).contains(&iterations) {
        return Err("rows must lie in 50..=5000 and iterations in 100..=50000".into());
    }
    let data = planted_dataset(rows, seed);
    let cfg = ObjectiveConfig {
        lambda: 0.005,
        max_complexity: 8,
        iterations,
        seed,
        ..ObjectiveConfig::default()
    };
    // Independent restarts, keeping the run whose best objective is highest.
    let mut best: Option<(usize, Rule, AnnealTrace)> = None;
    for restart in 0..RESTARTS {
        let (rule, trace) =
            anneal_with_hook(&data, &cfg, seed.wrapping_add(restart as u64), |_| {}).map_err(|e| e.to_string())?;
        let last = |t: &AnnealTrace| t.steps.last().map_or(f64::NEG_INFINITY, |s| s.best_objective);
        if best.as_ref().is_none_or(|(_, _, t)| last(&trace) > last(t)) {
            best = Some((restart, rule, trace));
        }
    }
    let (restart, rule, full_trace) = best.expect("at least one restart");
    let stride = (iterations / TRACE_POINTS).max(1);
    let trace: Vec<_> = full_trace
        .steps
        .iter()
        .enumerate()
        .step_by(stride)
        .map(|(i, s)| json!([i, s.temperature, s.candidate_objective.max(-1.0), s.best_objective]))
        .collect();
    let predictions = rule.predict(&data).map_err(|e| e.to_string())?;
    let cm = ConfusionMatrix::from_bits(&predictions, data.labels()).map_err(|e| e.to_string())?;
    Ok(json!({
        "rule": rule.to_text(),
        "complexity": rule.complexity(),
        "restart": restart,
        "metrics": score_report(&cm),
        "trace": trace,
    })
    .to_string())
}

fn planted_dataset(rows: usize, seed: u64) -> BinarizedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let predicates: Vec<Predicate> = (0..PLANTED_FEATURES).map(|i| Predicate::greater_than(format!("f{i}"), 0.5)).collect();
    let mut columns = vec![BitColumn::zeros(rows); PLANTED_FEATURES];
    let mut labels = BitColumn::zeros(rows);
    for r in 0..rows {
        let mut count = 0;
        for (i, col) in columns.iter_mut().enumerate() {
            let bit = rng.gen_bool(0.5);
            col.set(r, bit);
            if bit && i < 5 {
                count += 1;
            }
        }
        labels.set(r, count >= 3);
    }
    BinarizedDataset::new(predicates, columns, labels).expect("consistent planted dataset")
}

#[wasm_bindgen]
pub fn truth_table(operator: &str, k: usize, n: usize) -> Result<String, JsError> {
    truth_table_json(operator, k, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn describe(text: &str) -> Result<String, JsError> {
    describe_json(text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn planted_anneal(rows: usize, iterations: usize, seed: u64) -> Result<String, JsError> {
    planted_anneal_json(rows, iterations, seed).map_err(|e| JsError::new(&e))
}
