use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use boolrule::dataset::{self, BinarizationSpec, BinarizedDataset, FeatureMetadata, RawDataset, RawRow};
use boolrule::insight::{self, RuleCluster};
use boolrule::llm::{self, FeatureSelectionResult, MockProvider, Provider, Task, ThresholdRecommendation};
use boolrule::metrics::{score_report, ConfusionMatrix, ScoreReport};
use boolrule::model::{ModelFile, SchemaEntry, SplitSettings, StoredRule, MISSING_VALUE_POLICY, MODEL_VERSION};
use boolrule::optimizer;
use boolrule::{Error, Result, Rule};
use serde::Serialize;

use crate::config::RunConfig;

/// Destination of a command's primary output.
pub struct Output(pub Option<PathBuf>);

impl Output {
    fn write(&self, text: &str) -> Result<()> {
        match &self.0 {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Io { path: path.clone(), source: e }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn json(&self, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(&text)
    }
}

pub fn summarize(cfg: &RunConfig, out: &Output) -> Result<()> {
    let data = load_data(cfg)?;
    if data.rows() == 0 {
        log::warn!("dataset has no rows; writing an empty summary");
    }
    out.json(&dataset::summarize(&data.schema, &data.columns))
}

pub fn select_features(cfg: &RunConfig, out: &Output) -> Result<()> {
    let data = load_data(cfg)?;
    let provider = require_provider(cfg)?;
    let objective = cfg
        .objective_text
        .clone()
        .unwrap_or_else(|| format!("predict whether `{}` equals `{}`", cfg.target, cfg.positive_label));
    let prompt = llm::build_feature_selection_prompt(&data.schema, &objective, &cfg.dataset_reference, &cfg.model_type)?;
    let reply = llm::complete(provider.as_ref(), Task::FeatureSelection, &prompt, cfg.selection_temperature())?;
    let result = llm::validate_feature_selection(&llm::extract_json(&reply)?, &data.schema)?;
    report_warnings(&result.warnings);
    eprintln!("selected {} of {} features", result.selected.len(), data.schema.len());
    out.json(&result)
}

pub fn suggest_thresholds(cfg: &RunConfig, out: &Output) -> Result<()> {
    let data = restricted_data(cfg)?;
    let provider = require_provider(cfg)?;
    let summaries = dataset::summarize(&data.schema, &data.columns);
    let prompt = llm::build_threshold_prompt(&summaries)?;
    let reply = llm::complete(provider.as_ref(), Task::Thresholds, &prompt, cfg.selection_temperature())?;
    let result = llm::validate_thresholds(&llm::extract_json(&reply)?, &summaries)?;
    report_warnings(&result.warnings);
    out.json(&result)
}

pub fn binarize(cfg: &RunConfig, out: &Output, matrix: Option<&Path>) -> Result<()> {
    let data = restricted_data(cfg)?;
    let spec = build_spec(cfg, &data)?;
    if let Some(path) = matrix {
        let binarized = spec.apply(&data)?;
        std::fs::write(path, matrix_csv(&binarized)).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
        eprintln!("wrote {} rows x {} predicates to {}", binarized.rows(), binarized.width(), path.display());
    }
    out.json(&spec)
}

pub fn train(cfg: &RunConfig, out: &Output, trace: Option<&Path>) -> Result<()> {
    let data = restricted_data(cfg)?;
    let spec = build_spec(cfg, &data)?;
    let binarized = spec.apply(&data)?;
    let (train, holdout) = dataset::split(&binarized, cfg.test_fraction, cfg.seed)?;
    log::info!("training on {} rows, {} predicates", train.rows(), train.width());

    if let Some(path) = trace {
        let (_, t) = optimizer::anneal(&train, &cfg.objective)?;
        std::fs::write(path, t.to_csv()).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    }
    let set = optimizer::fit(&train, &cfg.objective)?;
    let rules = set
        .rules
        .iter()
        .map(|rule| {
            let (confusion, holdout_report) = score(rule, &holdout)?;
            Ok(StoredRule {
                rule: rule.to_text(),
                score: rule.score.unwrap_or(f64::NEG_INFINITY),
                complexity: rule.complexity(),
                holdout: holdout_report,
                confusion,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let model = ModelFile {
        version: MODEL_VERSION,
        target: cfg.target.clone(),
        positive_label: cfg.positive_label.clone(),
        schema_digest: data.schema.iter().map(|f| SchemaEntry { name: f.name.clone(), kind: f.kind }).collect(),
        binarization_spec: spec,
        missing_values: MISSING_VALUE_POLICY.into(),
        split: SplitSettings { test_fraction: cfg.test_fraction, seed: cfg.seed },
        config: cfg.objective.clone(),
        rules,
    };
    if let Some(best) = model.rules.first() {
        eprintln!("best rule: {}", best.rule);
        eprintln!("holdout: {}", metrics_line(&best.holdout));
    }
    out.write(&model.to_json())
}

#[derive(Serialize)]
struct EvaluationReport {
    evaluated_on: &'static str,
    rows: usize,
    positives: usize,
    rules: Vec<RuleScore>,
}

#[derive(Serialize)]
struct RuleScore {
    rule: String,
    complexity: usize,
    #[serde(flatten)]
    metrics: ScoreReport,
    confusion: ConfusionMatrix,
}

pub fn evaluate(cfg: &RunConfig, out: &Output, model_path: Option<&Path>, texts: &[String], full: bool) -> Result<()> {
    let extra: Vec<Rule> = texts.iter().map(|t| boolrule::formula::parse(t)).collect::<Result<_>>()?;
    let (rules, dataset, evaluated_on) = match model_path {
        Some(path) => {
            let model = ModelFile::load(path)?;
            let names: Vec<String> = model.schema_digest.iter().map(|e| e.name.clone()).collect();
            let data = load_data(cfg)?.restrict(&names)?;
            let mut spec = model.binarization_spec.clone();
            if !extra.is_empty() {
                let needed = BinarizationSpec::for_rules(&data, &extra, cfg.rare_fraction)?;
                merge_spec(&mut spec, needed);
            }
            let binarized = spec.apply(&data)?;
            let mut rules = model.parsed_rules()?;
            rules.extend(extra);
            if full {
                (rules, binarized, "full")
            } else {
                let (_, holdout) = dataset::split(&binarized, model.split.test_fraction, model.split.seed)?;
                (rules, holdout, "holdout")
            }
        }
        None if !extra.is_empty() => {
            let data = load_data(cfg)?;
            let spec = BinarizationSpec::for_rules(&data, &extra, cfg.rare_fraction)?;
            (extra, spec.apply(&data)?, "full")
        }
        None => return Err(Error::Config("evaluate needs --model or at least one --rule".into())),
    };

    let mut scores = Vec::with_capacity(rules.len());
    for rule in &rules {
        let (confusion, metrics) = score(rule, &dataset)?;
        eprintln!("{}  {}", metrics_line(&metrics), rule);
        scores.push(RuleScore { rule: rule.to_text(), complexity: rule.complexity(), metrics, confusion });
    }
    out.json(&EvaluationReport { evaluated_on, rows: dataset.rows(), positives: dataset.positives(), rules: scores })
}

pub fn explain(cfg: &RunConfig, out: &Output, model_path: &Path, row: Option<usize>, instance: Option<&str>) -> Result<()> {
    let model = ModelFile::load(model_path)?;
    let raw: RawRow = match (row, instance) {
        (_, Some(text)) => parse_instance(text)?,
        (Some(i), None) => {
            let data = load_data(cfg)?;
            data.row(i)
                .ok_or_else(|| Error::Validation(format!("row {i} is out of range (dataset has {} rows)", data.rows())))?
        }
        (None, None) => return Err(Error::Config("explain needs --row or --instance".into())),
    };
    let provider = require_provider(cfg)?;
    let rules = model.parsed_rules()?;
    let top = rules.into_iter().next().ok_or_else(|| Error::Validation("model has no rules".into()))?;
    let explanation = insight::explain_instance(
        std::slice::from_ref(&top),
        &raw,
        &model.binarization_spec,
        &model.schema(),
        provider.as_ref(),
        cfg.interpretation_temperature(),
    )?;
    if !explanation.grounded {
        eprintln!("warning: provider classification contradicted the rule; corrected to {}", explanation.classification);
    }
    out.json(&explanation)
}

pub fn cluster(
    cfg: &RunConfig,
    out: &Output,
    model_path: Option<&Path>,
    texts: &[String],
    k: usize,
    auto_k: bool,
    provider_embeddings: bool,
) -> Result<()> {
    let mut rules = match model_path {
        Some(path) => ModelFile::load(path)?.parsed_rules()?,
        None => Vec::new(),
    };
    for t in texts {
        rules.push(boolrule::formula::parse(t)?);
    }
    if rules.is_empty() {
        return Err(Error::Config("cluster needs --model or at least one --rule".into()));
    }
    let provider = optional_provider(cfg)?;
    let provider = provider.as_deref();
    let temperature = cfg.interpretation_temperature();
    let descriptions = rules
        .iter()
        .map(|r| insight::describe_rule(r, provider, temperature))
        .collect::<Result<Vec<_>>>()?;
    let embedder = if provider_embeddings {
        Some(provider.ok_or_else(|| Error::Config("--provider-embeddings needs a provider or --offline fixtures".into()))?)
    } else {
        None
    };
    let vectors = insight::embed_rules(&descriptions, embedder)?;
    let mut clusters: Vec<RuleCluster> = if auto_k {
        let (chosen, clusters) = insight::select_k(&vectors, 5, cfg.seed)?;
        eprintln!("silhouette selected k = {chosen}");
        clusters
    } else {
        insight::cluster(&vectors, k, cfg.seed)?
    };
    let personas = clusters
        .iter()
        .map(|c| insight::summarize_cluster(c, &descriptions, provider, temperature))
        .collect::<Result<Vec<_>>>()?;
    for (c, p) in clusters.iter_mut().zip(&personas) {
        c.persona = Some(p.clone());
    }
    out.json(&insight::cluster_report(&rules, &clusters, &personas)?)
}

fn load_data(cfg: &RunConfig) -> Result<RawDataset> {
    let path = cfg.data_path()?;
    let mut data = dataset::load_csv(path, &cfg.target, &cfg.positive_label)?;
    if let Some(meta_path) = &cfg.metadata {
        let text = std::fs::read_to_string(meta_path).map_err(|e| Error::Io { path: meta_path.clone(), source: e })?;
        let metadata: BTreeMap<String, FeatureMetadata> = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid metadata {}: {e}", meta_path.display())))?;
        data.apply_metadata(&metadata);
    }
    Ok(data)
}

fn allowlist(cfg: &RunConfig) -> Result<Option<Vec<String>>> {
    if let Some(path) = &cfg.selection {
        let selection: FeatureSelectionResult = read_json(path)?;
        return Ok(Some(selection.selected));
    }
    Ok(cfg.features.clone())
}

fn restricted_data(cfg: &RunConfig) -> Result<RawDataset> {
    let data = load_data(cfg)?;
    match allowlist(cfg)? {
        Some(names) => data.restrict(&names),
        None => Ok(data),
    }
}

/// Quantile defaults with any recommended thresholds merged over them.
fn build_spec(cfg: &RunConfig, data: &RawDataset) -> Result<BinarizationSpec> {
    let mut spec = BinarizationSpec::quantile_default(data, cfg.quantiles, cfg.rare_fraction);
    if let Some(path) = &cfg.thresholds {
        let rec: ThresholdRecommendation = read_json(path)?;
        let (usable, skipped): (BTreeMap<_, _>, BTreeMap<_, _>) =
            rec.thresholds.into_iter().partition(|(name, _)| spec.numeric_thresholds.contains_key(name));
        for name in skipped.keys() {
            log::warn!("ignoring recommended thresholds for `{name}`: not a numeric feature in the current selection");
        }
        spec.merge_thresholds(&usable);
    }
    Ok(spec)
}

fn merge_spec(spec: &mut BinarizationSpec, extra: BinarizationSpec) {
    for (name, ts) in extra.numeric_thresholds {
        let entry = spec.numeric_thresholds.entry(name).or_default();
        entry.extend(ts);
        entry.sort_by(f64::total_cmp);
        entry.dedup();
    }
    for (name, plan) in extra.categorical_plan {
        let entry = spec.categorical_plan.entry(name).or_insert_with(|| plan.clone());
        for c in plan.keep {
            if !entry.keep.contains(&c) {
                entry.keep.push(c);
            }
        }
        entry.collapse_other |= plan.collapse_other;
    }
}

fn score(rule: &Rule, data: &BinarizedDataset) -> Result<(ConfusionMatrix, ScoreReport)> {
    let predictions = rule.predict(data)?;
    let cm = ConfusionMatrix::from_bits(&predictions, data.labels())?;
    Ok((cm, score_report(&cm)))
}

fn metrics_line(r: &ScoreReport) -> String {
    format!(
        "balanced_accuracy={:.4} accuracy={:.4} precision={:.4} recall={:.4} f1={:.4}",
        r.balanced_accuracy, r.accuracy, r.precision, r.recall, r.f1
    )
}

fn matrix_csv(data: &BinarizedDataset) -> String {
    let mut text = String::new();
    for p in data.predicates() {
        let _ = write!(text, "{p},");
    }
    text.push_str("label\n");
    for i in 0..data.rows() {
        for bit in data.row(i) {
            text.push_str(if bit { "1," } else { "0," });
        }
        text.push_str(if data.labels().get(i) { "1\n" } else { "0\n" });
    }
    text
}

fn parse_instance(text: &str) -> Result<RawRow> {
    let mut row = RawRow::new();
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("instance entry `{pair}` is not `name=value`")))?;
        row.insert(name.trim().to_string(), value.trim().to_string());
    }
    if row.is_empty() {
        return Err(Error::Config("instance is empty".into()));
    }
    Ok(row)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid {}: {e}", path.display())))
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn optional_provider(cfg: &RunConfig) -> Result<Option<Box<dyn Provider>>> {
    if cfg.offline || (cfg.provider.is_none() && cfg.fixtures.is_some()) {
        let dir = cfg
            .fixtures
            .as_ref()
            .ok_or_else(|| Error::Config("offline mode needs --fixtures DIR".into()))?;
        return Ok(Some(Box::new(MockProvider::from_dir(dir)?)));
    }
    match &cfg.provider {
        Some(pc) => Ok(Some(Box::new(llm::HttpProvider::new(pc.clone(), llm::ReqwestTransport::new())))),
        None => Ok(None),
    }
}

fn require_provider(cfg: &RunConfig) -> Result<Box<dyn Provider>> {
    optional_provider(cfg)?.ok_or_else(|| {
        Error::Config("no provider configured: pass --offline --fixtures DIR or add a `provider` section to the config".into())
    })
}
