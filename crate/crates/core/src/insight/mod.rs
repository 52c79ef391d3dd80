//! Rule-set interpretation: natural-language rendering, rule embeddings,
//! clustering into rule families, and grounded per-instance explanations.

mod cluster;
mod describe;
mod embed;
mod explain;

pub use cluster::{cluster, select_k, silhouette, RuleCluster};
pub use describe::{describe_rule, RuleDescription};
pub use embed::{embed_rules, indicator_embeddings, literal_key};
pub use explain::{explain_instance, rule_verdict, Explanation, RuleExplanation, FIDELITY_NOTICE};

use serde::{Deserialize, Serialize};

use crate::llm::{self, Provider, Task};
use crate::{Error, Result, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralCount {
    pub predicate: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub rules: Vec<String>,
    pub persona: String,
    pub top_literals: Vec<LiteralCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub clusters: Vec<ClusterEntry>,
}

/// Literal occurrences across the cluster's rules, most frequent first.
/// Literals are keyed by their printed form, so `pdays<=3` and `~pdays>3`
/// count together.
pub fn top_literals(cluster: &RuleCluster, rules: &[Rule]) -> Result<Vec<LiteralCount>> {
    if cluster.member_indices.is_empty() {
        return Err(Error::Validation(format!("cluster {} has no members", cluster.id)));
    }
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for &i in &cluster.member_indices {
        let rule = rules
            .get(i)
            .ok_or_else(|| Error::Validation(format!("cluster member {i} is out of range")))?;
        rule.root.visit_literals(&mut |p, negated| {
            *counts.entry(literal_key(&rule.predicates[p], negated)).or_default() += 1;
        });
    }
    let mut ranked: Vec<LiteralCount> = counts.into_iter().map(|(predicate, count)| LiteralCount { predicate, count }).collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.predicate.cmp(&b.predicate)));
    Ok(ranked)
}

/// Persona text for a cluster. With a provider that supports summaries this is
/// model prose; otherwise a ranked literal-frequency listing.
pub fn summarize_cluster(
    cluster: &RuleCluster,
    descriptions: &[RuleDescription],
    provider: Option<&dyn Provider>,
    temperature: f64,
) -> Result<String> {
    let rules: Vec<Rule> = descriptions.iter().map(|d| d.rule.clone()).collect();
    let ranked = top_literals(cluster, &rules)?;
    match provider.filter(|p| p.supports(Task::ClusterSummary)) {
        Some(provider) => {
            let mut prompt = String::from(
                "The following Boolean classification rules were grouped into one family because they share \
                 decision logic. Summarize, in one or two sentences, the customer persona or behavioral segment \
                 they describe, naming the dominant features.\n\n",
            );
            for &i in &cluster.member_indices {
                let d = &descriptions[i];
                prompt.push_str(&format!("- {} ({})\n", d.rule, d.text));
            }
            let top: Vec<String> = ranked.iter().take(5).map(|l| format!("{} ({})", l.predicate, l.count)).collect();
            prompt.push_str(&format!("\nMost frequent conditions: {}\n", top.join(", ")));
            prompt.push_str("\nReturn only the summary text.");
            let text = llm::complete(provider, Task::ClusterSummary, &prompt, temperature)?;
            Ok(unwrap_text(&text, &["persona", "summary"]))
        }
        None => Ok(ranked.iter().map(|l| format!("{} ({})", l.predicate, l.count)).collect::<Vec<_>>().join("; ")),
    }
}

/// Assembles the cluster report; `personas[i]` belongs to `clusters[i]`.
pub fn cluster_report(rules: &[Rule], clusters: &[RuleCluster], personas: &[String]) -> Result<ClusterReport> {
    if personas.len() != clusters.len() {
        return Err(Error::Validation("one persona per cluster is required".into()));
    }
    let clusters = clusters
        .iter()
        .zip(personas)
        .map(|(c, persona)| {
            Ok(ClusterEntry {
                id: c.id,
                rules: c.member_indices.iter().map(|&i| rules[i].to_text()).collect(),
                persona: persona.clone(),
                top_literals: top_literals(c, rules)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClusterReport { clusters })
}

/// Provider prose, unwrapped from a JSON object when the model returned one.
fn unwrap_text(text: &str, keys: &[&str]) -> String {
    if let Ok(value) = llm::extract_json(text) {
        if let Some(s) = keys.iter().find_map(|k| value.get(*k).and_then(|v| v.as_str())) {
            return s.trim().to_string();
        }
    }
    text.trim().to_string()
}
