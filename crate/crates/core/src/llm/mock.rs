use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use crate::llm::{Provider, Task};
use crate::{Error, Result};

const HASH_DIM: usize = 64;
const EMBEDDINGS_FILE: &str = "embeddings.json";

/// Offline provider answering from recorded fixtures.
///
/// Completions return the fixture text for the task verbatim. Embeddings come
/// from `embeddings.json` (an object mapping text to vector) when present,
/// otherwise from a deterministic token-hash vector.
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    dir: Option<PathBuf>,
    fixtures: HashMap<Task, String>,
    embeddings: Option<BTreeMap<String, Vec<f64>>>,
}

impl MockProvider {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every known fixture present in `dir`; absent files surface as
    /// configuration errors only when the corresponding task is requested.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::Config(format!("fixture directory `{}` does not exist", dir.display())));
        }
        let mut mock = MockProvider { dir: Some(dir.to_path_buf()), ..Self::default() };
        for task in [
            Task::FeatureSelection,
            Task::Thresholds,
            Task::Explanation,
            Task::RuleDescription,
            Task::ClusterSummary,
        ] {
            let path = dir.join(task.fixture_name());
            if path.is_file() {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                mock.fixtures.insert(task, text);
            }
        }
        let path = dir.join(EMBEDDINGS_FILE);
        if path.is_file() {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let table = serde_json::from_str(&text)
                .map_err(|e| Error::format(format!("{}: {e}", path.display()), text.clone()))?;
            mock.embeddings = Some(table);
        }
        Ok(mock)
    }

    pub fn with_fixture(mut self, task: Task, text: impl Into<String>) -> Self {
        self.fixtures.insert(task, text.into());
        self
    }

    pub fn with_embeddings(mut self, table: BTreeMap<String, Vec<f64>>) -> Self {
        self.embeddings = Some(table);
        self
    }
}

impl Provider for MockProvider {
    fn complete(&self, task: Task, _prompt: &str, _temperature: f64) -> Result<String> {
        self.fixtures.get(&task).cloned().ok_or_else(|| {
            let location = match &self.dir {
                Some(dir) => dir.join(task.fixture_name()).display().to_string(),
                None => task.fixture_name().to_string(),
            };
            Error::Config(format!("missing fixture `{location}`"))
        })
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        match &self.embeddings {
            Some(table) => texts
                .iter()
                .map(|t| {
                    table
                        .get(t)
                        .cloned()
                        .ok_or_else(|| Error::Config(format!("no recorded embedding for `{t}`")))
                })
                .collect(),
            None => Ok(texts.iter().map(|t| hash_embedding(t)).collect()),
        }
    }

    fn supports(&self, task: Task) -> bool {
        self.fixtures.contains_key(&task)
    }
}

/// Signed feature hashing of lowercase alphanumeric tokens (FNV-1a).
fn hash_embedding(text: &str) -> Vec<f64> {
    let mut v = vec![0.0; HASH_DIM];
    for token in text.split(|c: char| !c.is_alphanumeric() && c != '.' && c != '_').filter(|t| !t.is_empty()) {
        let h = token
            .to_lowercase()
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        v[(h % HASH_DIM as u64) as usize] += sign;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::embed;

    #[test]
    fn fixture_text_is_returned_verbatim() {
        let mock = MockProvider::new().with_fixture(Task::Thresholds, "{\"x\": 1}");
        assert_eq!(mock.complete(Task::Thresholds, "ignored", 0.0).unwrap(), "{\"x\": 1}");
        assert!(mock.supports(Task::Thresholds));
        assert!(!mock.supports(Task::Explanation));
    }

    #[test]
    fn missing_fixture_names_file() {
        let err = MockProvider::new().complete(Task::Explanation, "", 0.0).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("explanation.json")));
    }

    #[test]
    fn loads_directory() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("feature_selection.json"), "{}").unwrap();
        std::fs::write(dir.path().join("embeddings.json"), r#"{"a": [1, 0], "b": [0, 2]}"#).unwrap();
        let mock = MockProvider::from_dir(dir.path()).unwrap();
        assert_eq!(mock.complete(Task::FeatureSelection, "", 0.0).unwrap(), "{}");
        assert_eq!(embed(&mock, &["b".into()]).unwrap(), vec![vec![0.0, 1.0]]);
        assert!(mock.embed(&["c".into()]).is_err());
        assert!(MockProvider::from_dir(dir.path().join("nope")).is_err());
    }

    #[test]
    fn hash_embeddings_are_deterministic_unit_vectors() {
        let mock = MockProvider::new();
        let texts: Vec<String> = vec!["duration greater than 550".into(), "duration greater than 550".into(), "month equals mar".into()];
        let v = embed(&mock, &texts).unwrap();
        assert_eq!(v[0], v[1]);
        assert_ne!(v[0], v[2]);
        for x in &v {
            assert_eq!(x.len(), HASH_DIM);
            assert!((x.iter().map(|a| a * a).sum::<f64>().sqrt() - 1.0).abs() < 1e-6);
        }
    }
}
