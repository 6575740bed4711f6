use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ModelClient;
use crate::error::{line_of, Error, Result};
use crate::text;

const DEFAULT_RULES: &str = include_str!("../../rules/planted_bias.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub id: String,
    #[serde(default)]
    pub all: Vec<String>,
    #[serde(default)]
    pub none: Vec<String>,
    pub response: String,
}

impl MockRule {
    pub fn matches(&self, prompt: &str) -> bool {
        self.all.iter().all(|p| text::contains_phrase(prompt, p))
            && !self.none.iter().any(|p| text::contains_phrase(prompt, p))
    }
}

#[derive(Debug, Deserialize)]
struct RuleFile {
    rules: Vec<MockRule>,
}

/// Rule-based stand-in for a model: the first matching rule answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockModel {
    rules: Vec<MockRule>,
    hash: String,
}

impl MockModel {
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_RULES, Path::new("rules/planted_bias.toml"))
            .expect("shipped rules are valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml_str(&std::fs::read_to_string(path)?, path)
    }

    pub fn from_toml_str(source: &str, path: &Path) -> Result<Self> {
        let file: RuleFile = toml::from_str(source).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: e.span().map(|s| line_of(source, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        Self::new(file.rules)
    }

    /// The last rule must be a catch-all so every prompt gets an answer.
    pub fn new(rules: Vec<MockRule>) -> Result<Self> {
        match rules.last() {
            Some(r) if r.all.is_empty() && r.none.is_empty() => {}
            _ => return Err(Error::validation("mock rules", "last rule must be a catch-all")),
        }
        let hash = hex::encode(Sha256::digest(serde_json::to_vec(&rules)?))[..12].to_string();
        Ok(MockModel { rules, hash })
    }

    pub fn rules(&self) -> &[MockRule] {
        &self.rules
    }

    pub fn rule_for(&self, prompt: &str) -> &MockRule {
        self.rules
            .iter()
            .find(|r| r.matches(prompt))
            .expect("catch-all rule")
    }
}

impl ModelClient for MockModel {
    fn endpoint_id(&self) -> String {
        format!("mock:{}", self.hash)
    }

    fn model_name(&self) -> String {
        "mock".into()
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        Ok(self.rule_for(prompt).response.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_match_wins() {
        let m = MockModel::builtin();
        assert!(m.rules().len() >= 6);
        assert_eq!(m.rule_for("A young female engineer.").id, "female-engineer");
        assert_eq!(m.rule_for("A not female engineer.").id, "default");
        assert_eq!(m.rule_for("A male engineer.").id, "default");
        assert_eq!(m.rule_for("An elderly doctor.").id, "elderly-doctor");
    }

    #[test]
    fn catch_all_required() {
        let r = MockRule {
            id: "x".into(),
            all: vec!["a".into()],
            none: vec![],
            response: "r".into(),
        };
        assert!(MockModel::new(vec![r]).is_err());
    }
}
