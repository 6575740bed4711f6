use std::collections::{HashMap, HashSet};

use serde_json::{json, Value};

use super::http::JsonPoster;
use super::tone::JsonPosterBox;
use crate::catalog::Catalog;
use crate::corpus::Generator;
use crate::error::{Error, Result};
use crate::template::TemplateSet;

const BOS: char = '\u{2}';
const EOS: char = '\u{3}';
const UNK: char = '\u{0}';

/// Character trigram language model with add-one smoothing.
#[derive(Debug, Clone)]
pub struct TrigramModel {
    trigrams: HashMap<[char; 3], u32>,
    contexts: HashMap<[char; 2], u32>,
    vocab: HashSet<char>,
}

impl TrigramModel {
    pub fn train<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut m = TrigramModel {
            trigrams: HashMap::new(),
            contexts: HashMap::new(),
            vocab: [UNK, EOS].into_iter().collect(),
        };
        for t in texts {
            let chars = Self::symbols(t, None);
            m.vocab.extend(chars.iter().copied());
            for w in chars.windows(3) {
                *m.trigrams.entry([w[0], w[1], w[2]]).or_default() += 1;
                *m.contexts.entry([w[0], w[1]]).or_default() += 1;
            }
        }
        m
    }

    /// Trained on every shipped template filled with each category's first
    /// value, plus every catalog surface form.
    pub fn builtin() -> Self {
        let catalog = Catalog::builtin();
        let mut texts: Vec<String> = TemplateSet::builtin()
            .iter()
            .filter_map(|t| {
                t.instantiate(&catalog, &vec![0; t.placeholders.len()], Generator::Template)
                    .ok()
                    .map(|c| c.text)
            })
            .collect();
        for c in catalog.categories() {
            for v in &c.values {
                texts.extend(v.surface_forms.iter().cloned());
            }
        }
        Self::train(texts.iter().map(String::as_str))
    }

    fn symbols(text: &str, vocab: Option<&HashSet<char>>) -> Vec<char> {
        let mut out = vec![BOS, BOS];
        out.extend(text.to_lowercase().chars().map(|c| match vocab {
            Some(v) if !v.contains(&c) => UNK,
            _ => c,
        }));
        out.push(EOS);
        out
    }

    /// exp of the mean negative log-probability per predicted character.
    pub fn perplexity(&self, text: &str) -> Result<f64> {
        if text.is_empty() {
            return Err(Error::validation("perplexity input", "empty text"));
        }
        let chars = Self::symbols(text, Some(&self.vocab));
        let v = self.vocab.len() as f64;
        let mut nll = 0.0;
        let mut n = 0usize;
        for w in chars.windows(3) {
            let tri = f64::from(self.trigrams.get(&[w[0], w[1], w[2]]).copied().unwrap_or(0));
            let ctx = f64::from(self.contexts.get(&[w[0], w[1]]).copied().unwrap_or(0));
            nll -= ((tri + 1.0) / (ctx + v)).ln();
            n += 1;
        }
        Ok((nll / n as f64).exp())
    }
}

#[derive(Debug)]
pub enum PerplexityScorer {
    Builtin(TrigramModel),
    Remote { url: String, poster: JsonPosterBox },
}

impl PerplexityScorer {
    pub fn builtin() -> Self {
        PerplexityScorer::Builtin(TrigramModel::builtin())
    }

    pub fn remote(url: impl Into<String>, timeout_secs: u64) -> Result<Self> {
        Ok(PerplexityScorer::Remote {
            url: url.into(),
            poster: JsonPosterBox(JsonPoster::new(timeout_secs, None, 1)?),
        })
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, PerplexityScorer::Builtin(_))
    }

    pub fn score(&self, text: &str) -> Result<f64> {
        match self {
            PerplexityScorer::Builtin(m) => m.perplexity(text),
            PerplexityScorer::Remote { url, poster } => {
                if text.is_empty() {
                    return Err(Error::validation("perplexity input", "empty text"));
                }
                let v = poster.0.post(url, &json!({ "text": text }))?;
                v.get("perplexity")
                    .and_then(Value::as_f64)
                    .filter(|p| p.is_finite() && *p > 0.0)
                    .ok_or_else(|| Error::Adapter("perplexity response invalid".into()))
            }
        }
    }
}
