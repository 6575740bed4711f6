use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::http::JsonPoster;
use crate::error::{line_of, Error, Result};
use crate::text;

const DEFAULT_LEXICON: &str = include_str!("../../lexicon/tone.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tone {
    Happy,
    Sad,
    Angry,
    Fear,
    Surprise,
    Neutral,
}

impl Tone {
    pub const ALL: [Tone; 6] = [
        Tone::Happy,
        Tone::Sad,
        Tone::Angry,
        Tone::Fear,
        Tone::Surprise,
        Tone::Neutral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tone::Happy => "happy",
            Tone::Sad => "sad",
            Tone::Angry => "angry",
            Tone::Fear => "fear",
            Tone::Surprise => "surprise",
            Tone::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Tone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneReport {
    pub tone: Tone,
    pub sentiment: Sentiment,
    pub tone_scores: BTreeMap<Tone, f64>,
    pub sentiment_scores: BTreeMap<Sentiment, f64>,
}

/// Word lists per label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub tone: BTreeMap<Tone, Vec<String>>,
    pub sentiment: BTreeMap<Sentiment, Vec<String>>,
}

impl Lexicon {
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_LEXICON, Path::new("lexicon/tone.toml"))
            .expect("shipped lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml_str(&std::fs::read_to_string(path)?, path)
    }

    pub fn from_toml_str(source: &str, path: &Path) -> Result<Self> {
        toml::from_str(source).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: e.span().map(|s| line_of(source, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    fn hits<K: Ord>(lists: &BTreeMap<K, Vec<String>>, key: &K, words: &[String]) -> usize {
        let Some(list) = lists.get(key) else { return 0 };
        let set: HashSet<String> = list.iter().map(|w| w.to_lowercase()).collect();
        words.iter().filter(|w| set.contains(*w)).count()
    }

    /// Raw per-label hit counts, in label declaration order.
    pub fn tone_hits(&self, text: &str) -> Vec<(Tone, usize)> {
        let words = text::words(text);
        Tone::ALL[..5]
            .iter()
            .map(|&t| (t, Self::hits(&self.tone, &t, &words)))
            .collect()
    }

    pub fn sentiment_hits(&self, text: &str) -> Vec<(Sentiment, usize)> {
        let words = text::words(text);
        Sentiment::ALL[..2]
            .iter()
            .map(|&s| (s, Self::hits(&self.sentiment, &s, &words)))
            .collect()
    }
}

/// Argmax with ties going to the earliest label; `neutral` when the gap to
/// the runner-up is below `margin`.
fn decide<L: Copy + Ord>(scores: &[(L, f64)], neutral: L, margin: f64) -> L {
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i].1 > scores[best].1 {
            best = i;
        }
    }
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, s)| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if margin > 0.0 && scores[best].1 - runner_up < margin {
        neutral
    } else {
        scores[best].0
    }
}

fn normalize<L: Copy>(raw: &[(L, f64)]) -> Vec<(L, f64)> {
    let total: f64 = raw.iter().map(|r| r.1).sum();
    raw.iter().map(|&(l, v)| (l, v / total)).collect()
}

#[derive(Debug)]
pub enum ToneClassifier {
    Builtin { lexicon: Lexicon, margin: f64 },
    Remote {
        url: String,
        poster: JsonPosterBox,
        fallback: Option<Lexicon>,
        margin: f64,
    },
}

/// Opaque holder so the enum stays `Debug`.
pub struct JsonPosterBox(pub(crate) JsonPoster);

impl fmt::Debug for JsonPosterBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("JsonPoster")
    }
}

impl ToneClassifier {
    pub fn builtin() -> Self {
        ToneClassifier::Builtin {
            lexicon: Lexicon::builtin(),
            margin: 0.0,
        }
    }

    pub fn with_lexicon(lexicon: Lexicon, margin: f64) -> Self {
        ToneClassifier::Builtin { lexicon, margin }
    }

    /// Remote classifier; `fallback` is used only when the call fails.
    pub fn remote(
        url: impl Into<String>,
        timeout_secs: u64,
        fallback: Option<Lexicon>,
        margin: f64,
    ) -> Result<Self> {
        Ok(ToneClassifier::Remote {
            url: url.into(),
            poster: JsonPosterBox(JsonPoster::new(timeout_secs, None, 1)?),
            fallback,
            margin,
        })
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, ToneClassifier::Builtin { .. })
    }

    pub fn classify(&self, text: &str) -> Result<ToneReport> {
        match self {
            ToneClassifier::Builtin { lexicon, margin } => Ok(classify_lexicon(lexicon, text, *margin)),
            ToneClassifier::Remote {
                url,
                poster,
                fallback,
                margin,
            } => match poster.0.post(url, &json!({ "text": text })).and_then(|v| parse_remote(&v, *margin)) {
                Ok(r) => Ok(r),
                Err(e) => match fallback {
                    Some(lex) => {
                        log::warn!("tone classifier failed ({e}); using builtin lexicon");
                        Ok(classify_lexicon(lex, text, *margin))
                    }
                    None => Err(e),
                },
            },
        }
    }
}

/// Lexicon scoring: each label scores 1 + its hit count, normalized per
/// head. Without any hit the label is neutral.
pub fn classify_lexicon(lexicon: &Lexicon, text: &str, margin: f64) -> ToneReport {
    let tone_hits = lexicon.tone_hits(text);
    let mut raw: Vec<(Tone, f64)> = tone_hits.iter().map(|&(t, n)| (t, 1.0 + n as f64)).collect();
    raw.push((Tone::Neutral, 1.0));
    let tone_scores = normalize(&raw);
    let tone = if tone_hits.iter().all(|h| h.1 == 0) {
        Tone::Neutral
    } else {
        decide(&tone_scores[..5], Tone::Neutral, margin)
    };

    let sent_hits = lexicon.sentiment_hits(text);
    let mut raw: Vec<(Sentiment, f64)> =
        sent_hits.iter().map(|&(s, n)| (s, 1.0 + n as f64)).collect();
    raw.push((Sentiment::Neutral, 1.0));
    let sentiment_scores = normalize(&raw);
    let sentiment = if sent_hits.iter().all(|h| h.1 == 0) {
        Sentiment::Neutral
    } else {
        decide(&sentiment_scores[..2], Sentiment::Neutral, margin)
    };

    ToneReport {
        tone,
        sentiment,
        tone_scores: tone_scores.into_iter().collect(),
        sentiment_scores: sentiment_scores.into_iter().collect(),
    }
}

fn parse_remote(v: &Value, margin: f64) -> Result<ToneReport> {
    fn scores<L: Copy + Ord + for<'de> Deserialize<'de>>(
        v: &Value,
        key: &str,
        labels: &[L],
    ) -> Result<Vec<(L, f64)>> {
        let map: BTreeMap<L, f64> = serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Adapter(format!("classifier `{key}`: {e}")))?;
        let raw: Vec<(L, f64)> = labels
            .iter()
            .map(|l| (*l, map.get(l).copied().unwrap_or(0.0)))
            .collect();
        let total: f64 = raw.iter().map(|r| r.1).sum();
        if total <= 0.0 || raw.iter().any(|r| r.1 < 0.0 || !r.1.is_finite()) {
            return Err(Error::Adapter(format!("classifier `{key}`: invalid scores")));
        }
        Ok(normalize(&raw))
    }
    let t = scores(v, "tone_scores", &Tone::ALL)?;
    let s = scores(v, "sentiment_scores", &Sentiment::ALL)?;
    Ok(ToneReport {
        tone: decide(&t, Tone::Neutral, margin),
        sentiment: decide(&s, Sentiment::Neutral, margin),
        tone_scores: t.into_iter().collect(),
        sentiment_scores: s.into_iter().collect(),
    })
}
