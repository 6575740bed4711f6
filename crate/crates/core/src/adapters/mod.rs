//! External-system boundaries with offline fallbacks: the model under test,
//! tone classification, sentence embeddings and perplexity.

mod cache;
mod embed;
mod http;
mod mock;
mod perplexity;
mod tone;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Record;
use crate::error::{Error, Result};

pub use cache::{CacheEntry, ReplayCache};
pub use embed::{cosine, Embedder, EMBED_DIM};
pub use http::{HttpModel, ModelEndpoint};
pub use mock::{MockModel, MockRule};
pub use perplexity::{PerplexityScorer, TrigramModel};
pub use tone::{classify_lexicon, Lexicon, Sentiment, Tone, ToneClassifier, ToneReport};

/// A model that completes prompts. Implementations must be safe to call
/// from several threads at once.
pub trait ModelClient: Send + Sync {
    /// Stable identifier used as the replay-cache key.
    fn endpoint_id(&self) -> String;
    fn model_name(&self) -> String;
    fn complete(&self, prompt: &str) -> Result<String>;
}

pub fn text_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResponse {
    pub case_id: String,
    pub text_hash: String,
    pub model_name: String,
    pub status: ResponseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock time of the call; not recorded so response files stay
    /// reproducible.
    #[serde(skip)]
    pub latency_ms: u64,
}

impl ModelResponse {
    pub fn is_ok(&self) -> bool {
        self.status == ResponseStatus::Ok
    }
}

impl Record for ModelResponse {
    fn record_id(&self) -> &str {
        &self.case_id
    }
}

/// A case to send to the model.
#[derive(Debug, Clone, Copy)]
pub struct Prompt<'a> {
    pub case_id: &'a str,
    pub text: &'a str,
}

/// How the replay cache is used for a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CacheMode {
    /// Serve hits, query misses and record them.
    #[default]
    Record,
    /// Serve hits only; a miss is an error and the network is never used.
    ReplayOnly,
}

/// Queries every prompt, at most `parallelism` at a time. Cache hits never
/// reach the client. Results come back in input order regardless of
/// completion order; failed calls become `Failed` responses.
pub fn query_batch(
    client: &dyn ModelClient,
    prompts: &[Prompt<'_>],
    cache: Option<&mut ReplayCache>,
    mode: CacheMode,
    parallelism: usize,
) -> Result<Vec<ModelResponse>> {
    let endpoint = client.endpoint_id();
    let model_name = client.model_name();
    let mut out: Vec<Option<ModelResponse>> = vec![None; prompts.len()];
    let mut misses = Vec::new();
    for (i, p) in prompts.iter().enumerate() {
        let hash = text_hash(p.text);
        match cache.as_deref().and_then(|c| c.get(&endpoint, p.case_id, &hash)) {
            Some(text) => {
                out[i] = Some(ModelResponse {
                    case_id: p.case_id.to_string(),
                    text_hash: hash,
                    model_name: model_name.clone(),
                    status: ResponseStatus::Ok,
                    text: Some(text.to_string()),
                    error: None,
                    latency_ms: 0,
                })
            }
            None if mode == CacheMode::ReplayOnly => {
                return Err(Error::CacheMiss {
                    case_id: p.case_id.to_string(),
                })
            }
            None => misses.push(i),
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Adapter(format!("thread pool: {e}")))?;
    let fresh: Vec<(usize, ModelResponse)> = pool.install(|| {
        misses
            .par_iter()
            .map(|&i| {
                let p = prompts[i];
                let started = Instant::now();
                let result = client.complete(p.text);
                let latency_ms = started.elapsed().as_millis() as u64;
                let (status, text, error) = match result {
                    Ok(t) => (ResponseStatus::Ok, Some(t), None),
                    Err(e) => {
                        log::warn!("case {}: model call failed: {e}", p.case_id);
                        (ResponseStatus::Failed, None, Some(e.to_string()))
                    }
                };
                let r = ModelResponse {
                    case_id: p.case_id.to_string(),
                    text_hash: text_hash(p.text),
                    model_name: model_name.clone(),
                    status,
                    text,
                    error,
                    latency_ms,
                };
                (i, r)
            })
            .collect()
    });
    if let Some(c) = cache {
        c.insert_all(fresh.iter().filter_map(|(_, r)| {
            r.text.as_ref().map(|text| CacheEntry {
                endpoint: endpoint.clone(),
                case_id: r.case_id.clone(),
                text_hash: r.text_hash.clone(),
                response: text.clone(),
            })
        }))?;
    }
    for (i, r) in fresh {
        out[i] = Some(r);
    }
    Ok(out.into_iter().map(|r| r.expect("every slot filled")).collect())
}
