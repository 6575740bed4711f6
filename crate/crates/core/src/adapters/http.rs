use std::time::Duration;

use reqwest::blocking::Client;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::ModelClient;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelEndpoint {
    pub base_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Forces temperature 0 (greedy decoding).
    pub deterministic: bool,
    /// Name of the environment variable holding a bearer token.
    pub token_env: Option<String>,
    pub timeout_secs: u64,
    pub retries: u32,
}

impl Default for ModelEndpoint {
    fn default() -> Self {
        ModelEndpoint {
            base_url: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model_name: "model-under-test".into(),
            temperature: 0.0,
            max_tokens: 150,
            deterministic: true,
            token_env: None,
            timeout_secs: 60,
            retries: 2,
        }
    }
}

impl ModelEndpoint {
    pub fn effective_temperature(&self) -> f64 {
        if self.deterministic {
            0.0
        } else {
            self.temperature
        }
    }
}

/// JSON POST with bearer auth, timeout and retries.
pub(crate) struct JsonPoster {
    client: Client,
    token: Option<String>,
    retries: u32,
}

impl JsonPoster {
    pub(crate) fn new(timeout_secs: u64, token_env: Option<&str>, retries: u32) -> Result<Self> {
        let client = Client::builder()
            .timeout(Duration::from_secs(timeout_secs))
            .build()
            .map_err(|e| Error::Adapter(format!("http client: {e}")))?;
        let token = token_env.and_then(|name| std::env::var(name).ok());
        Ok(JsonPoster { client, token, retries })
    }

    pub(crate) fn post(&self, url: &str, body: &Value) -> Result<Value> {
        let mut last = String::new();
        for attempt in 0..=self.retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(200 * u64::from(attempt)));
            }
            let mut req = self.client.post(url).json(body);
            if let Some(t) = &self.token {
                req = req.bearer_auth(t);
            }
            match req.send().and_then(|r| r.error_for_status()) {
                Ok(resp) => {
                    return resp
                        .json::<Value>()
                        .map_err(|e| Error::Adapter(format!("{url}: bad JSON: {e}")))
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(Error::Adapter(format!("{url}: {last}")))
    }
}

/// Chat-completions client for the model under test.
pub struct HttpModel {
    endpoint: ModelEndpoint,
    poster: JsonPoster,
}

impl HttpModel {
    pub fn new(endpoint: ModelEndpoint) -> Result<Self> {
        let poster = JsonPoster::new(
            endpoint.timeout_secs,
            endpoint.token_env.as_deref(),
            endpoint.retries,
        )?;
        Ok(HttpModel { endpoint, poster })
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.endpoint.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.endpoint.effective_temperature(),
            "max_tokens": self.endpoint.max_tokens,
        })
    }
}

impl ModelClient for HttpModel {
    fn endpoint_id(&self) -> String {
        format!("{}#{}", self.endpoint.base_url, self.endpoint.model_name)
    }

    fn model_name(&self) -> String {
        self.endpoint.model_name.clone()
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        let v = self.poster.post(&self.endpoint.base_url, &self.request_body(prompt))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::Adapter("response has no choices[0].message.content".into()))
    }
}
