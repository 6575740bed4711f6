use serde_json::{json, Value};

use super::http::JsonPoster;
use super::tone::JsonPosterBox;
use crate::error::{Error, Result};

pub const EMBED_DIM: usize = 512;

#[derive(Debug)]
pub enum Embedder {
    /// Hashed character-trigram counts.
    Builtin,
    Remote { url: String, poster: JsonPosterBox },
}

impl Embedder {
    pub fn remote(url: impl Into<String>, timeout_secs: u64) -> Result<Self> {
        Ok(Embedder::Remote {
            url: url.into(),
            poster: JsonPosterBox(JsonPoster::new(timeout_secs, None, 1)?),
        })
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, Embedder::Builtin)
    }

    /// Unit-norm embedding.
    pub fn embed(&self, text: &str) -> Result<Vec<f64>> {
        let v = match self {
            Embedder::Builtin => trigram_vector(text),
            Embedder::Remote { url, poster } => {
                let resp = poster.0.post(url, &json!({ "text": text }))?;
                resp.get("vector")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Adapter("embedding response has no `vector`".into()))?
                    .iter()
                    .map(|x| {
                        x.as_f64()
                            .ok_or_else(|| Error::Adapter("non-numeric embedding".into()))
                    })
                    .collect::<Result<Vec<f64>>>()?
            }
        };
        Ok(l2_normalize(v))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn trigram_vector(text: &str) -> Vec<f64> {
    let padded: Vec<char> = format!("\u{2}\u{2}{}\u{3}\u{3}", text.to_lowercase())
        .chars()
        .collect();
    let mut v = vec![0.0; EMBED_DIM];
    let mut buf = String::new();
    for w in padded.windows(3) {
        buf.clear();
        buf.extend(w);
        v[(fnv1a(buf.as_bytes()) % EMBED_DIM as u64) as usize] += 1.0;
    }
    v
}

fn l2_normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Cosine similarity of two unit vectors.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Adapter(format!(
            "embedding dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0))
}
