//! Corpus diversity and coherence scores.
//!
//! Pairwise scores sample unordered pairs after sorting cases by id, so the
//! result does not depend on corpus order.

use std::fmt::Write as _;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::adapters::{cosine, Embedder, PerplexityScorer};
use crate::corpus::TestCase;
use crate::error::{Error, Result};
use crate::seed;
use crate::text;

pub const METRIC_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    /// Maximum number of case pairs for the diversity scores.
    pub sample_n: usize,
    /// Maximum number of cases scored for perplexity.
    pub coherence_n: usize,
    pub seed: u64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            sample_n: 50_000,
            coherence_n: 2_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub generator: String,
    pub syntactic_diversity: f64,
    pub semantic_diversity: f64,
    pub syntactic_coherence: f64,
    pub semantic_coherence: f64,
    pub sample_size: usize,
    pub pairs_sampled: usize,
    pub coherence_skipped: usize,
    pub seed: u64,
    pub metric_version: u32,
    pub embedder: String,
    pub perplexity_scorer: String,
}

fn sorted(cases: &[TestCase]) -> Vec<&TestCase> {
    let mut v: Vec<&TestCase> = cases.iter().collect();
    v.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.text.cmp(&b.text)));
    v
}

/// A seeded subset of `n` cases, independent of input order.
pub fn sample_cases(cases: &[TestCase], n: usize, seed: u64) -> Vec<TestCase> {
    let s = sorted(cases);
    if s.len() <= n {
        return s.into_iter().cloned().collect();
    }
    let mut rng = seed::rng_for(seed, "sample-cases");
    let mut picks = index::sample(&mut rng, s.len(), n).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| s[i].clone()).collect()
}

/// `min(sample_n, C(n,2))` distinct unordered index pairs, seeded.
pub fn sample_pairs(n: usize, sample_n: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = n * n.saturating_sub(1) / 2;
    let mut ks: Vec<usize> = if total <= sample_n {
        (0..total).collect()
    } else {
        let mut rng = seed::rng_for(seed, "sample-pairs");
        let mut v = index::sample(&mut rng, total, sample_n).into_vec();
        v.sort_unstable();
        v
    };
    // Pair k enumerates (0,1), (0,2), ..., (0,n-1), (1,2), ...
    let mut out = Vec::with_capacity(ks.len());
    let (mut i, mut row_start) = (0usize, 0usize);
    for k in ks.drain(..) {
        while k >= row_start + (n - 1 - i) {
            row_start += n - 1 - i;
            i += 1;
        }
        out.push((i, i + 1 + (k - row_start)));
    }
    out
}

fn need_two(cases: &[TestCase]) -> Result<()> {
    if cases.len() < 2 {
        return Err(Error::validation("corpus", "diversity needs at least two cases"));
    }
    Ok(())
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Token-level edit distance over the longer token count.
pub fn token_distance(a: &str, b: &str) -> f64 {
    let (ta, tb) = (text::tokens(a), text::tokens(b));
    let longest = ta.len().max(tb.len());
    if longest == 0 {
        return 0.0;
    }
    strsim::generic_levenshtein(&ta, &tb) as f64 / longest as f64
}

/// 100 × mean normalized token edit distance over sampled pairs.
pub fn syntactic_diversity(cases: &[TestCase], sample_n: usize, seed: u64) -> Result<f64> {
    need_two(cases)?;
    let s = sorted(cases);
    let pairs = sample_pairs(s.len(), sample_n, seed);
    Ok(100.0 * mean(pairs.iter().map(|&(i, j)| token_distance(&s[i].text, &s[j].text))))
}

fn embed_all(cases: &[&TestCase], embedder: &Embedder) -> Result<Vec<Vec<f64>>> {
    cases.iter().map(|c| embedder.embed(&c.text)).collect()
}

/// 100 × mean (1 − cosine) over sampled pairs.
pub fn semantic_diversity(
    cases: &[TestCase],
    embedder: &Embedder,
    sample_n: usize,
    seed: u64,
) -> Result<f64> {
    need_two(cases)?;
    let s = sorted(cases);
    let pairs = sample_pairs(s.len(), sample_n, seed);
    let mut needed = vec![false; s.len()];
    for &(i, j) in &pairs {
        needed[i] = true;
        needed[j] = true;
    }
    let vectors: Vec<Option<Vec<f64>>> = s
        .iter()
        .zip(&needed)
        .map(|(c, &n)| n.then(|| embedder.embed(&c.text)).transpose())
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for &(i, j) in &pairs {
        let (a, b) = (vectors[i].as_ref().unwrap(), vectors[j].as_ref().unwrap());
        total += 1.0 - cosine(a, b)?;
    }
    Ok(100.0 * total / pairs.len() as f64)
}

/// Mean perplexity over up to `sample_n` seeded cases.
pub fn syntactic_coherence(
    cases: &[TestCase],
    scorer: &PerplexityScorer,
    sample_n: usize,
    seed: u64,
) -> Result<f64> {
    if cases.is_empty() {
        return Err(Error::validation("corpus", "coherence needs at least one case"));
    }
    let picked = sample_cases(cases, sample_n, seed);
    let scores = picked
        .iter()
        .map(|c| scorer.score(&c.text))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(scores))
}

/// Mean cosine between each case and its attribute-free skeleton. Cases
/// without lineage are skipped and counted.
pub fn semantic_coherence(cases: &[TestCase], embedder: &Embedder) -> Result<(f64, usize)> {
    let s = sorted(cases);
    let mut skipped = 0;
    let mut sims = Vec::new();
    let texts = embed_all(&s, embedder)?;
    for (c, v) in s.iter().zip(&texts) {
        if c.lineage.template_id.is_none() {
            skipped += 1;
            continue;
        }
        sims.push(cosine(v, &embedder.embed(&c.skeleton())?)?);
    }
    Ok((mean(sims), skipped))
}

pub fn compute(
    generator: &str,
    cases: &[TestCase],
    embedder: &Embedder,
    scorer: &PerplexityScorer,
    config: &MetricsConfig,
) -> Result<MetricsReport> {
    need_two(cases)?;
    let pairs = sample_pairs(cases.len(), config.sample_n, config.seed).len();
    let (semantic_coherence, coherence_skipped) = semantic_coherence(cases, embedder)?;
    Ok(MetricsReport {
        generator: generator.to_string(),
        syntactic_diversity: syntactic_diversity(cases, config.sample_n, config.seed)?,
        semantic_diversity: semantic_diversity(cases, embedder, config.sample_n, config.seed)?,
        syntactic_coherence: syntactic_coherence(cases, scorer, config.coherence_n, config.seed)?,
        semantic_coherence,
        sample_size: cases.len(),
        pairs_sampled: pairs,
        coherence_skipped,
        seed: config.seed,
        metric_version: METRIC_VERSION,
        embedder: if embedder.is_builtin() { "builtin-trigram" } else { "remote" }.into(),
        perplexity_scorer: if scorer.is_builtin() { "builtin-trigram" } else { "remote" }.into(),
    })
}

pub fn to_csv(reports: &[MetricsReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

/// Side-by-side comparison: one column per generator.
pub fn to_table(reports: &[MetricsReport]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<24}", "metric");
    for r in reports {
        let _ = write!(s, " {:>12}", r.generator);
    }
    s.push('\n');
    type Getter = fn(&MetricsReport) -> f64;
    let rows: [(&str, Getter); 4] = [
        ("syntactic diversity", |r| r.syntactic_diversity),
        ("semantic diversity", |r| r.semantic_diversity),
        ("syntactic coherence", |r| r.syntactic_coherence),
        ("semantic coherence", |r| r.semantic_coherence),
    ];
    for (name, get) in rows {
        let _ = write!(s, "{name:<24}");
        for r in reports {
            let _ = write!(s, " {:>12.4}", get(r));
        }
        s.push('\n');
    }
    if let Some(r) = reports.first() {
        let _ = writeln!(
            s,
            "metric_version {}; seed {}; embedder {}; perplexity {}",
            r.metric_version, r.seed, r.embedder, r.perplexity_scorer
        );
    }
    s
}
