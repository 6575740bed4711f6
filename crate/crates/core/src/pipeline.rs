//! File-based pipeline: generate → pair → run → analyze → metrics → report.
//!
//! Stages communicate only through files in the output directory. Every
//! JSON Lines output names its inputs' content hashes in its header, and
//! every stage writes a `manifest_<stage>.json`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adapters::{
    query_batch, CacheMode, Embedder, HttpModel, Lexicon, MockModel, ModelClient, ModelEndpoint,
    ModelResponse, PerplexityScorer, Prompt, ReplayCache, ResponseStatus, ToneClassifier,
    ToneReport,
};
use crate::analysis::{aggregate, check_pair, FdrReport, Verdict};
use crate::baseline::{generate_astraea, generate_template_baseline, AstraeaGrammar};
use crate::catalog::Catalog;
use crate::corpus::{file_hash, CaseCorpus, Corpus, Generator, Header, PairCorpus};
use crate::error::{line_of, Error, Result};
use crate::generator::{generate_genfair, GenConfig};
use crate::metrics::{self, MetricsConfig, MetricsReport};
use crate::mr::{generate_pairs, MrId};
use crate::template::TemplateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Mock,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Mock rule file; the shipped planted-bias rules when absent.
    pub rules: Option<PathBuf>,
    pub endpoint: ModelEndpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub lexicon: Option<PathBuf>,
    pub remote_url: Option<String>,
    /// Fall back to the lexicon when the remote classifier fails.
    pub fallback: bool,
    pub margin: f64,
    pub embedder_url: Option<String>,
    pub perplexity_url: Option<String>,
    pub timeout_secs: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            lexicon: None,
            remote_url: None,
            fallback: false,
            margin: 0.0,
            embedder_url: None,
            perplexity_url: None,
            timeout_secs: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub methods: Vec<Generator>,
    pub catalog: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    pub genfair: GenConfig,
    /// Case count for the template and ASTRAEA baselines.
    pub baseline_n: usize,
    /// Source cases drawn (seeded, uniformly) from each corpus for pairing;
    /// `None` pairs every case.
    pub pair_sources: Option<usize>,
    pub mrs: Vec<MrId>,
    /// Relations reported on their own but left out of aggregated FDR rows.
    pub exclude_from_totals: Vec<MrId>,
    pub model: ModelConfig,
    pub classifier: ClassifierConfig,
    pub metrics: MetricsConfig,
    /// Cases per generator scored by the metrics stage.
    pub metrics_cases: usize,
    pub parallelism: usize,
    pub cache: Option<PathBuf>,
    /// Serve responses only from the cache; never touch the network.
    pub replay: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out_dir: PathBuf::from("out"),
            methods: Generator::ALL.to_vec(),
            catalog: None,
            templates: None,
            grammar: None,
            genfair: GenConfig::default(),
            baseline_n: 7000,
            pair_sources: Some(7000),
            mrs: MrId::ALL.to_vec(),
            exclude_from_totals: Vec::new(),
            model: ModelConfig::default(),
            classifier: ClassifierConfig::default(),
            metrics: MetricsConfig::default(),
            metrics_cases: 500,
            parallelism: 4,
            cache: None,
            replay: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { path: path.to_path_buf(), line: 0, message: e.to_string() })?;
        toml::from_str(&source).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: e.span().map(|s| line_of(&source, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hash of the settings that determine outputs.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        c.cache = None;
        c.replay = false;
        c.parallelism = 0;
        hex::encode(Sha256::digest(serde_json::to_vec(&c).expect("serializes")))[..16].to_string()
    }

    pub fn catalog(&self) -> Result<Catalog> {
        self.catalog.as_ref().map_or_else(|| Ok(Catalog::builtin()), Catalog::load)
    }

    pub fn templates(&self) -> Result<TemplateSet> {
        self.templates.as_ref().map_or_else(|| Ok(TemplateSet::builtin()), TemplateSet::load)
    }

    pub fn grammar(&self) -> Result<AstraeaGrammar> {
        self.grammar.as_ref().map_or_else(|| Ok(AstraeaGrammar::builtin()), AstraeaGrammar::load)
    }

    pub fn model_client(&self) -> Result<Box<dyn ModelClient>> {
        Ok(match self.model.kind {
            ModelKind::Mock => Box::new(match &self.model.rules {
                Some(p) => MockModel::load(p)?,
                None => MockModel::builtin(),
            }),
            ModelKind::Http => Box::new(HttpModel::new(self.model.endpoint.clone())?),
        })
    }

    fn lexicon(&self) -> Result<Lexicon> {
        self.classifier.lexicon.as_ref().map_or_else(|| Ok(Lexicon::builtin()), Lexicon::load)
    }

    pub fn tone_classifier(&self) -> Result<ToneClassifier> {
        let c = &self.classifier;
        match &c.remote_url {
            Some(url) => ToneClassifier::remote(
                url.clone(),
                c.timeout_secs,
                if c.fallback { Some(self.lexicon()?) } else { None },
                c.margin,
            ),
            None => Ok(ToneClassifier::with_lexicon(self.lexicon()?, c.margin)),
        }
    }

    pub fn embedder(&self) -> Result<Embedder> {
        match &self.classifier.embedder_url {
            Some(url) => Embedder::remote(url.clone(), self.classifier.timeout_secs),
            None => Ok(Embedder::Builtin),
        }
    }

    pub fn perplexity_scorer(&self) -> Result<PerplexityScorer> {
        match &self.classifier.perplexity_url {
            Some(url) => PerplexityScorer::remote(url.clone(), self.classifier.timeout_secs),
            None => Ok(PerplexityScorer::builtin()),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

pub fn cases_file(g: Generator) -> String {
    format!("cases_{}.jsonl", g.as_str())
}

pub fn pairs_file(g: Generator) -> String {
    format!("pairs_{}.jsonl", g.as_str())
}

pub const RESPONSES_FILE: &str = "responses.jsonl";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";

/// Record of one stage: configuration, input and output hashes, warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub tool_version: String,
    pub seed: u64,
    pub config_hash: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl Manifest {
    fn new(stage: &str, cfg: &RunConfig) -> Self {
        Manifest {
            stage: stage.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    fn input(&mut self, cfg: &RunConfig, name: &str) -> Result<String> {
        let path = cfg.path(name);
        if !path.exists() {
            return Err(Error::Upstream(format!("{} (run the earlier stage first)", path.display())));
        }
        let h = file_hash(&path)?;
        self.inputs.insert(name.into(), h.clone());
        let manifest = format!("manifest_{}.json", producer(name));
        let mpath = cfg.path(&manifest);
        if !mpath.exists() {
            return Ok(format!("{name}:{h}"));
        }
        let mh = file_hash(&mpath)?;
        self.inputs.insert(manifest.clone(), mh.clone());
        Ok(format!("{name}:{h} {manifest}:{mh}"))
    }

    fn output(&mut self, cfg: &RunConfig, name: &str) -> Result<()> {
        self.outputs.insert(name.into(), file_hash(cfg.path(name))?);
        Ok(())
    }

    fn write(&self, cfg: &RunConfig) -> Result<PathBuf> {
        let path = cfg.path(&format!("manifest_{}.json", self.stage));
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

/// Stage whose manifest lists `file` as an output.
fn producer(file: &str) -> &'static str {
    match file {
        f if f.starts_with("cases_") => "generate",
        f if f.starts_with("pairs_") => "pair",
        RESPONSES_FILE => "run",
        f if f.starts_with("metrics") => "metrics",
        _ => "analyze",
    }
}

fn header(kind: &str, cfg: &RunConfig, catalog: &Catalog, inputs: Vec<String>) -> Header {
    let mut h = Header::new(kind).with_seed(cfg.seed);
    h.catalog_hash = Some(catalog.content_hash());
    h.config_hash = Some(cfg.hash());
    h.inputs = inputs;
    h
}

/// Generates the source corpus of each configured method.
pub fn cmd_generate(cfg: &RunConfig) -> Result<Manifest> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let catalog = cfg.catalog()?;
    let templates = cfg.templates()?;
    templates.check(&catalog)?;
    let mut m = Manifest::new("generate", cfg);
    for &method in &cfg.methods {
        let (mut corpus, log) = match method {
            Generator::Genfair => {
                let gc = GenConfig { seed: cfg.seed, ..cfg.genfair.clone() };
                generate_genfair(&templates, &catalog, &gc)?
            }
            Generator::Template => generate_template_baseline(&templates, &catalog, cfg.baseline_n)?,
            Generator::Astraea => generate_astraea(&cfg.grammar()?, &catalog, cfg.baseline_n, cfg.seed)?,
        };
        corpus.header = header("cases", cfg, &catalog, Vec::new());
        let name = cases_file(method);
        corpus.write(cfg.path(&name))?;
        m.output(cfg, &name)?;
        m.warnings.extend(log.warnings);
        log::info!("{method}: {} cases", corpus.len());
    }
    m.write(cfg)?;
    Ok(m)
}

/// Derives follow-up cases for every configured relation.
pub fn cmd_pair(cfg: &RunConfig) -> Result<Manifest> {
    let catalog = cfg.catalog()?;
    let mut m = Manifest::new("pair", cfg);
    for &method in &cfg.methods {
        let input = m.input(cfg, &cases_file(method))?;
        let cases = CaseCorpus::read(cfg.path(&cases_file(method)))?;
        let sources = match cfg.pair_sources {
            Some(n) => Corpus::new(
                cases.header.clone(),
                metrics::sample_cases(&cases.records, n, cfg.seed),
            ),
            None => cases,
        };
        let (mut pairs, log) = generate_pairs(&sources, &cfg.mrs, &catalog, cfg.seed)?;
        pairs.header = header("pairs", cfg, &catalog, vec![input]);
        let name = pairs_file(method);
        pairs.write(cfg.path(&name))?;
        m.output(cfg, &name)?;
        m.warnings.extend(log.warnings);
        log::info!("{method}: {} pairs", pairs.len());
    }
    m.write(cfg)?;
    Ok(m)
}

fn read_pairs(cfg: &RunConfig, m: &mut Manifest) -> Result<(Vec<PairCorpus>, Vec<String>)> {
    let mut out = Vec::new();
    let mut inputs = Vec::new();
    for &method in &cfg.methods {
        inputs.push(m.input(cfg, &pairs_file(method))?);
        out.push(PairCorpus::read(cfg.path(&pairs_file(method)))?);
    }
    Ok((out, inputs))
}

/// Every distinct case in the pair files, in first-seen order.
fn prompts_of(pairs: &[PairCorpus]) -> Vec<(String, String)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in pairs.iter().flat_map(|c| c.iter()) {
        for case in [&p.source, &p.followup] {
            if seen.insert(case.id.clone()) {
                out.push((case.id.clone(), case.text.clone()));
            }
        }
    }
    out
}

const RUN_CHUNK: usize = 1024;

/// Queries the model for every source and follow-up case. Successful
/// responses already in the responses file are kept, so an interrupted run
/// resumes where it stopped. Returns an adapter error after writing when
/// some calls failed.
pub fn cmd_run(cfg: &RunConfig) -> Result<Manifest> {
    let catalog = cfg.catalog()?;
    let mut m = Manifest::new("run", cfg);
    let (pairs, inputs) = read_pairs(cfg, &mut m)?;
    let prompts = prompts_of(&pairs);
    let path = cfg.path(RESPONSES_FILE);

    let mut done: BTreeMap<String, ModelResponse> = BTreeMap::new();
    if path.exists() {
        for r in Corpus::<ModelResponse>::read(&path)?.records {
            if r.is_ok() {
                done.insert(r.case_id.clone(), r);
            }
        }
    }
    let client = cfg.model_client()?;
    let mut cache = cfg.cache.as_ref().map(ReplayCache::open).transpose()?;
    let mode = if cfg.replay { CacheMode::ReplayOnly } else { CacheMode::Record };
    if cfg.replay && cache.is_none() {
        return Err(Error::Config {
            path: PathBuf::from("<config>"),
            line: 0,
            message: "replay requires a cache path".into(),
        });
    }
    let todo: Vec<&(String, String)> = prompts.iter().filter(|(id, _)| !done.contains_key(id)).collect();
    let hdr = header("responses", cfg, &catalog, inputs);
    // Kept records first, then each finished chunk is appended so an
    // interruption loses at most one chunk.
    Corpus::new(hdr.clone(), done.values().cloned().collect()).write(&path)?;
    let mut failed = 0;
    for chunk in todo.chunks(RUN_CHUNK) {
        let batch: Vec<Prompt> = chunk
            .iter()
            .map(|(case_id, text)| Prompt { case_id, text })
            .collect();
        let responses = query_batch(client.as_ref(), &batch, cache.as_mut(), mode, cfg.parallelism)?;
        let mut lines = String::new();
        for r in responses {
            if r.status == ResponseStatus::Failed {
                failed += 1;
            }
            lines.push_str(&serde_json::to_string(&r)?);
            lines.push('\n');
            done.insert(r.case_id.clone(), r);
        }
        let mut f = std::fs::OpenOptions::new().append(true).open(&path)?;
        std::io::Write::write_all(&mut f, lines.as_bytes())?;
    }
    Corpus::new(hdr, done.into_values().collect()).write(&path)?;
    m.output(cfg, RESPONSES_FILE)?;
    if failed > 0 {
        m.warnings.push(format!("{failed} model calls failed; rerun to retry them"));
    }
    m.write(cfg)?;
    if failed > 0 {
        return Err(Error::Adapter(format!(
            "{failed} of {} model calls failed; responses written, rerun `run` to resume",
            todo.len()
        )));
    }
    Ok(m)
}

/// Classifies responses, decides verdicts, aggregates FDR and computes the
/// metrics comparison.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Manifest> {
    let catalog = cfg.catalog()?;
    let mut m = Manifest::new("analyze", cfg);
    let (pairs, mut inputs) = read_pairs(cfg, &mut m)?;
    inputs.push(m.input(cfg, RESPONSES_FILE)?);
    let responses = Corpus::<ModelResponse>::read(cfg.path(RESPONSES_FILE))?;
    let by_id: HashMap<&str, &ModelResponse> =
        responses.iter().map(|r| (r.case_id.as_str(), r)).collect();

    let absent: Vec<String> = prompts_of(&pairs)
        .into_iter()
        .map(|(id, _)| id)
        .filter(|id| !by_id.contains_key(id.as_str()))
        .collect();
    if !absent.is_empty() {
        let shown: Vec<_> = absent.iter().take(20).cloned().collect();
        return Err(Error::Upstream(format!(
            "{} cases have no recorded response: {}{}",
            absent.len(),
            shown.join(", "),
            if absent.len() > shown.len() { ", ..." } else { "" }
        )));
    }

    let classifier = cfg.tone_classifier()?;
    let mut memo: HashMap<String, ToneReport> = HashMap::new();
    let mut report_for = |case_id: &str| -> Result<Option<ToneReport>> {
        let r = by_id[case_id];
        let Some(text) = r.text.as_ref().filter(|_| r.is_ok()) else {
            return Ok(None);
        };
        if let Some(t) = memo.get(text) {
            return Ok(Some(t.clone()));
        }
        let t = classifier.classify(text)?;
        memo.insert(text.clone(), t.clone());
        Ok(Some(t))
    };
    let mut verdicts = Vec::new();
    for p in pairs.iter().flat_map(|c| c.iter()) {
        let src = report_for(&p.source.id)?;
        let fup = report_for(&p.followup.id)?;
        verdicts.push(check_pair(p, src.as_ref(), fup.as_ref()));
    }
    let vc = Corpus::new(header("verdicts", cfg, &catalog, inputs), verdicts);
    vc.write(cfg.path(VERDICTS_FILE))?;
    m.output(cfg, VERDICTS_FILE)?;

    let report = aggregate(&vc.records, &cfg.exclude_from_totals);
    report.write(&cfg.out_dir)?;
    for f in ["fdr.csv", "fdr_by_mr.csv", "fdr_table.txt", "fdr.json"] {
        m.output(cfg, f)?;
    }
    if report.excluded_pairs > 0 {
        m.warnings.push(format!("{} pairs excluded (failed calls)", report.excluded_pairs));
    }
    if !classifier.is_builtin() {
        log::info!("tone classified remotely");
    }
    let metrics_manifest = cmd_metrics(cfg)?;
    m.outputs.extend(metrics_manifest.outputs);
    m.write(cfg)?;
    Ok(m)
}

/// Diversity and coherence of each generated corpus.
pub fn cmd_metrics(cfg: &RunConfig) -> Result<Manifest> {
    let mut m = Manifest::new("metrics", cfg);
    let embedder = cfg.embedder()?;
    let scorer = cfg.perplexity_scorer()?;
    let mc = MetricsConfig { seed: cfg.seed, ..cfg.metrics };
    let mut reports = Vec::new();
    for &method in &cfg.methods {
        m.input(cfg, &cases_file(method))?;
        let cases = CaseCorpus::read(cfg.path(&cases_file(method)))?;
        let sample = metrics::sample_cases(&cases.records, cfg.metrics_cases, cfg.seed);
        reports.push(metrics::compute(method.as_str(), &sample, &embedder, &scorer, &mc)?);
    }
    if embedder.is_builtin() || scorer.is_builtin() {
        m.warnings.push("metrics use the builtin offline embedder/scorer".into());
    }
    std::fs::write(cfg.path("metrics.csv"), metrics::to_csv(&reports)?)?;
    std::fs::write(cfg.path("metrics_table.txt"), metrics::to_table(&reports))?;
    std::fs::write(cfg.path("metrics.json"), serde_json::to_string_pretty(&reports)? + "\n")?;
    for f in ["metrics.csv", "metrics_table.txt", "metrics.json"] {
        m.output(cfg, f)?;
    }
    m.write(cfg)?;
    Ok(m)
}

/// Combines the FDR and metrics outputs into `report.md`.
pub fn cmd_report(cfg: &RunConfig) -> Result<Manifest> {
    let mut m = Manifest::new("report", cfg);
    m.input(cfg, "fdr.json")?;
    m.input(cfg, "metrics.json")?;
    let fdr: FdrReport = serde_json::from_slice(&std::fs::read(cfg.path("fdr.json"))?)?;
    let metrics: Vec<MetricsReport> =
        serde_json::from_slice(&std::fs::read(cfg.path("metrics.json"))?)?;
    let mut s = String::from("# Fairness test report\n\n");
    s += &format!("Seed {}; config {}.\n\n", cfg.seed, cfg.hash());
    s += "## Fault detection rate\n\n```\n";
    s += &fdr.to_table();
    s += "```\n\n## Per-relation FDR by generator\n\n```\n";
    s += &fdr.to_by_mr_csv()?;
    s += "```\n\n## Corpus metrics\n\n```\n";
    s += &metrics::to_table(&metrics);
    s += "```\n";
    std::fs::write(cfg.path("report.md"), s)?;
    m.output(cfg, "report.md")?;
    m.write(cfg)?;
    Ok(m)
}

/// Reads verdicts back, e.g. for re-aggregation.
pub fn read_verdicts(cfg: &RunConfig) -> Result<Vec<Verdict>> {
    Ok(Corpus::<Verdict>::read(cfg.path(VERDICTS_FILE))?.records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> RunConfig {
        RunConfig {
            out_dir: dir.to_path_buf(),
            genfair: GenConfig {
                base_cap: Some(2),
                ..Default::default()
            },
            baseline_n: 40,
            pair_sources: Some(30),
            metrics_cases: 30,
            ..Default::default()
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(c, back);
        let partial: RunConfig = toml::from_str("seed = 9\n[model]\nkind = \"mock\"\n").unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.baseline_n, 7000);
    }

    #[test]
    fn bad_config_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "seed = 1\nbaseline_n = \"many\"\n").unwrap();
        match RunConfig::load(&p).unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn stages_require_upstream() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        assert_eq!(cmd_pair(&cfg).unwrap_err().exit_code(), 3);
        assert_eq!(cmd_report(&cfg).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn end_to_end_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        cmd_generate(&cfg).unwrap();
        cmd_pair(&cfg).unwrap();
        cmd_run(&cfg).unwrap();
        let full = std::fs::read(cfg.path(RESPONSES_FILE)).unwrap();

        // Truncate to simulate an interrupted run, then resume.
        let text = String::from_utf8(full.clone()).unwrap();
        let partial: Vec<&str> = text.lines().take(10).collect();
        std::fs::write(cfg.path(RESPONSES_FILE), partial.join("\n") + "\n").unwrap();
        cmd_run(&cfg).unwrap();
        assert_eq!(std::fs::read(cfg.path(RESPONSES_FILE)).unwrap(), full);

        cmd_analyze(&cfg).unwrap();
        let fdr = std::fs::read(cfg.path("fdr.csv")).unwrap();
        for f in [VERDICTS_FILE, "fdr.csv", "fdr.json", "metrics.csv"] {
            std::fs::remove_file(cfg.path(f)).unwrap();
        }
        cmd_analyze(&cfg).unwrap();
        assert_eq!(std::fs::read(cfg.path("fdr.csv")).unwrap(), fdr);
        cmd_report(&cfg).unwrap();
        let pairs = PairCorpus::read(cfg.path(&pairs_file(Generator::Genfair))).unwrap();
        assert!(pairs.header.inputs[0].contains("manifest_generate.json:"));
        let csv = std::fs::read_to_string(cfg.path("fdr.csv")).unwrap();
        assert!(csv.starts_with("mr,generator,fault_pairs,total_pairs,fdr\n"));
        assert!(std::fs::read_to_string(cfg.path("report.md")).unwrap().contains("Fault detection"));
        let manifest: Manifest = serde_json::from_slice(
            &std::fs::read(cfg.path("manifest_analyze.json")).unwrap(),
        )
        .unwrap();
        assert!(manifest.inputs.contains_key(RESPONSES_FILE));
    }
}
