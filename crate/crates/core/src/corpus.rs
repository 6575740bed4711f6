//! Test cases, pairs, lineage, and the JSON Lines corpus format.
//!
//! Every corpus file starts with a [`Header`] line followed by one record per
//! line. Records are serialized with fixed field order so identical corpora
//! are byte-identical on disk.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::{Catalog, PronounRole, SurfaceForm};
use crate::error::{Error, Result};
use crate::mr::{MrId, RelationSpec};
use crate::text;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Byte range into a case's text. Offsets always fall on char boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn range(self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(self) -> bool {
        self.start == self.end
    }
}

impl From<[usize; 2]> for Span {
    fn from([start, end]: [usize; 2]) -> Self {
        Span { start, end }
    }
}

impl From<Span> for [usize; 2] {
    fn from(s: Span) -> Self {
        [s.start, s.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binding {
    pub category: String,
    pub value: String,
    pub span: Span,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub register: usize,
    #[serde(default, skip_serializing_if = "is_plain")]
    pub form: SurfaceForm,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

fn is_plain(f: &SurfaceForm) -> bool {
    *f == SurfaceForm::Plain
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PronounSlot {
    pub role: PronounRole,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Genfair,
    Template,
    Astraea,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Genfair, Generator::Template, Generator::Astraea];

    pub fn as_str(self) -> &'static str {
        match self {
            Generator::Genfair => "genfair",
            Generator::Template => "template",
            Generator::Astraea => "astraea",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genfair" => Ok(Generator::Genfair),
            "template" => Ok(Generator::Template),
            "astraea" => Ok(Generator::Astraea),
            _ => Err(Error::Lookup {
                kind: "generator",
                id: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Ep,
    MutateIntensify,
    MutateReduce,
    MutateNegate,
    MutateSubstitute,
    Bva,
}

impl StepKind {
    /// Pipeline stage: EP, then mutation, then boundary analysis.
    pub fn stage(self) -> u8 {
        match self {
            StepKind::Ep => 0,
            StepKind::Bva => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivationStep {
    pub kind: StepKind,
    pub category: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Lineage {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<String>,
    /// Value assignment the template was first instantiated with, as
    /// `(category, value)` pairs in placeholder order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub base: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<DerivationStep>,
}

impl Lineage {
    /// Steps are in stage order (EP before mutation before BVA).
    pub fn is_stage_ordered(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[0].kind.stage() <= w[1].kind.stage())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub text: String,
    pub bindings: Vec<Binding>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pronouns: Vec<PronounSlot>,
    pub generator: Generator,
    pub lineage: Lineage,
}

pub fn case_id(text: &str, generator: Generator) -> String {
    let mut h = Sha256::new();
    h.update(generator.as_str().as_bytes());
    h.update([0u8]);
    h.update(text.as_bytes());
    hex::encode(h.finalize())[..16].to_string()
}

impl TestCase {
    pub fn new(
        text: String,
        bindings: Vec<Binding>,
        pronouns: Vec<PronounSlot>,
        generator: Generator,
        lineage: Lineage,
    ) -> Self {
        let mut case = TestCase {
            id: String::new(),
            text,
            bindings,
            pronouns,
            generator,
            lineage,
        };
        case.refresh_id();
        case
    }

    pub(crate) fn refresh_id(&mut self) {
        self.id = case_id(&self.text, self.generator);
    }

    pub fn binding(&self, category: &str) -> Option<&Binding> {
        self.bindings.iter().find(|b| b.category == category)
    }

    pub(crate) fn binding_index(&self, category: &str) -> Option<usize> {
        self.bindings.iter().position(|b| b.category == category)
    }

    /// The text with every attribute removed; the frame shared by all cases
    /// of the same shape.
    pub fn skeleton(&self) -> String {
        let mut out = String::with_capacity(self.text.len());
        let mut at = 0;
        for b in &self.bindings {
            out.push_str(&self.text[at..b.span.start]);
            at = b.span.end;
        }
        out.push_str(&self.text[at..]);
        crate::template::tidy(&out)
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[span.range()]
    }

    /// Checks that spans are in bounds, disjoint, and that each binding span
    /// renders its bound value.
    pub fn check_spans(&self, catalog: &Catalog) -> Result<()> {
        let err = |m: String| Error::validation(format!("case {}", self.id), m);
        if self.text.trim().is_empty() {
            return Err(err("empty text".into()));
        }
        let mut spans: Vec<Span> = self
            .bindings
            .iter()
            .map(|b| b.span)
            .chain(self.pronouns.iter().map(|p| p.span))
            .collect();
        for s in &spans {
            if s.start > s.end
                || s.end > self.text.len()
                || !self.text.is_char_boundary(s.start)
                || !self.text.is_char_boundary(s.end)
            {
                return Err(err(format!("span {s:?} out of bounds")));
            }
        }
        spans.sort();
        if spans.windows(2).any(|w| w[0].end > w[1].start) {
            return Err(err("overlapping spans".into()));
        }
        for b in &self.bindings {
            let value = catalog.value(&b.category, &b.value)?;
            let got = self.slice(b.span);
            if !value.renders_as(got) {
                return Err(err(format!(
                    "span `{got}` does not render {}/{}",
                    b.category, b.value
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestPair {
    pub pair_id: String,
    pub mr: MrId,
    pub relation: RelationSpec,
    pub source: TestCase,
    pub followup: TestCase,
}

impl TestPair {
    pub fn new(source: TestCase, followup: TestCase, mr: MrId) -> Self {
        TestPair {
            pair_id: format!("{}-{}", source.id, mr.as_str()),
            mr,
            relation: mr.expected_relation(),
            source,
            followup,
        }
    }
}

/// Records stored in a corpus file carry a unique id.
pub trait Record: Serialize + DeserializeOwned {
    fn record_id(&self) -> &str;
}

impl Record for TestCase {
    fn record_id(&self) -> &str {
        &self.id
    }
}

impl Record for TestPair {
    fn record_id(&self) -> &str {
        &self.pair_id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema_version: u32,
    pub kind: String,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    /// Content hashes of the files this one was derived from.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
}

impl Header {
    pub fn new(kind: impl Into<String>) -> Self {
        Header {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            tool_version: TOOL_VERSION.to_string(),
            seed: None,
            catalog_hash: None,
            config_hash: None,
            inputs: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// A header plus an ordered list of records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus<T> {
    pub header: Header,
    pub records: Vec<T>,
}

pub type CaseCorpus = Corpus<TestCase>;
pub type PairCorpus = Corpus<TestPair>;

impl<T> Corpus<T> {
    pub fn new(header: Header, records: Vec<T>) -> Self {
        Corpus { header, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.records.iter()
    }
}

impl<T: Clone> Corpus<T> {
    /// The first `n` records in generation order.
    pub fn take_first(&self, n: usize) -> Self {
        Corpus {
            header: self.header.clone(),
            records: self.records.iter().take(n).cloned().collect(),
        }
    }
}

impl<T: Record> Corpus<T> {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = serde_json::to_string(&self.header)?;
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "{}", serde_json::to_string(&self.header)?)?;
        for r in &self.records {
            writeln!(w, "{}", serde_json::to_string(r)?)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Upstream(format!("{}: {e}", path.display())))?;
        let corpus_err = |line: usize, message: String| Error::Corpus {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| corpus_err(1, "missing header".into()))??;
        let header: Header =
            serde_json::from_str(&header_line).map_err(|e| corpus_err(1, e.to_string()))?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(corpus_err(
                1,
                format!("unsupported schema_version {}", header.schema_version),
            ));
        }
        if header.tool_version != TOOL_VERSION {
            log::warn!(
                "{} was written by version {}, reading with {}",
                path.display(),
                header.tool_version,
                TOOL_VERSION
            );
        }
        let mut records = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let rec: T =
                serde_json::from_str(&line).map_err(|e| corpus_err(lineno, e.to_string()))?;
            if !seen.insert(rec.record_id().to_string()) {
                return Err(corpus_err(
                    lineno,
                    format!("duplicate id {}", rec.record_id()),
                ));
            }
            records.push(rec);
        }
        Ok(Corpus { header, records })
    }
}

/// Stable first-occurrence deduplication by normalized text.
pub fn dedup(corpus: &CaseCorpus) -> CaseCorpus {
    let mut seen = HashSet::new();
    let records = corpus
        .records
        .iter()
        .filter(|c| seen.insert(text::normalize(&c.text)))
        .cloned()
        .collect();
    Corpus {
        header: corpus.header.clone(),
        records,
    }
}

/// Short content hash of a file's bytes, used to link outputs to inputs.
pub fn file_hash(path: impl AsRef<Path>) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes))[..16].to_string())
}
