//! Sentence templates with typed attribute placeholders.
//!
//! `[CATEGORY]` is filled with a catalog value (register 0), `[CATEGORY:n]`
//! selects surface register `n`. `{subj}`, `{obj}`, `{poss}` and `{refl}`
//! are pronoun slots that agree with the sentence's gender binding.

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, PronounRole, Pronouns};
use crate::corpus::{Binding, Generator, Lineage, PronounSlot, Span, TestCase};
use crate::edit;
use crate::error::{Error, Result};
use crate::text;

const GENFAIR_15: &str = include_str!("../templates/genfair_15.jsonl");

fn slot_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"\[([A-Z][A-Z_ ]*[A-Z])(?::(\d+))?\]|\{([a-z]+)\}").expect("valid regex")
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placeholder {
    pub category: String,
    pub register: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Attribute(usize),
    Pronoun(PronounRole),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct TemplateRecord {
    id: String,
    text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    pub text: String,
    pub placeholders: Vec<Placeholder>,
    segments: Vec<Segment>,
}

impl Template {
    pub fn parse(id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        let mut segments = Vec::new();
        let mut placeholders = Vec::new();
        let mut last = 0;
        for caps in slot_regex().captures_iter(&text) {
            let m = caps.get(0).unwrap();
            if m.start() > last {
                segments.push(Segment::Literal(text[last..m.start()].to_string()));
            }
            if let Some(cat) = caps.get(1) {
                let register = caps.get(2).map_or(0, |r| r.as_str().parse().unwrap_or(0));
                segments.push(Segment::Attribute(placeholders.len()));
                placeholders.push(Placeholder {
                    category: cat.as_str().to_string(),
                    register,
                });
            } else {
                let name = &caps[3];
                let role = PronounRole::from_slot(name).ok_or_else(|| {
                    Error::validation(format!("template `{id}`"), format!("unknown slot {{{name}}}"))
                })?;
                segments.push(Segment::Pronoun(role));
            }
            last = m.end();
        }
        if last < text.len() {
            segments.push(Segment::Literal(text[last..].to_string()));
        }
        if placeholders.is_empty() {
            return Err(Error::validation(format!("template `{id}`"), "no placeholders"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = placeholders.iter().find(|p| !seen.insert(p.category.as_str())) {
            return Err(Error::validation(
                format!("template `{id}`"),
                format!("category {} used twice", dup.category),
            ));
        }
        Ok(Template {
            id,
            text,
            placeholders,
            segments,
        })
    }

    /// Fails with a validation error naming the template if a placeholder is
    /// not a catalog category.
    pub fn check(&self, catalog: &Catalog) -> Result<()> {
        for p in &self.placeholders {
            catalog.category(&p.category).map_err(|_| {
                Error::validation(
                    format!("template `{}`", self.id),
                    format!("unresolvable placeholder [{}]", p.category),
                )
            })?;
        }
        Ok(())
    }

    /// Number of distinct value assignments.
    pub fn combinations(&self, catalog: &Catalog) -> Result<usize> {
        self.placeholders.iter().try_fold(1usize, |acc, p| {
            Ok(acc * catalog.partitions_of(&p.category)?.len())
        })
    }

    /// Value-index tuple for combination `index` in lexicographic order
    /// (first placeholder most significant).
    pub fn assignment(&self, catalog: &Catalog, mut index: usize) -> Result<Vec<usize>> {
        let radices: Vec<usize> = self
            .placeholders
            .iter()
            .map(|p| catalog.partitions_of(&p.category).map(<[_]>::len))
            .collect::<Result<_>>()?;
        let mut out = vec![0; radices.len()];
        for (slot, radix) in out.iter_mut().zip(&radices).rev() {
            *slot = index % radix;
            index /= radix;
        }
        Ok(out)
    }

    /// Fills every placeholder with the given value indices.
    pub fn instantiate(
        &self,
        catalog: &Catalog,
        value_indices: &[usize],
        generator: Generator,
    ) -> Result<TestCase> {
        self.check(catalog)?;
        if value_indices.len() != self.placeholders.len() {
            return Err(Error::validation(
                format!("template `{}`", self.id),
                "assignment length mismatch",
            ));
        }
        let neutral = Pronouns::neutral();
        let mut out = String::new();
        let mut bindings = Vec::new();
        let mut pronouns = Vec::new();
        let mut base = Vec::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(s) => out.push_str(s),
                Segment::Attribute(i) => {
                    let p = &self.placeholders[*i];
                    let values = catalog.partitions_of(&p.category)?;
                    let value = values.get(value_indices[*i]).ok_or_else(|| Error::Lookup {
                        kind: "value index",
                        id: format!("{}#{}", p.category, value_indices[*i]),
                    })?;
                    let start = out.len();
                    out.push_str(value.surface(p.register));
                    bindings.push(Binding {
                        category: p.category.clone(),
                        value: value.id.clone(),
                        span: Span::new(start, out.len()),
                        register: p.register,
                        form: Default::default(),
                    });
                    base.push((p.category.clone(), value.id.clone()));
                }
                Segment::Pronoun(role) => {
                    let start = out.len();
                    out.push_str(neutral.get(*role));
                    pronouns.push(PronounSlot {
                        role: *role,
                        span: Span::new(start, out.len()),
                    });
                }
            }
        }
        let mut case = TestCase::new(
            out,
            bindings,
            pronouns,
            generator,
            Lineage {
                template_id: Some(self.id.clone()),
                base,
                steps: Vec::new(),
            },
        );
        for i in (0..case.bindings.len()).rev() {
            let start = case.bindings[i].span.start;
            edit::fix_article_before(&mut case, start);
        }
        edit::refresh_pronouns(&mut case, catalog);
        if let Some(first) = case.text.chars().next().filter(|c| c.is_lowercase()) {
            let upper: String = first.to_uppercase().collect();
            edit::splice(&mut case, 0..first.len_utf8(), &upper);
        }
        case.refresh_id();
        Ok(case)
    }

    /// Instantiates with value ids instead of indices.
    pub fn instantiate_values(
        &self,
        catalog: &Catalog,
        value_ids: &[&str],
        generator: Generator,
    ) -> Result<TestCase> {
        let indices = self
            .placeholders
            .iter()
            .zip(value_ids)
            .map(|(p, v)| catalog.category(&p.category)?.position(v))
            .collect::<Result<Vec<_>>>()?;
        self.instantiate(catalog, &indices, generator)
    }

    /// Literal text with every slot removed; the fixed frame all
    /// instantiations share.
    pub fn skeleton(&self) -> String {
        let neutral = Pronouns::neutral();
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(s) => out.push_str(s),
                Segment::Attribute(_) => {}
                Segment::Pronoun(role) => out.push_str(neutral.get(*role)),
            }
        }
        tidy(&out)
    }
}

/// Collapses whitespace and drops spaces before punctuation.
pub(crate) fn tidy(s: &str) -> String {
    let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut out = String::with_capacity(collapsed.len());
    for c in collapsed.chars() {
        if matches!(c, ',' | '.' | '?' | '!') && out.ends_with(' ') {
            out.pop();
        }
        out.push(c);
    }
    out
}

/// An ordered set of templates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateSet {
    pub templates: Vec<Template>,
}

impl TemplateSet {
    /// The 15 templates shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_jsonl(GENFAIR_15, Path::new("templates/genfair_15.jsonl"))
            .expect("shipped templates are valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path)?;
        Self::from_jsonl(&source, path)
    }

    pub fn from_jsonl(source: &str, path: &Path) -> Result<Self> {
        let mut templates = Vec::new();
        let mut ids = HashSet::new();
        for (i, line) in source.as_bytes().lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: TemplateRecord = serde_json::from_str(&line).map_err(|e| Error::Config {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            if !ids.insert(rec.id.clone()) {
                return Err(Error::Config {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("duplicate template id {}", rec.id),
                });
            }
            templates.push(Template::parse(rec.id, rec.text)?);
        }
        Ok(TemplateSet { templates })
    }

    pub fn to_jsonl(&self) -> String {
        self.templates
            .iter()
            .map(|t| {
                serde_json::to_string(&TemplateRecord {
                    id: t.id.clone(),
                    text: t.text.clone(),
                })
                .expect("template serializes")
                    + "\n"
            })
            .collect()
    }

    pub fn check(&self, catalog: &Catalog) -> Result<()> {
        self.templates.iter().try_for_each(|t| t.check(catalog))
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.id == id)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Template> {
        self.templates.iter()
    }
}

impl FromIterator<Template> for TemplateSet {
    fn from_iter<I: IntoIterator<Item = Template>>(iter: I) -> Self {
        TemplateSet {
            templates: iter.into_iter().collect(),
        }
    }
}

/// Whether two texts differ only in whitespace and case.
pub fn same_normalized(a: &str, b: &str) -> bool {
    text::normalize(a) == text::normalize(b)
}
