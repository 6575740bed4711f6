//! Baseline generators: plain template enumeration and an ASTRAEA-style
//! probabilistic grammar.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::corpus::{Binding, CaseCorpus, Corpus, Generator, Header, Lineage, Span, TestCase};
use crate::error::{line_of, Error, Result};
use crate::generator::RunLog;
use crate::seed;
use crate::template::TemplateSet;

/// The first `n` instantiations in lexicographic order over
/// (template order, value indices).
pub fn generate_template_baseline(
    templates: &TemplateSet,
    catalog: &Catalog,
    n: usize,
) -> Result<(CaseCorpus, RunLog)> {
    let mut log = RunLog::default();
    let mut records = Vec::with_capacity(n);
    'outer: for t in templates.iter() {
        for i in 0..t.combinations(catalog)? {
            if records.len() == n {
                break 'outer;
            }
            let assignment = t.assignment(catalog, i)?;
            records.push(t.instantiate(catalog, &assignment, Generator::Template)?);
        }
    }
    if records.len() < n {
        log.warn(format!(
            "template baseline: requested {n} cases, only {} available",
            records.len()
        ));
    }
    Ok((Corpus::new(Header::new("cases"), records), log))
}

pub const ASTRAEA_TEMPLATE_ID: &str = "astraea";
const DEFAULT_GRAMMAR: &str = include_str!("../grammars/astraea_default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AstraeaGrammar {
    pub sentence_template: String,
    pub person_categories: Vec<String>,
    pub occupation_rule: Vec<String>,
    pub economic_rule: Vec<String>,
    pub verb_rule: Vec<String>,
    pub object_rule: Vec<String>,
    #[serde(default)]
    pub probabilities: BTreeMap<String, BTreeMap<String, f64>>,
}

const PERSON: &str = "PERSON";
const OCCUPATION: &str = "OCCUPATION";
const ECONOMIC: &str = "ECONOMIC CONDITIONS";
const VERB: &str = "VERB";
const OBJECT: &str = "OBJECT";
const PERSON_SIZE: usize = 3;

impl AstraeaGrammar {
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_GRAMMAR, Path::new("grammars/astraea_default.toml"))
            .expect("shipped grammar is valid")
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

    /// Checks the frame, rule values and probability tables against the
    /// catalog. Every table must cover known values, sum to 1 and leave at
    /// least one value with positive weight.
    pub fn check(&self, catalog: &Catalog) -> Result<()> {
        let bad = |m: String| Error::validation("ASTRAEA grammar", m);
        for token in [PERSON, OCCUPATION, ECONOMIC, VERB, OBJECT] {
            if self.sentence_template.matches(token).count() != 1 {
                return Err(bad(format!("frame must contain {token} exactly once")));
            }
        }
        if self.person_categories.len() < PERSON_SIZE {
            return Err(bad(format!("need at least {PERSON_SIZE} person categories")));
        }
        let unique: HashSet<_> = self.person_categories.iter().collect();
        if unique.len() != self.person_categories.len() {
            return Err(bad("person categories repeat".into()));
        }
        for c in &self.person_categories {
            catalog.category(c)?;
        }
        for (category, rule) in [(OCCUPATION, &self.occupation_rule), (ECONOMIC, &self.economic_rule)] {
            if rule.is_empty() {
                return Err(bad(format!("{category} rule is empty")));
            }
            for v in rule {
                catalog.value(category, v)?;
            }
        }
        if self.verb_rule.is_empty() || self.object_rule.is_empty() {
            return Err(bad("verb and object rules must be non-empty".into()));
        }
        for (category, table) in &self.probabilities {
            let cat = catalog.category(category)?;
            let mut total = 0.0;
            for (value, w) in table {
                cat.value(value)?;
                if !w.is_finite() || *w < 0.0 {
                    return Err(bad(format!("{category}/{value}: weight {w} is not a probability")));
                }
                total += w;
            }
            if total == 0.0 {
                return Err(bad(format!("{category}: every weight is zero")));
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(bad(format!("{category}: weights sum to {total}, not 1")));
            }
        }
        Ok(())
    }

    fn weights(&self, category: &str, values: &[String]) -> Result<WeightedIndex<f64>> {
        let w: Vec<f64> = match self.probabilities.get(category) {
            Some(table) => values.iter().map(|v| table.get(v).copied().unwrap_or(0.0)).collect(),
            None => vec![1.0; values.len()],
        };
        WeightedIndex::new(w).map_err(|e| {
            Error::validation("ASTRAEA grammar", format!("{category}: {e}"))
        })
    }
}

/// A case passes when it binds at least three distinct categories and
/// every binding renders its catalog value.
pub fn astraea_validate(case: &TestCase, catalog: &Catalog) -> bool {
    let categories: HashSet<_> = case.bindings.iter().map(|b| &b.category).collect();
    categories.len() >= PERSON_SIZE
        && categories.len() == case.bindings.len()
        && case.check_spans(catalog).is_ok()
}

fn sample_case(grammar: &AstraeaGrammar, catalog: &Catalog, rng: &mut impl Rng) -> Result<TestCase> {
    let mut person_cats = grammar.person_categories.clone();
    person_cats.shuffle(rng);
    person_cats.truncate(PERSON_SIZE);

    let mut picks: Vec<(String, String)> = Vec::new();
    for c in &person_cats {
        let ids: Vec<String> = catalog.partitions_of(c)?.iter().map(|v| v.id.clone()).collect();
        let i = grammar.weights(c, &ids)?.sample(rng);
        picks.push((c.clone(), ids[i].clone()));
    }
    let occ = &grammar.occupation_rule;
    let occ = occ[grammar.weights(OCCUPATION, occ)?.sample(rng)].clone();
    let econ = &grammar.economic_rule;
    let econ = econ[grammar.weights(ECONOMIC, econ)?.sample(rng)].clone();
    let verb = grammar.verb_rule.choose(rng).expect("checked non-empty");
    let object = grammar.object_rule.choose(rng).expect("checked non-empty");

    // Fill slots left to right so byte offsets are known as text is built.
    let frame = &grammar.sentence_template;
    let mut slots: Vec<(usize, &str)> = [PERSON, OCCUPATION, ECONOMIC, VERB, OBJECT]
        .iter()
        .map(|t| (frame.find(t).expect("checked"), *t))
        .collect();
    slots.sort();
    let mut text = String::new();
    let mut bindings = Vec::new();
    let mut at = 0;
    let mut bind = |text: &mut String, category: &str, value: &str| -> Result<()> {
        let start = text.len();
        text.push_str(catalog.value(category, value)?.surface(0));
        bindings.push(Binding {
            category: category.to_string(),
            value: value.to_string(),
            span: Span::new(start, text.len()),
            register: 0,
            form: Default::default(),
        });
        Ok(())
    };
    for (pos, token) in slots {
        text.push_str(&frame[at..pos]);
        at = pos + token.len();
        match token {
            PERSON => {
                for (k, (c, v)) in picks.iter().enumerate() {
                    if k > 0 {
                        text.push(' ');
                    }
                    bind(&mut text, c, v)?;
                }
            }
            OCCUPATION => bind(&mut text, OCCUPATION, &occ)?,
            ECONOMIC => bind(&mut text, ECONOMIC, &econ)?,
            VERB => text.push_str(verb),
            _ => text.push_str(object),
        }
    }
    text.push_str(&frame[at..]);
    let base = bindings.iter().map(|b| (b.category.clone(), b.value.clone())).collect();
    Ok(TestCase::new(
        text,
        bindings,
        Vec::new(),
        Generator::Astraea,
        Lineage {
            template_id: Some(ASTRAEA_TEMPLATE_ID.into()),
            base,
            steps: Vec::new(),
        },
    ))
}

/// Samples `n` distinct valid sentences from the grammar. Invalid or
/// duplicate draws are regenerated up to a bounded number of attempts.
pub fn generate_astraea(
    grammar: &AstraeaGrammar,
    catalog: &Catalog,
    n: usize,
    seed: u64,
) -> Result<(CaseCorpus, RunLog)> {
    grammar.check(catalog)?;
    let mut log = RunLog::default();
    let mut rng = seed::rng_for(seed, "astraea");
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(n);
    let max_attempts = n.saturating_mul(50).max(1000);
    let mut rejected = 0usize;
    for _ in 0..max_attempts {
        if records.len() == n {
            break;
        }
        let case = sample_case(grammar, catalog, &mut rng)?;
        if !astraea_validate(&case, catalog) {
            rejected += 1;
            continue;
        }
        if seen.insert(case.id.clone()) {
            records.push(case);
        }
    }
    if rejected > 0 {
        log.warn(format!("ASTRAEA: {rejected} invalid draws regenerated"));
    }
    if records.len() < n {
        log.warn(format!("ASTRAEA: only {} distinct sentences of {n} requested", records.len()));
    }
    Ok((Corpus::new(Header::new("cases").with_seed(seed), records), log))
}
