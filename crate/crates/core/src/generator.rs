//! GenFair source-case generation: template instantiation, equivalence
//! partitioning, mutation operators and boundary value analysis.
//!
//! Each operator changes exactly one binding (plus the articles and pronouns
//! that agree with it) and appends a [`DerivationStep`] to the case lineage,
//! so any generated case can be replayed from its template.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, SurfaceForm};
use crate::corpus::{
    dedup, CaseCorpus, Corpus, DerivationStep, Generator, Header, StepKind, TestCase,
};
use crate::edit;
use crate::error::{Error, Result};
use crate::seed;
use crate::template::TemplateSet;

/// Warnings and skips collected during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunLog {
    pub warnings: Vec<String>,
}

impl RunLog {
    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        log::warn!("{message}");
        self.warnings.push(message);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationOp {
    Intensify,
    Reduce,
    Negate,
    Substitute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Intensify,
    Reduce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    /// Maximum base cases drawn per template; `None` enumerates every
    /// combination.
    pub base_cap: Option<usize>,
    pub ep_categories: Vec<String>,
    pub mutation_ops: BTreeSet<MutationOp>,
    pub bva_categories: Vec<String>,
    pub max_cases: Option<usize>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            base_cap: Some(200),
            ep_categories: vec!["ETHNICITY".into()],
            mutation_ops: [
                MutationOp::Intensify,
                MutationOp::Reduce,
                MutationOp::Negate,
                MutationOp::Substitute,
            ]
            .into(),
            bva_categories: vec!["AGE".into(), "EXPERIENCE".into(), "FAMILY_STATUS".into()],
            max_cases: None,
        }
    }
}

impl GenConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Fills every template's placeholders. Templates with more than `cap`
/// combinations get a seeded uniform sample of `cap` distinct combinations,
/// kept in lexicographic order; the rest are enumerated exhaustively.
pub fn instantiate_templates(
    templates: &TemplateSet,
    catalog: &Catalog,
    seed: u64,
    cap: Option<usize>,
    generator: Generator,
) -> Result<CaseCorpus> {
    let mut records = Vec::new();
    for t in templates.iter() {
        t.check(catalog)?;
        let total = t.combinations(catalog)?;
        let picks: Vec<usize> = match cap {
            Some(cap) if total > cap => {
                let mut rng = seed::rng_for(seed, &format!("base/{}", t.id));
                let mut v = index::sample(&mut rng, total, cap).into_vec();
                v.sort_unstable();
                v
            }
            _ => (0..total).collect(),
        };
        for i in picks {
            let assignment = t.assignment(catalog, i)?;
            records.push(t.instantiate(catalog, &assignment, generator)?);
        }
    }
    Ok(Corpus::new(Header::new("cases").with_seed(seed), records))
}

fn bound(case: &TestCase, category: &str) -> Result<usize> {
    case.binding_index(category)
        .ok_or_else(|| Error::not_applicable(format!("{category} not bound")))
}

fn derive(
    case: &TestCase,
    catalog: &Catalog,
    idx: usize,
    kind: StepKind,
    to: &str,
    form: SurfaceForm,
) -> Result<TestCase> {
    let mut out = case.clone();
    let from = out.bindings[idx].value.clone();
    let category = out.bindings[idx].category.clone();
    edit::set_value(&mut out, idx, catalog, to, form)?;
    out.lineage.steps.push(DerivationStep {
        kind,
        category,
        from,
        to: to.to_string(),
    });
    out.refresh_id();
    Ok(out)
}

/// One variant per other partition value of each requested category.
/// Unbound categories are skipped with a warning.
pub fn expand_equivalence(
    case: &TestCase,
    catalog: &Catalog,
    categories: &[String],
    log: &mut RunLog,
) -> Result<Vec<TestCase>> {
    let mut out = Vec::new();
    for category in categories {
        let Some(idx) = case.binding_index(category) else {
            log.warn(format!("case {}: {category} not bound, EP skipped", case.id));
            continue;
        };
        let current = case.bindings[idx].value.clone();
        for v in catalog.partitions_of(category)? {
            if v.id != current {
                out.push(derive(case, catalog, idx, StepKind::Ep, &v.id, SurfaceForm::Plain)?);
            }
        }
    }
    Ok(out)
}

/// Moves an ordered value one step toward the scale maximum (intensify) or
/// minimum (reduce); for nominal values switches to or from the value's
/// intensified form.
pub fn mutate_intensify(
    case: &TestCase,
    catalog: &Catalog,
    category: &str,
    direction: Direction,
) -> Result<TestCase> {
    let idx = bound(case, category)?;
    let b = &case.bindings[idx];
    if b.form == SurfaceForm::Negated {
        return Err(Error::not_applicable("negated attribute"));
    }
    let kind = match direction {
        Direction::Intensify => StepKind::MutateIntensify,
        Direction::Reduce => StepKind::MutateReduce,
    };
    let cat = catalog.category(category)?;
    if cat.is_ordered() {
        let step = catalog.toward_max(category)?
            * match direction {
                Direction::Intensify => 1,
                Direction::Reduce => -1,
            };
        let pos = cat.position(&b.value)? as isize + step;
        if pos < 0 || pos as usize >= cat.values.len() {
            return Err(Error::not_applicable("already at the scale extreme"));
        }
        let to = cat.values[pos as usize].id.clone();
        return derive(case, catalog, idx, kind, &to, SurfaceForm::Plain);
    }
    let value = cat.value(&b.value)?;
    match (direction, b.form) {
        (Direction::Intensify, SurfaceForm::Plain)
            if value.render(b.register, SurfaceForm::Intensified).is_some() =>
        {
            derive(case, catalog, idx, kind, &b.value.clone(), SurfaceForm::Intensified)
        }
        (Direction::Reduce, SurfaceForm::Intensified) => {
            derive(case, catalog, idx, kind, &b.value.clone(), SurfaceForm::Plain)
        }
        _ => Err(Error::not_applicable(format!(
            "{category}/{} has no {direction:?} form",
            b.value
        ))),
    }
}

/// Replaces the attribute with its negated form. Negation does not stack.
pub fn mutate_negate(case: &TestCase, catalog: &Catalog, category: &str) -> Result<TestCase> {
    let idx = bound(case, category)?;
    let b = &case.bindings[idx];
    if b.form == SurfaceForm::Negated {
        return Err(Error::not_applicable("already negated"));
    }
    let value = b.value.clone();
    derive(case, catalog, idx, StepKind::MutateNegate, &value, SurfaceForm::Negated)
}

/// Replaces the attribute with a uniformly chosen different value of the
/// same category.
pub fn mutate_substitute<R: Rng + ?Sized>(
    case: &TestCase,
    catalog: &Catalog,
    category: &str,
    rng: &mut R,
) -> Result<TestCase> {
    let idx = bound(case, category)?;
    let to = pick_other(catalog, category, &case.bindings[idx].value, rng)?;
    derive(case, catalog, idx, StepKind::MutateSubstitute, &to, SurfaceForm::Plain)
}

pub(crate) fn pick_other<R: Rng + ?Sized>(
    catalog: &Catalog,
    category: &str,
    current: &str,
    rng: &mut R,
) -> Result<String> {
    let others: Vec<&str> = catalog
        .partitions_of(category)?
        .iter()
        .map(|v| v.id.as_str())
        .filter(|v| *v != current)
        .collect();
    if others.is_empty() {
        return Err(Error::not_applicable(format!("{category} has no other value")));
    }
    Ok(others[rng.gen_range(0..others.len())].to_string())
}

/// Variants at the scale minimum and maximum, omitting the current value.
pub fn apply_bva(case: &TestCase, catalog: &Catalog, category: &str) -> Result<Vec<TestCase>> {
    let (lo, hi) = catalog.boundary_values(category)?;
    let idx = bound(case, category)?;
    let current = &case.bindings[idx];
    [lo, hi]
        .into_iter()
        .filter(|v| !(v.id == current.value && current.form == SurfaceForm::Plain))
        .map(|v| derive(case, catalog, idx, StepKind::Bva, &v.id, SurfaceForm::Plain))
        .collect()
}

fn mutants(
    case: &TestCase,
    catalog: &Catalog,
    ops: &BTreeSet<MutationOp>,
    seed: u64,
) -> Result<Vec<TestCase>> {
    let mut out = Vec::new();
    for b in &case.bindings {
        for op in ops {
            let result = match op {
                MutationOp::Intensify => {
                    mutate_intensify(case, catalog, &b.category, Direction::Intensify)
                }
                MutationOp::Reduce => mutate_intensify(case, catalog, &b.category, Direction::Reduce),
                MutationOp::Negate => mutate_negate(case, catalog, &b.category),
                MutationOp::Substitute => {
                    let mut rng = seed::rng_for(seed, &format!("sub/{}/{}", case.id, b.category));
                    mutate_substitute(case, catalog, &b.category, &mut rng)
                }
            };
            match result {
                Ok(m) => out.push(m),
                Err(e) if e.is_not_applicable() => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Runs the full pipeline: instantiate, expand, mutate, boundary analysis,
/// dedup, optional cap. Cases whose lineage fails to replay are dropped and
/// logged.
pub fn generate_genfair(
    templates: &TemplateSet,
    catalog: &Catalog,
    config: &GenConfig,
) -> Result<(CaseCorpus, RunLog)> {
    let mut log = RunLog::default();
    let base = instantiate_templates(templates, catalog, config.seed, config.base_cap, Generator::Genfair)?;
    let mut records = Vec::new();
    for b in &base.records {
        let mut level1 = vec![b.clone()];
        let ep_categories: Vec<String> = config
            .ep_categories
            .iter()
            .filter(|c| b.binding(c).is_some())
            .cloned()
            .collect();
        level1.extend(expand_equivalence(b, catalog, &ep_categories, &mut log)?);
        for ep in level1 {
            let ms = mutants(&ep, catalog, &config.mutation_ops, config.seed)?;
            records.push(ep);
            for m in ms {
                let mut boundary = Vec::new();
                for category in &config.bva_categories {
                    if m.binding(category).is_none() {
                        continue;
                    }
                    match apply_bva(&m, catalog, category) {
                        Ok(v) => boundary.extend(v),
                        Err(e) if e.is_not_applicable() => {}
                        Err(e) => return Err(e),
                    }
                }
                records.push(m);
                records.extend(boundary);
            }
        }
    }
    let mut checked = Vec::with_capacity(records.len());
    for case in records {
        match replay(&case, templates, catalog) {
            Ok(text) if text == case.text => checked.push(case),
            Ok(text) => log.warn(format!(
                "case {}: lineage replays to `{text}`, dropped",
                case.id
            )),
            Err(e) => log.warn(format!("case {}: replay failed ({e}), dropped", case.id)),
        }
    }
    let mut corpus = dedup(&Corpus::new(base.header, checked));
    if let Some(max) = config.max_cases {
        corpus = corpus.take_first(max);
    }
    Ok((corpus, log))
}

/// Rebuilds a case's text from its template and lineage alone.
pub fn replay(case: &TestCase, templates: &TemplateSet, catalog: &Catalog) -> Result<String> {
    let template_id = case
        .lineage
        .template_id
        .as_deref()
        .ok_or_else(|| Error::validation(format!("case {}", case.id), "no template in lineage"))?;
    let template = templates.get(template_id).ok_or_else(|| Error::Lookup {
        kind: "template",
        id: template_id.to_string(),
    })?;
    let values: Vec<&str> = case.lineage.base.iter().map(|(_, v)| v.as_str()).collect();
    let mut out = template.instantiate_values(catalog, &values, case.generator)?;
    for step in &case.lineage.steps {
        let idx = bound(&out, &step.category)?;
        let form = match step.kind {
            StepKind::MutateNegate => SurfaceForm::Negated,
            StepKind::MutateIntensify if step.from == step.to => SurfaceForm::Intensified,
            _ => SurfaceForm::Plain,
        };
        edit::set_value(&mut out, idx, catalog, &step.to, form)?;
    }
    Ok(out.text)
}
