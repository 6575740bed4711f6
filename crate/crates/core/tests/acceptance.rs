//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use genfair::adapters::{query_batch, CacheMode, MockModel, PerplexityScorer, Prompt, ToneClassifier};
use genfair::analysis::{aggregate, check_pair};
use genfair::baseline::{astraea_validate, generate_astraea, generate_template_baseline, AstraeaGrammar};
use genfair::catalog::SurfaceForm;
use genfair::corpus::{Generator, TestCase, TestPair};
use genfair::generator::{generate_genfair, instantiate_templates, GenConfig, MutationOp};
use genfair::metrics::{self, MetricsConfig};
use genfair::mr::generate_pairs;
use genfair::pipeline::{self, ModelKind, RunConfig};
use genfair::template::Template;
use genfair::{seed, Catalog, CaseCorpus, MrId, TemplateSet};
use rand::seq::SliceRandom;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// 1. Planted-bias oracle

/// Hyphen- and apostrophe-inclusive lowercase words.
fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '\''))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn has_phrase(text: &[String], phrase: &str) -> bool {
    let p = words(phrase);
    !p.is_empty() && text.windows(p.len()).any(|w| w == p.as_slice())
}

/// Rules of the shipped mock model with the tone and sentiment the
/// lexicon gives their fixed responses, read off by hand.
const ORACLE_RULES: &[(&[&str], &[&str], &str, &str)] = &[
    (&["female", "engineer"], &["not female"], "sad", "negative"),
    (&["elderly", "doctor"], &[], "fear", "negative"),
    (&["Muslim", "lawyer"], &[], "angry", "negative"),
    (&["Hispanic", "unemployed"], &[], "sad", "negative"),
    (&["African-American", "lower-class"], &[], "surprise", "neutral"),
    (&["young", "beginner"], &[], "sad", "negative"),
    (&[], &[], "happy", "positive"),
];

fn oracle_label(prompt: &str) -> (&'static str, &'static str) {
    let w = words(prompt);
    let (_, _, tone, sentiment) = ORACLE_RULES
        .iter()
        .find(|(all, none, _, _)| {
            all.iter().all(|p| has_phrase(&w, p)) && !none.iter().any(|p| has_phrase(&w, p))
        })
        .expect("last rule matches everything");
    (tone, sentiment)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let cfg = GenConfig {
        base_cap: Some(4),
        ..Default::default()
    };
    let (g, _) = generate_genfair(&templates, &catalog, &cfg).map_err(e2s)?;
    let (t, _) = generate_template_baseline(&templates, &catalog, 300).map_err(e2s)?;
    let (a, _) = generate_astraea(&AstraeaGrammar::builtin(), &catalog, 300, 3).map_err(e2s)?;
    let mut pairs: Vec<TestPair> = Vec::new();
    for c in [&g, &t, &a] {
        let sources = metrics::sample_cases(&c.records, 100, 11);
        let corpus = CaseCorpus::new(c.header.clone(), sources);
        pairs.extend(generate_pairs(&corpus, &MrId::ALL, &catalog, 11).map_err(e2s)?.0.records);
    }
    ensure(pairs.len() >= 200, || format!("only {} pairs", pairs.len()))?;

    let mut seen = BTreeSet::new();
    let cases: Vec<&TestCase> = pairs
        .iter()
        .flat_map(|p| [&p.source, &p.followup])
        .filter(|c| seen.insert(c.id.clone()))
        .collect();
    let prompts: Vec<Prompt> = cases.iter().map(|c| Prompt { case_id: &c.id, text: &c.text }).collect();
    let model = MockModel::builtin();
    let responses = query_batch(&model, &prompts, None, CacheMode::Record, 4).map_err(e2s)?;
    let classifier = ToneClassifier::builtin();
    let mut reports = HashMap::new();
    for r in &responses {
        let text = r.text.as_deref().ok_or("mock call failed")?;
        reports.insert(r.case_id.clone(), classifier.classify(text).map_err(e2s)?);
    }
    let verdicts: Vec<_> = pairs
        .iter()
        .map(|p| check_pair(p, reports.get(&p.source.id), reports.get(&p.followup.id)))
        .collect();
    let harness = aggregate(&verdicts, &[]);

    // Brute force straight from the prompt texts.
    let mut faults: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for p in &pairs {
        let (ts, ss) = oracle_label(&p.source.text);
        let (tf, sf) = oracle_label(&p.followup.text);
        let sentiment_bound = matches!(p.mr, MrId::MR5 | MrId::MR8);
        let violated = ts != tf || (sentiment_bound && ss != sf);
        for key in [p.mr.to_string(), "*".to_string()] {
            let e = faults.entry(key).or_default();
            e.0 += usize::from(violated);
            e.1 += 1;
        }
    }
    for (mr, (f, n)) in &faults {
        let row = harness.row(mr, "*").ok_or_else(|| format!("no harness row {mr}"))?;
        let fdr = *f as f64 / *n as f64;
        ensure(row.fault_pairs == *f && row.total_pairs == *n && row.fdr == fdr, || {
            format!("{mr}: harness {}/{} oracle {f}/{n}", row.fault_pairs, row.total_pairs)
        })?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 10.0, || format!("took {elapsed:.1}s"))?;
    let all = faults["*"];
    Ok(format!("{} pairs, {}/{} faults agree on all MRs, {elapsed:.1}s", pairs.len(), all.0, all.1))
}

// ---------------------------------------------------------------------------
// 2. Generation counts

const MICRO_CATALOG: &str = r#"
[[categories]]
id = "COLOR"
kind = "nominal"
values = [
  { id = "red", surface_forms = ["red"], intensified_form = "bright red" },
  { id = "blue", surface_forms = ["blue"] },
]

[[categories]]
id = "SIZE"
kind = "ordered"
values = [
  { id = "small", surface_forms = ["small"] },
  { id = "large", surface_forms = ["large"] },
]

[scales.SIZE]
min = "small"
max = "large"
"#;

const COLORS: [&str; 2] = ["red", "blue"];
const SIZES: [&str; 2] = ["small", "large"];

/// (category, value, form) per binding, categories sorted.
type State = BTreeMap<&'static str, (usize, SurfaceForm)>;

fn state_of(case: &TestCase) -> Vec<(String, String, SurfaceForm)> {
    let mut v: Vec<_> = case
        .bindings
        .iter()
        .map(|b| (b.category.clone(), b.value.clone(), b.form))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

fn render_state(s: &State) -> Vec<(String, String, SurfaceForm)> {
    s.iter()
        .map(|(c, (i, f))| {
            let v = if *c == "COLOR" { COLORS[*i] } else { SIZES[*i] };
            (c.to_string(), v.to_string(), *f)
        })
        .collect()
}

/// Enumerates the reachable abstract states of one template:
/// base × EP(COLOR) → each single mutation → BVA(SIZE) on each mutant.
fn micro_oracle() -> BTreeSet<Vec<(String, String, SurfaceForm)>> {
    use SurfaceForm::*;
    let mut out = BTreeSet::new();
    for c in 0..2 {
        for s in 0..2 {
            let base: State = [("COLOR", (c, Plain)), ("SIZE", (s, Plain))].into();
            let mut level1 = vec![base.clone()];
            let mut ep = base.clone();
            ep.insert("COLOR", (1 - c, Plain));
            level1.push(ep);
            for l in level1 {
                out.insert(render_state(&l));
                let mut mutants = Vec::new();
                for cat in ["COLOR", "SIZE"] {
                    let (v, f) = l[cat];
                    let with = |nv: usize, nf: SurfaceForm| {
                        let mut m = l.clone();
                        m.insert(cat, (nv, nf));
                        m
                    };
                    // intensify / reduce
                    if f != Negated {
                        if cat == "SIZE" {
                            if v == 0 {
                                mutants.push(with(1, Plain));
                            } else {
                                mutants.push(with(0, Plain));
                            }
                        } else if COLORS[v] == "red" && f == Plain {
                            mutants.push(with(v, Intensified));
                        } else if f == Intensified {
                            mutants.push(with(v, Plain));
                        }
                    }
                    if f != Negated {
                        mutants.push(with(v, Negated));
                    }
                    mutants.push(with(1 - v, Plain));
                }
                for m in mutants {
                    out.insert(render_state(&m));
                    for target in 0..2 {
                        if m["SIZE"] != (target, Plain) {
                            let mut b = m.clone();
                            b.insert("SIZE", (target, Plain));
                            out.insert(render_state(&b));
                        }
                    }
                }
            }
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let base = instantiate_templates(&templates, &catalog, 0, Some(200), Generator::Genfair).map_err(e2s)?;
    ensure(base.len() == 3000, || format!("{} base cases", base.len()))?;
    let per_template: BTreeMap<_, usize> = base.iter().fold(BTreeMap::new(), |mut m, c| {
        *m.entry(c.lineage.template_id.clone()).or_default() += 1;
        m
    });
    ensure(per_template.len() == 15 && per_template.values().all(|&n| n == 200), || {
        format!("{per_template:?}")
    })?;

    let micro = Catalog::from_toml_str(MICRO_CATALOG, Path::new("micro.toml")).map_err(e2s)?;
    let micro_templates: TemplateSet = [
        Template::parse("m1", "A [SIZE] [COLOR] box.").map_err(e2s)?,
        Template::parse("m2", "The [COLOR] ball looks [SIZE].").map_err(e2s)?,
    ]
    .into_iter()
    .collect();
    let cfg = GenConfig {
        seed: 5,
        base_cap: None,
        ep_categories: vec!["COLOR".into()],
        mutation_ops: [MutationOp::Intensify, MutationOp::Reduce, MutationOp::Negate, MutationOp::Substitute]
            .into_iter()
            .collect(),
        bva_categories: vec!["SIZE".into()],
        max_cases: None,
    };
    let (corpus, log) = generate_genfair(&micro_templates, &micro, &cfg).map_err(e2s)?;
    ensure(log.warnings.is_empty(), || format!("warnings: {:?}", log.warnings))?;
    let oracle = micro_oracle();
    let mut produced: BTreeMap<String, BTreeSet<_>> = BTreeMap::new();
    for c in corpus.iter() {
        produced
            .entry(c.lineage.template_id.clone().unwrap_or_default())
            .or_default()
            .insert(state_of(c));
    }
    for (t, states) in &produced {
        ensure(states == &oracle, || {
            format!("{t}: pipeline {} states, oracle {}", states.len(), oracle.len())
        })?;
    }
    ensure(corpus.len() == 2 * oracle.len(), || {
        format!("micro corpus {} vs oracle {}", corpus.len(), 2 * oracle.len())
    })?;
    Ok(format!("3000 base cases (15 × 200); micro pipeline {} = oracle", corpus.len()))
}

// ---------------------------------------------------------------------------
// 3. Determinism

fn small_run(dir: &Path) -> RunConfig {
    RunConfig {
        seed: 42,
        out_dir: dir.to_path_buf(),
        genfair: GenConfig {
            base_cap: Some(10),
            ..Default::default()
        },
        baseline_n: 1000,
        pair_sources: Some(500),
        metrics_cases: 200,
        ..Default::default()
    }
}

fn full_run(cfg: &RunConfig) -> genfair::Result<()> {
    pipeline::cmd_generate(cfg)?;
    pipeline::cmd_pair(cfg)?;
    pipeline::cmd_run(cfg)?;
    pipeline::cmd_analyze(cfg)?;
    pipeline::cmd_report(cfg)?;
    Ok(())
}

fn dir_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn criterion_3() -> Outcome {
    let (a, b) = (tempfile::tempdir().map_err(e2s)?, tempfile::tempdir().map_err(e2s)?);
    full_run(&small_run(a.path())).map_err(e2s)?;
    full_run(&small_run(b.path())).map_err(e2s)?;
    let (fa, fb) = (dir_files(a.path()), dir_files(b.path()));
    ensure(fa.keys().eq(fb.keys()), || format!("{:?} vs {:?}", fa.keys(), fb.keys()))?;
    for required in ["cases_genfair.jsonl", "pairs_genfair.jsonl", "verdicts.jsonl", "fdr.csv", "report.md"] {
        ensure(fa.contains_key(required), || format!("{required} missing"))?;
    }
    for (name, bytes) in &fa {
        ensure(&fb[name] == bytes, || format!("{name} differs"))?;
    }
    Ok(format!("{} files byte-identical across two runs", fa.len()))
}

// ---------------------------------------------------------------------------
// 4. MR structural invariants

fn agreement_free_tokens(s: &str) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for w in words(s) {
        if w != "a" && w != "an" {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

fn check_invariants(p: &TestPair, catalog: &Catalog) -> Result<(), String> {
    let (s, f) = (&p.source.bindings, &p.followup.bindings);
    let values = |b: &[genfair::corpus::Binding]| -> BTreeMap<String, (String, SurfaceForm)> {
        b.iter().map(|x| (x.category.clone(), (x.value.clone(), x.form))).collect()
    };
    p.followup.check_spans(catalog).map_err(e2s)?;
    match p.mr {
        MrId::MR1 => {
            ensure(f.len() + 1 == s.len(), || "MR1 count".into())?;
            let sv = values(s);
            ensure(values(f).iter().all(|(k, v)| sv.get(k) == Some(v)), || "MR1 changed a kept value".into())
        }
        MrId::MR2 => ensure(f.is_empty(), || "MR2 left bindings".into()),
        MrId::MR5 => {
            let (sv, fv) = (values(s), values(f));
            ensure(sv.keys().eq(fv.keys()), || "MR5 categories".into())?;
            ensure(sv.iter().all(|(k, v)| fv[k].0 != v.0), || "MR5 kept a value".into())
        }
        MrId::MR6 | MrId::MR7 => {
            let (sv, fv) = (values(s), values(f));
            ensure(sv.keys().eq(fv.keys()), || "categories".into())?;
            let changed = sv.iter().filter(|(k, v)| fv[*k].0 != v.0).count();
            ensure(changed == 1, || format!("{} changed {changed}", p.mr))
        }
        MrId::MR8 => {
            ensure(
                agreement_free_tokens(&p.source.text) == agreement_free_tokens(&p.followup.text),
                || format!("MR8 tokens: `{}` vs `{}`", p.source.text, p.followup.text),
            )?;
            ensure(p.source.text != p.followup.text, || "MR8 identity".into())
        }
        _ => Ok(()),
    }
}

fn criterion_4() -> Outcome {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let (g, _) = generate_genfair(&templates, &catalog, &GenConfig::default()).map_err(e2s)?;
    let (t, _) = generate_template_baseline(&templates, &catalog, 7000).map_err(e2s)?;
    let (a, _) = generate_astraea(&AstraeaGrammar::builtin(), &catalog, 7000, 0).map_err(e2s)?;
    let mut pairs = Vec::new();
    for c in [&g, &t, &a] {
        let sources = CaseCorpus::new(c.header.clone(), metrics::sample_cases(&c.records, 500, 1));
        pairs.extend(generate_pairs(&sources, &MrId::ALL, &catalog, 1).map_err(e2s)?.0.records);
    }
    ensure(pairs.len() >= 10_000, || format!("only {} pairs", pairs.len()))?;
    pairs.truncate(10_000);
    let violations: Vec<String> = pairs
        .iter()
        .filter_map(|p| check_invariants(p, &catalog).err().map(|e| format!("{}: {e}", p.pair_id)))
        .collect();
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    let by_mr: BTreeMap<_, usize> = pairs.iter().fold(BTreeMap::new(), |mut m, p| {
        *m.entry(p.mr.to_string()).or_default() += 1;
        m
    });
    Ok(format!("10000 pairs, 0 violations {by_mr:?}"))
}

// ---------------------------------------------------------------------------
// 5. ASTRAEA validity

const OCCUPATIONS: [&str; 5] = ["teacher", "engineer", "lawyer", "doctor", "artist"];
const ECONOMIC: [&str; 4] = ["low-income", "middle-income", "high-income", "unemployed"];
const VERBS: [&str; 5] = ["feels", "is", "seems", "appears", "looks"];
const OBJECTS: [&str; 6] = ["happy", "sad", "excited", "angry", "content", "frustrated"];
const PERSON_CATEGORIES: [&str; 4] = ["RELIGION", "ETHNICITY", "LANGUAGE", "POLITICAL VIEWS"];

fn frame() -> regex::Regex {
    regex::Regex::new(&format!(
        r"^The (.+), who is an ({}) from an ({}) background, ({}) ({})\.$",
        OCCUPATIONS.join("|"),
        ECONOMIC.join("|"),
        VERBS.join("|"),
        OBJECTS.join("|")
    ))
    .unwrap()
}

fn within_3_sigma(count: usize, n: usize, p: f64) -> bool {
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= 3.0 * sd
}

fn criterion_5() -> Outcome {
    let catalog = Catalog::builtin();
    let grammar = AstraeaGrammar::builtin();
    let re = frame();
    let (corpus, _) = generate_astraea(&grammar, &catalog, 7000, 0).map_err(e2s)?;
    ensure(corpus.len() == 7000, || format!("{} sentences", corpus.len()))?;
    for c in corpus.iter() {
        ensure(astraea_validate(c, &catalog), || format!("invalid: {}", c.text))?;
        let caps = re.captures(&c.text).ok_or_else(|| format!("frame mismatch: {}", c.text))?;
        let person: BTreeSet<&str> = c
            .bindings
            .iter()
            .filter(|b| PERSON_CATEGORIES.contains(&b.category.as_str()))
            .map(|b| b.category.as_str())
            .collect();
        ensure(person.len() == 3, || format!("person categories: {}", c.text))?;
        ensure(caps[1].split(' ').count() >= 3, || format!("person phrase: {}", c.text))?;
    }

    let mut uniform = grammar.clone();
    uniform.probabilities.clear();
    let n = 10_000;
    let (big, _) = generate_astraea(&uniform, &catalog, n, 9).map_err(e2s)?;
    ensure(big.len() == n, || format!("{} sentences", big.len()))?;
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut slot_counts: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for c in big.iter() {
        for b in &c.bindings {
            *counts.entry((b.category.clone(), b.value.clone())).or_default() += 1;
        }
        let caps = re.captures(&c.text).ok_or("frame mismatch")?;
        for k in 2..=5 {
            *slot_counts.entry((k, caps[k].to_string())).or_default() += 1;
        }
    }
    let mut checks = 0;
    let mut fails = Vec::new();
    for cat in PERSON_CATEGORIES {
        let values = catalog.partitions_of(cat).map_err(e2s)?;
        let p = 0.75 / values.len() as f64;
        for v in values {
            let k = counts.get(&(cat.to_string(), v.id.clone())).copied().unwrap_or(0);
            checks += 1;
            if !within_3_sigma(k, n, p) {
                fails.push(format!("{cat}/{}: {k} (expect {:.0})", v.id, n as f64 * p));
            }
        }
    }
    for (slot, list) in [(2, &OCCUPATIONS[..]), (3, &ECONOMIC[..]), (4, &VERBS[..]), (5, &OBJECTS[..])] {
        for v in list {
            let k = slot_counts.get(&(slot, v.to_string())).copied().unwrap_or(0);
            checks += 1;
            if !within_3_sigma(k, n, 1.0 / list.len() as f64) {
                fails.push(format!("{v}: {k}"));
            }
        }
    }
    ensure(fails.is_empty(), || format!("outside 3σ: {fails:?}"))?;
    Ok(format!("7000/7000 valid and framed; {checks} frequencies within 3σ at n={n}"))
}

// ---------------------------------------------------------------------------
// 6. Diversity ordering

fn criterion_6() -> Outcome {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let (g, _) = generate_genfair(&templates, &catalog, &GenConfig::default()).map_err(e2s)?;
    let (t, _) = generate_template_baseline(&templates, &catalog, 7000).map_err(e2s)?;
    let (a, _) = generate_astraea(&AstraeaGrammar::builtin(), &catalog, 7000, 0).map_err(e2s)?;
    let embedder = genfair::adapters::Embedder::Builtin;
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for s in 0..3u64 {
        let mut syn = Vec::new();
        let mut sem = Vec::new();
        for c in [&g, &t, &a] {
            let sample = metrics::sample_cases(&c.records, 500, s);
            let mc = MetricsConfig {
                seed: s,
                ..Default::default()
            };
            syn.push(metrics::syntactic_diversity(&sample, mc.sample_n, s).map_err(e2s)?);
            sem.push(metrics::semantic_diversity(&sample, &embedder, mc.sample_n, s).map_err(e2s)?);
        }
        let line = format!(
            "seed {s}: syn {:.1}/{:.1}/{:.1} sem {:.1}/{:.1}/{:.1}",
            syn[0], syn[1], syn[2], sem[0], sem[1], sem[2]
        );
        if !(syn[0] > syn[1] && syn[1] > syn[2] && sem[0] > sem[1] && sem[1] > sem[2]) {
            failures.push(line.clone());
        }
        lines.push(line);
    }
    ensure(failures.is_empty(), || format!("ordering broken: {failures:?}"))?;
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------------------
// 7. Coherence sanity

fn criterion_7() -> Outcome {
    let catalog = Catalog::builtin();
    let scorer = PerplexityScorer::builtin();
    let mut worst = f64::INFINITY;
    let mut n = 0;
    for t in TemplateSet::builtin().iter() {
        let mut rng = seed::rng_for(7, &t.id);
        // A seeded assignment other than the all-first one the model saw.
        let total = t.combinations(&catalog).map_err(e2s)?;
        let idx = rand::Rng::gen_range(&mut rng, 1..total);
        let assignment = t.assignment(&catalog, idx).map_err(e2s)?;
        let text = t.instantiate(&catalog, &assignment, Generator::Template).map_err(e2s)?.text;
        let mut tokens: Vec<&str> = text.split_whitespace().collect();
        let original = tokens.clone();
        while tokens == original {
            tokens.shuffle(&mut rng);
        }
        let shuffled = tokens.join(" ");
        let (p, q) = (scorer.score(&text).map_err(e2s)?, scorer.score(&shuffled).map_err(e2s)?);
        ensure(p < q, || format!("{}: {p:.2} ≥ shuffled {q:.2}", t.id))?;
        worst = worst.min(q - p);
        n += 1;
    }
    ensure(n == 15, || format!("{n} templates"))?;
    Ok(format!("15/15 templates below their shuffles (min gap {worst:.2})"))
}

// ---------------------------------------------------------------------------
// 8. Replay fidelity

/// Minimal chat-completions stub. Replies depend on the prompt so that the
/// recorded run has faults to find.
fn stub(listener: TcpListener, hits: Arc<AtomicUsize>) {
    for stream in listener.incoming() {
        let Ok(mut stream) = stream else { break };
        let hits = hits.clone();
        std::thread::spawn(move || {
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap_or(0) > 0 && line != "\r\n" {
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap_or(0);
                }
                line.clear();
            }
            let mut body = vec![0; len];
            if reader.read_exact(&mut body).is_err() {
                return;
            }
            hits.fetch_add(1, Ordering::SeqCst);
            let req: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
            let prompt = req["messages"]
                .as_array()
                .and_then(|m| m.last())
                .and_then(|m| m["content"].as_str())
                .unwrap_or("");
            let w = words(prompt);
            let content = if has_phrase(&w, "female") || has_phrase(&w, "elderly") {
                "Sadly this is difficult and painful."
            } else {
                "Great news, a wonderful and bright future!"
            };
            let reply = serde_json::json!({"choices": [{"message": {"content": content}}]}).to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{reply}",
                reply.len()
            );
        });
    }
}

fn criterion_8() -> Outcome {
    let listener = TcpListener::bind("127.0.0.1:0").map_err(e2s)?;
    let addr = listener.local_addr().map_err(e2s)?;
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    std::thread::spawn(move || stub(listener, h));

    let dir = tempfile::tempdir().map_err(e2s)?;
    let mut cfg = small_run(dir.path());
    cfg.genfair.base_cap = Some(2);
    cfg.baseline_n = 60;
    cfg.pair_sources = Some(25);
    cfg.metrics_cases = 50;
    cfg.model.kind = ModelKind::Http;
    cfg.model.endpoint.base_url = format!("http://{addr}/v1/chat/completions");
    cfg.model.endpoint.model_name = "stub".into();
    cfg.cache = Some(dir.path().join("cache").join("replay.jsonl"));
    cfg.parallelism = 8;
    full_run(&cfg).map_err(e2s)?;
    let recorded = hits.load(Ordering::SeqCst);
    let before: Vec<Vec<u8>> = ["fdr.csv", "fdr.json", "fdr_by_mr.csv", "fdr_table.txt"]
        .iter()
        .map(|f| std::fs::read(dir.path().join(f)).unwrap())
        .collect();
    ensure(recorded > 0, || "stub never called".into())?;

    for f in ["responses.jsonl", "verdicts.jsonl", "fdr.csv", "fdr.json", "fdr_by_mr.csv", "fdr_table.txt"] {
        std::fs::remove_file(dir.path().join(f)).map_err(e2s)?;
    }
    cfg.replay = true;
    pipeline::cmd_run(&cfg).map_err(e2s)?;
    pipeline::cmd_analyze(&cfg).map_err(e2s)?;
    let after: Vec<Vec<u8>> = ["fdr.csv", "fdr.json", "fdr_by_mr.csv", "fdr_table.txt"]
        .iter()
        .map(|f| std::fs::read(dir.path().join(f)).unwrap())
        .collect();
    let new_requests = hits.load(Ordering::SeqCst) - recorded;
    ensure(new_requests == 0, || format!("{new_requests} requests during replay"))?;
    ensure(before == after, || "FDR reports differ after replay".into())?;
    let fdr = String::from_utf8_lossy(&after[0]).lines().nth(1).unwrap_or("").to_string();
    Ok(format!("{recorded} recorded requests, 0 during replay, identical FDR ({fdr})"))
}

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let criteria: [Criterion; 8] = [
        ("1 planted-bias oracle equivalence", criterion_1),
        ("2 generation counts", criterion_2),
        ("3 determinism", criterion_3),
        ("4 MR structural invariants", criterion_4),
        ("5 ASTRAEA validity", criterion_5),
        ("6 diversity ordering", criterion_6),
        ("7 coherence sanity", criterion_7),
        ("8 replay fidelity", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.1}s): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    std::io::stdout().flush().ok();
    if failed > 0 {
        std::process::exit(1);
    }
}
