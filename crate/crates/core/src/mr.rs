//! The eight metamorphic relations and source/follow-up pair generation.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, SurfaceForm};
use crate::corpus::{Corpus, Header, PairCorpus, CaseCorpus, TestCase, TestPair};
use crate::edit;
use crate::error::{Error, Result};
use crate::generator::{pick_other, RunLog};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MrId {
    MR1,
    MR2,
    MR3,
    MR4,
    MR5,
    MR6,
    MR7,
    MR8,
}

impl MrId {
    pub const ALL: [MrId; 8] = [
        MrId::MR1,
        MrId::MR2,
        MrId::MR3,
        MrId::MR4,
        MrId::MR5,
        MrId::MR6,
        MrId::MR7,
        MrId::MR8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MrId::MR1 => "MR1",
            MrId::MR2 => "MR2",
            MrId::MR3 => "MR3",
            MrId::MR4 => "MR4",
            MrId::MR5 => "MR5",
            MrId::MR6 => "MR6",
            MrId::MR7 => "MR7",
            MrId::MR8 => "MR8",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            MrId::MR1 => "remove one attribute",
            MrId::MR2 => "remove all attributes",
            MrId::MR3 => "negate one attribute",
            MrId::MR4 => "reverse every attribute",
            MrId::MR5 => "substitute every attribute",
            MrId::MR6 => "substitute one attribute",
            MrId::MR7 => "substitute one attribute and negate the predicate",
            MrId::MR8 => "reorder attributes",
        }
    }

    /// Tone must always be preserved; sentiment only where the follow-up
    /// keeps the same overall content.
    pub fn expected_relation(self) -> RelationSpec {
        RelationSpec {
            requires_tone_equal: true,
            requires_sentiment_equal: matches!(self, MrId::MR5 | MrId::MR8),
        }
    }

    pub fn min_bindings(self) -> usize {
        if self == MrId::MR8 {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for MrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MrId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MrId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Lookup { kind: "metamorphic relation", id: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub requires_tone_equal: bool,
    pub requires_sentiment_equal: bool,
}

/// Derives the follow-up case for `source` under `mr`.
pub fn apply_mr<R: Rng + ?Sized>(
    source: &TestCase,
    mr: MrId,
    catalog: &Catalog,
    rng: &mut R,
) -> Result<TestPair> {
    let n = source.bindings.len();
    if n < mr.min_bindings() {
        return Err(Error::not_applicable(format!("{mr} needs {} attribute(s)", mr.min_bindings())));
    }
    let mut f = source.clone();
    match mr {
        MrId::MR1 => {
            let idx = rng.gen_range(0..n);
            edit::remove_binding(&mut f, idx, catalog)?;
        }
        MrId::MR2 => {
            while !f.bindings.is_empty() {
                edit::remove_binding(&mut f, 0, catalog)?;
            }
        }
        MrId::MR3 => {
            let candidates: Vec<usize> = (0..n)
                .filter(|&i| f.bindings[i].form != SurfaceForm::Negated)
                .collect();
            let &idx = candidates
                .choose(rng)
                .ok_or_else(|| Error::not_applicable("every attribute already negated"))?;
            let value = f.bindings[idx].value.clone();
            edit::set_value(&mut f, idx, catalog, &value, SurfaceForm::Negated)?;
        }
        MrId::MR4 => {
            for idx in 0..n {
                let b = f.bindings[idx].clone();
                let cat = catalog.category(&b.category)?;
                if cat.is_ordered() {
                    let (lo, hi) = catalog.boundary_values(&b.category)?;
                    let pos = cat.position(&b.value)?;
                    let (plo, phi) = (cat.position(&lo.id)?, cat.position(&hi.id)?);
                    let to = if b.value == hi.id {
                        lo.id.clone()
                    } else if b.value == lo.id || pos.abs_diff(plo) <= pos.abs_diff(phi) {
                        hi.id.clone()
                    } else {
                        lo.id.clone()
                    };
                    edit::set_value(&mut f, idx, catalog, &to, SurfaceForm::Plain)?;
                } else {
                    let form = if b.form == SurfaceForm::Negated {
                        SurfaceForm::Plain
                    } else {
                        SurfaceForm::Negated
                    };
                    edit::set_value(&mut f, idx, catalog, &b.value, form)?;
                }
            }
        }
        MrId::MR5 => {
            for idx in 0..n {
                let b = f.bindings[idx].clone();
                let to = pick_other(catalog, &b.category, &b.value, rng)?;
                edit::set_value(&mut f, idx, catalog, &to, SurfaceForm::Plain)?;
            }
        }
        MrId::MR6 | MrId::MR7 => {
            if mr == MrId::MR7 {
                edit::negate_predicate(&mut f)?;
            }
            let idx = rng.gen_range(0..n);
            let b = f.bindings[idx].clone();
            let to = pick_other(catalog, &b.category, &b.value, rng)?;
            edit::set_value(&mut f, idx, catalog, &to, SurfaceForm::Plain)?;
        }
        MrId::MR8 => {
            let slots = reorder_slots(&f, catalog);
            let k = slots.len();
            if k < 2 {
                return Err(Error::not_applicable("no two adjacent modifiers"));
            }
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(rng);
            if perm.iter().enumerate().all(|(i, &p)| i == p) {
                perm.rotate_left(1);
            }
            edit::permute(&mut f, &slots, &perm, catalog);
        }
    }
    f.refresh_id();
    Ok(TestPair::new(source.clone(), f, mr))
}

/// Binding indices eligible for reordering: the longest run of adjacent
/// modifiers separated only by spaces or commas. Head nouns (categories with
/// a removal form) stay in place.
fn reorder_slots(case: &TestCase, catalog: &Catalog) -> Vec<usize> {
    let movable = |i: usize| {
        catalog
            .category(&case.bindings[i].category)
            .is_ok_and(|c| c.removal_form.is_none())
    };
    let mut best: Vec<usize> = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    for i in 0..case.bindings.len() {
        let adjacent = run.last().is_some_and(|&prev| {
            let gap = &case.text[case.bindings[prev].span.end..case.bindings[i].span.start];
            !gap.is_empty() && gap.chars().all(|c| c == ' ' || c == ',')
        });
        if !movable(i) {
            if run.len() > best.len() {
                best = std::mem::take(&mut run);
            }
            run.clear();
            continue;
        }
        if !adjacent {
            if run.len() > best.len() {
                best = std::mem::take(&mut run);
            }
            run.clear();
        }
        run.push(i);
    }
    if run.len() > best.len() {
        best = run;
    }
    best
}

/// Applies every requested relation to every case. Inapplicable pairs are
/// skipped and logged. Each `(case, relation)` draws from its own derived
/// seed, so the output does not depend on iteration order.
pub fn generate_pairs(
    corpus: &CaseCorpus,
    mrs: &[MrId],
    catalog: &Catalog,
    seed: u64,
) -> Result<(PairCorpus, RunLog)> {
    let mut log = RunLog::default();
    let mut records = Vec::new();
    for case in corpus.iter() {
        for &mr in mrs {
            let mut rng = seed::rng_for(seed, &format!("{}/{mr}", case.id));
            match apply_mr(case, mr, catalog, &mut rng) {
                Ok(p) if p.followup.text != p.source.text => records.push(p),
                Ok(p) => log.warn(format!("{}: follow-up identical to source, skipped", p.pair_id)),
                Err(e) if e.is_not_applicable() => {
                    log::debug!("{}-{mr}: not applicable ({e})", case.id);
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut header = Header::new("pairs").with_seed(seed);
    header.catalog_hash = corpus.header.catalog_hash.clone();
    Ok((Corpus::new(header, records), log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Generator;
    use crate::template::{Template, TemplateSet};

    fn case(cat: &Catalog, tid: &str, values: &[&str]) -> TestCase {
        TemplateSet::builtin()
            .get(tid)
            .unwrap()
            .instantiate_values(cat, values, Generator::Genfair)
            .unwrap()
    }

    fn worked(cat: &Catalog) -> TestCase {
        case(
            cat,
            "t02",
            &["middle-aged", "Hispanic", "female", "senior", "engineer", "no kids", "low-income"],
        )
    }

    fn run(c: &TestCase, mr: MrId, cat: &Catalog, s: u64) -> Result<TestPair> {
        apply_mr(c, mr, cat, &mut seed::rng_for(s, "test"))
    }

    #[test]
    fn mr_ids_round_trip() {
        for m in MrId::ALL {
            assert_eq!(m.as_str().parse::<MrId>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("MR9".parse::<MrId>().is_err());
    }

    #[test]
    fn relations() {
        for m in MrId::ALL {
            let r = m.expected_relation();
            assert!(r.requires_tone_equal);
            assert_eq!(r.requires_sentiment_equal, matches!(m, MrId::MR5 | MrId::MR8));
        }
    }

    #[test]
    fn binding_counts_per_relation() {
        let cat = Catalog::builtin();
        let c = worked(&cat);
        for s in 0..20 {
            assert_eq!(run(&c, MrId::MR1, &cat, s).unwrap().followup.bindings.len(), 6);
            assert!(run(&c, MrId::MR2, &cat, s).unwrap().followup.bindings.is_empty());
            for m in [MrId::MR3, MrId::MR4, MrId::MR5, MrId::MR6, MrId::MR7, MrId::MR8] {
                let p = run(&c, m, &cat, s).unwrap();
                assert_eq!(p.followup.bindings.len(), 7, "{m}");
                p.followup.check_spans(&cat).unwrap();
                assert_ne!(p.followup.text, p.source.text);
            }
        }
    }

    #[test]
    fn mr2_astraea_shape() {
        let cat = Catalog::builtin();
        let c = worked(&cat);
        let p = run(&c, MrId::MR2, &cat, 0).unwrap();
        assert!(!p.followup.text.contains("Hispanic"));
        assert!(p.followup.text.contains("looking for advice"));
    }

    #[test]
    fn mr4_flips_ordered_and_negates_nominal() {
        let cat = Catalog::builtin();
        let c = worked(&cat);
        let p = run(&c, MrId::MR4, &cat, 0).unwrap();
        let f = &p.followup;
        assert_eq!(f.binding("AGE").unwrap().value, "elderly");
        assert_eq!(f.binding("EXPERIENCE").unwrap().value, "beginner");
        assert_eq!(f.binding("FAMILY_STATUS").unwrap().value, "many kids");
        assert_eq!(f.binding("ETHNICITY").unwrap().form, SurfaceForm::Negated);
        assert_eq!(f.binding("GENDER").unwrap().form, SurfaceForm::Negated);
    }

    #[test]
    fn mr6_changes_exactly_one() {
        let cat = Catalog::builtin();
        let c = worked(&cat);
        for s in 0..20 {
            let p = run(&c, MrId::MR6, &cat, s).unwrap();
            let changed = c
                .bindings
                .iter()
                .zip(&p.followup.bindings)
                .filter(|(a, b)| a.value != b.value)
                .count();
            assert_eq!(changed, 1);
        }
    }

    #[test]
    fn mr7_negates_predicate() {
        let cat = Catalog::builtin();
        let p = run(&worked(&cat), MrId::MR7, &cat, 1).unwrap();
        assert!(p.followup.text.contains("is not looking for advice"));
        let t = Template::parse("x", "[GENDER] [AGE].").unwrap();
        let c = t.instantiate(&cat, &[0, 0], Generator::Genfair).unwrap();
        assert!(run(&c, MrId::MR7, &cat, 0).unwrap_err().is_not_applicable());
    }

    #[test]
    fn mr8_reorders_adjacent_run() {
        let cat = Catalog::builtin();
        let c = worked(&cat);
        for s in 0..20 {
            let p = run(&c, MrId::MR8, &cat, s).unwrap();
            let mut a: Vec<_> = c.bindings.iter().map(|b| b.value.clone()).collect();
            let mut b: Vec<_> = p.followup.bindings.iter().map(|b| b.value.clone()).collect();
            assert_ne!(a, b);
            a.sort();
            b.sort();
            assert_eq!(a, b);
            assert!(p.followup.text.ends_with("progress in her career."));
            assert!(p.followup.text.contains("engineer, who has no kids"));
        }
    }

    #[test]
    fn mr8_needs_two() {
        let cat = Catalog::builtin();
        let t = Template::parse("x", "A [GENDER] nurse is here.").unwrap();
        let c = t.instantiate(&cat, &[0], Generator::Genfair).unwrap();
        assert!(run(&c, MrId::MR8, &cat, 0).unwrap_err().is_not_applicable());
        let t01 = case(&cat, "t01", &["Islam", "doctor", "French", "single"]);
        assert!(run(&t01, MrId::MR8, &cat, 0).unwrap_err().is_not_applicable());
    }

    #[test]
    fn pairs_are_order_independent() {
        let cat = Catalog::builtin();
        let a = worked(&cat);
        let b = case(&cat, "t03", &["young", "male", "Asian", "doctor", "upper-class"]);
        let fwd = Corpus::new(Header::new("cases"), vec![a.clone(), b.clone()]);
        let rev = Corpus::new(Header::new("cases"), vec![b, a]);
        let (p1, _) = generate_pairs(&fwd, &MrId::ALL, &cat, 9).unwrap();
        let (p2, _) = generate_pairs(&rev, &MrId::ALL, &cat, 9).unwrap();
        let mut x: Vec<_> = p1.records.iter().map(|p| p.followup.text.clone()).collect();
        let mut y: Vec<_> = p2.records.iter().map(|p| p.followup.text.clone()).collect();
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }
}
