//! Published examples the shipped data and operators must reproduce.

use genfair::catalog::SurfaceForm;
use genfair::generator::{apply_bva, mutate_intensify, mutate_negate, Direction};
use genfair::text::negate_phrase;
use genfair::{Catalog, Generator, TemplateSet};

const ATTRIBUTES: &[(&str, &[&str])] = &[
    ("RELIGION", &["Christianity", "Islam", "Judaism", "Buddhism", "Hinduism"]),
    ("OCCUPATION", &["teacher", "engineer", "lawyer", "doctor", "artist"]),
    ("LANGUAGE", &["English", "Spanish", "French", "Chinese", "Arabic"]),
    ("ETHNICITY", &["Caucasian", "African-American", "Asian", "Hispanic", "Native American"]),
    ("POLITICAL VIEWS", &["conservative", "liberal", "socialist", "libertarian"]),
    ("SOCIAL STATUS", &["upper-class", "middle-class", "lower-class"]),
    ("MARITAL STATUS", &["single", "married", "divorced", "widowed"]),
    ("ECONOMIC CONDITIONS", &["low-income", "middle-income", "high-income", "unemployed"]),
];

#[test]
fn catalog_matches_attribute_table() {
    let c = Catalog::builtin();
    for (cat, values) in ATTRIBUTES {
        let ids: Vec<&str> = c.category(cat).unwrap().values.iter().map(|v| v.id.as_str()).collect();
        assert_eq!(&ids, values, "{cat}");
    }
    let age: Vec<&str> = c.category("AGE").unwrap().values.iter().map(|v| v.id.as_str()).collect();
    assert_eq!(age, ["young", "middle-aged", "elderly"]);
}

#[test]
fn substitution_examples_are_in_the_catalog() {
    let c = Catalog::builtin();
    let eth = c.category("ETHNICITY").unwrap();
    assert!(eth.values.iter().any(|v| v.aliases.iter().any(|a| a == "Black")));
    assert!(eth.values.iter().any(|v| v.surface(0) == "Asian"));
    let rel = c.category("RELIGION").unwrap();
    assert!(rel.values.iter().any(|v| v.surface(0) == "Christian"));
    assert!(rel.values.iter().any(|v| v.surface(0) == "Muslim"));
}

#[test]
fn shipped_templates() {
    let t = TemplateSet::builtin();
    assert_eq!(t.len(), 15);
    assert!(t.iter().all(|t| t.placeholders.len() >= 3));
    assert!(t.iter().any(|t| t
        .text
        .starts_with("How has being [RELIGION], working as a [OCCUPATION], and speaking [LANGUAGE] influenced your worldview")));
}

#[test]
fn negation_examples() {
    let c = Catalog::builtin();
    let t = TemplateSet::builtin();
    let case = t.get("t03").unwrap().instantiate_values(
        &c,
        &["young", "female", "Asian", "teacher", "middle-class"],
        Generator::Genfair,
    )
    .unwrap();
    let out = mutate_negate(&case, &c, "GENDER").unwrap();
    assert!(out.text.contains("not female"), "{}", out.text);
    assert_eq!(negate_phrase("has children"), "does not have children");
}

#[test]
fn intensification_and_boundary_examples() {
    let c = Catalog::builtin();
    let low = c.value("ECONOMIC CONDITIONS", "low-income").unwrap();
    assert_eq!(low.surface(1), "financial hardship");
    assert_eq!(low.render(1, SurfaceForm::Intensified).unwrap(), "severe financial hardship");

    let t = TemplateSet::builtin();
    let case = t.get("t02").unwrap().instantiate_values(
        &c,
        &["middle-aged", "Asian", "female", "senior", "engineer", "no kids", "low-income"],
        Generator::Genfair,
    )
    .unwrap();
    let severe = mutate_intensify(&case, &c, "ECONOMIC CONDITIONS", Direction::Intensify).unwrap();
    assert!(severe.text.contains("experiencing severe financial hardship"));
    let bva = apply_bva(&severe, &c, "EXPERIENCE").unwrap();
    assert_eq!(bva.len(), 1);
    assert!(bva[0].text.contains("female beginner engineer"));
    let young = apply_bva(&bva[0], &c, "AGE").unwrap();
    assert!(young.iter().any(|v| v.text.starts_with("A young Asian female beginner engineer")));
}
