// Walks one base case through equivalence partitioning, intensification
// and boundary values, then replays the lineage from the template.

use genfair::generator::{apply_bva, expand_equivalence, mutate_intensify, replay, Direction, RunLog};
use genfair::{Catalog, Generator, TemplateSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let template = templates.get("t02").ok_or("t02 missing")?;
    let base = template.instantiate_values(
        &catalog,
        &["middle-aged", "Hispanic", "female", "senior", "engineer", "no kids", "low-income"],
        Generator::Genfair,
    )?;
    println!("base:      {}", base.text);

    let mut log = RunLog::default();
    let variants = expand_equivalence(&base, &catalog, &["ETHNICITY".into()], &mut log)?;
    let asian = variants
        .iter()
        .find(|c| c.binding("ETHNICITY").is_some_and(|b| b.value == "Asian"))
        .ok_or("no Asian variant")?;
    println!("ep:        {}", asian.text);

    let severe = mutate_intensify(asian, &catalog, "ECONOMIC CONDITIONS", Direction::Intensify)?;
    println!("intensify: {}", severe.text);

    let young = apply_bva(&severe, &catalog, "AGE")?.remove(0);
    let beginner = apply_bva(&young, &catalog, "EXPERIENCE")?.remove(0);
    println!("bva:       {}", beginner.text);

    for step in &beginner.lineage.steps {
        println!("  step {step:?}");
    }
    let replayed = replay(&beginner, &templates, &catalog)?;
    assert_eq!(replayed, beginner.text);
    println!("replay matches");
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
