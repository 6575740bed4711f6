// Builds the three source corpora and prints their sizes and samples.

use genfair::baseline::{generate_astraea, generate_template_baseline, AstraeaGrammar};
use genfair::generator::{generate_genfair, GenConfig};
use genfair::{Catalog, TemplateSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let config = GenConfig {
        base_cap: Some(5),
        ..GenConfig::default().with_seed(7)
    };
    let (genfair, log) = generate_genfair(&templates, &catalog, &config)?;
    let (template, _) = generate_template_baseline(&templates, &catalog, 500)?;
    let (astraea, _) = generate_astraea(&AstraeaGrammar::builtin(), &catalog, 500, 7)?;
    println!("genfair {} cases ({} warnings)", genfair.len(), log.warnings.len());
    println!("template {} cases, astraea {} cases", template.len(), astraea.len());
    for corpus in [&genfair, &template, &astraea] {
        for case in corpus.iter().step_by(corpus.len().max(3) / 3).take(3) {
            println!("  [{}] {}", case.generator, case.text);
        }
    }
    assert!(genfair.len() > template.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
