// Diversity and coherence of the three generators on equal-size samples.

use genfair::adapters::{Embedder, PerplexityScorer};
use genfair::baseline::{generate_astraea, generate_template_baseline, AstraeaGrammar};
use genfair::generator::{generate_genfair, GenConfig};
use genfair::metrics::{self, MetricsConfig};
use genfair::{Catalog, TemplateSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let config = GenConfig {
        base_cap: Some(10),
        ..Default::default()
    };
    let (genfair, _) = generate_genfair(&templates, &catalog, &config)?;
    let (template, _) = generate_template_baseline(&templates, &catalog, 1000)?;
    let (astraea, _) = generate_astraea(&AstraeaGrammar::builtin(), &catalog, 1000, 0)?;

    let embedder = Embedder::Builtin;
    let scorer = PerplexityScorer::builtin();
    let mc = MetricsConfig {
        sample_n: 5000,
        coherence_n: 200,
        seed: 0,
    };
    let mut reports = Vec::new();
    for (name, corpus) in [("genfair", &genfair), ("template", &template), ("astraea", &astraea)] {
        let sample = metrics::sample_cases(&corpus.records, 200, 0);
        reports.push(metrics::compute(name, &sample, &embedder, &scorer, &mc)?);
    }
    print!("{}", metrics::to_table(&reports));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
