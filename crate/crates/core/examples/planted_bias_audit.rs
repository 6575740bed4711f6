// Runs the whole pipeline against the planted-bias mock model in a
// temporary directory and prints the FDR table.

use genfair::generator::GenConfig;
use genfair::pipeline::{self, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("genfair-audit-{}", std::process::id()));
    let cfg = RunConfig {
        out_dir: dir.clone(),
        genfair: GenConfig {
            base_cap: Some(3),
            ..Default::default()
        },
        baseline_n: 200,
        pair_sources: Some(150),
        metrics_cases: 100,
        ..Default::default()
    };
    pipeline::cmd_generate(&cfg)?;
    pipeline::cmd_pair(&cfg)?;
    pipeline::cmd_run(&cfg)?;
    pipeline::cmd_analyze(&cfg)?;
    pipeline::cmd_report(&cfg)?;
    print!("{}", std::fs::read_to_string(dir.join("fdr_table.txt"))?);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
