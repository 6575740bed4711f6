use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genfair::pipeline::{self, ModelKind, RunConfig};
use genfair::{Generator, MrId, Result};

#[derive(Parser)]
#[command(name = "genfair", version, about = "Metamorphic fairness testing for language models")]
struct Cli {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Restrict to these generators (repeatable).
    #[arg(long = "method", global = true)]
    methods: Vec<Generator>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the source corpora.
    Generate {
        /// Case count for the baselines.
        #[arg(short = 'n', long)]
        n: Option<usize>,
        /// Cap on base cases per template.
        #[arg(long)]
        base_cap: Option<usize>,
        #[arg(long)]
        max_cases: Option<usize>,
    },
    /// Derive follow-up cases with metamorphic relations.
    Pair {
        /// Relations to apply (repeatable); all by default.
        #[arg(long = "mr")]
        mrs: Vec<MrId>,
        /// Source cases per generator; 0 pairs every case.
        #[arg(short = 'n', long)]
        n: Option<usize>,
    },
    /// Query the model under test.
    Run {
        /// Use the mock model, optionally with a rule file instead of the
        /// shipped planted-bias rules.
        #[arg(long, value_name = "RULES", num_args = 0..=1)]
        mock: Option<Option<PathBuf>>,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Serve only from the cache (the given file or `--cache`).
        #[arg(long, value_name = "CACHE", num_args = 0..=1)]
        replay: Option<Option<PathBuf>>,
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Classify responses and compute FDR and metrics.
    Analyze {
        #[arg(long)]
        tone_url: Option<String>,
        #[arg(long)]
        tone_margin: Option<f64>,
        /// Use the lexicon when the remote classifier fails.
        #[arg(long)]
        tone_fallback: bool,
        /// Leave these relations out of aggregate rows (repeatable).
        #[arg(long = "exclude-mr")]
        exclude: Vec<MrId>,
    },
    /// Diversity and coherence of the source corpora.
    Metrics {
        /// Cases sampled per generator.
        #[arg(short = 'n', long)]
        n: Option<usize>,
    },
    /// Write report.md from the analysis outputs.
    Report,
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    if !cli.methods.is_empty() {
        cfg.methods = cli.methods.clone();
    }
    match &cli.command {
        Command::Generate { n, base_cap, max_cases } => {
            if let Some(n) = n {
                cfg.baseline_n = *n;
            }
            if base_cap.is_some() {
                cfg.genfair.base_cap = *base_cap;
            }
            if max_cases.is_some() {
                cfg.genfair.max_cases = *max_cases;
            }
        }
        Command::Pair { mrs, n } => {
            if !mrs.is_empty() {
                cfg.mrs = mrs.clone();
            }
            if let Some(n) = n {
                cfg.pair_sources = (*n > 0).then_some(*n);
            }
        }
        Command::Run { mock, endpoint, model, cache, replay, parallelism } => {
            if let Some(rules) = mock {
                cfg.model.kind = ModelKind::Mock;
                if rules.is_some() {
                    cfg.model.rules = rules.clone();
                }
            }
            if let Some(url) = endpoint {
                cfg.model.kind = ModelKind::Http;
                cfg.model.endpoint.base_url = url.clone();
            }
            if let Some(m) = model {
                cfg.model.endpoint.model_name = m.clone();
            }
            if cache.is_some() {
                cfg.cache = cache.clone();
            }
            if let Some(path) = replay {
                cfg.replay = true;
                if path.is_some() {
                    cfg.cache = path.clone();
                }
            }
            if let Some(p) = parallelism {
                cfg.parallelism = *p;
            }
        }
        Command::Analyze { tone_url, tone_margin, tone_fallback, exclude } => {
            if tone_url.is_some() {
                cfg.classifier.remote_url = tone_url.clone();
            }
            if let Some(m) = tone_margin {
                cfg.classifier.margin = *m;
            }
            cfg.classifier.fallback |= *tone_fallback;
            if !exclude.is_empty() {
                cfg.exclude_from_totals = exclude.clone();
            }
        }
        Command::Metrics { n } => {
            if let Some(n) = n {
                cfg.metrics_cases = *n;
            }
        }
        Command::Report => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = config(cli)?;
    let manifest = match cli.command {
        Command::Generate { .. } => pipeline::cmd_generate(&cfg)?,
        Command::Pair { .. } => pipeline::cmd_pair(&cfg)?,
        Command::Run { .. } => pipeline::cmd_run(&cfg)?,
        Command::Analyze { .. } => pipeline::cmd_analyze(&cfg)?,
        Command::Metrics { .. } => pipeline::cmd_metrics(&cfg)?,
        Command::Report => pipeline::cmd_report(&cfg)?,
    };
    for (name, hash) in &manifest.outputs {
        println!("{}  {hash}", cfg.out_dir.join(name).display());
    }
    if !manifest.warnings.is_empty() {
        eprintln!("{} warnings (see manifest_{}.json)", manifest.warnings.len(), manifest.stage);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
