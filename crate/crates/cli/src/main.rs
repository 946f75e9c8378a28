use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use modechoice::learner::Family;
use modechoice_cli::{commands, RunConfig};

/// Freight mode-choice classifier benchmark.
///
/// Every flag can also be set through the environment variable named in its
/// help text. Flags override the configuration file.
#[derive(Parser)]
#[command(name = "modechoice", version)]
struct Cli {
    /// Run configuration (TOML). Defaults give the full experiment design.
    #[arg(long, global = true, env = "MODECHOICE_CONFIG")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, env = "MODECHOICE_SEED")]
    seed: Option<u64>,
    /// Worker threads for the grid.
    #[arg(long, global = true, env = "MODECHOICE_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "MODECHOICE_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic shipment table into <out>/shipments.csv.
    Generate {
        /// Number of records (overrides data.synthetic.n_records).
        #[arg(long)]
        records: Option<usize>,
    },
    /// Run the experiment grid.
    Run,
    /// Fit one classifier on a holdout training part and score the test part.
    Fit {
        #[arg(long)]
        family: Family,
        /// Test fraction of the holdout split.
        #[arg(long, default_value_t = 0.3)]
        ratio: f64,
    },
    /// Ranked impurity importance of saved tree models.
    Importance {
        #[arg(required = true)]
        models: Vec<PathBuf>,
    },
    /// Rebuild the summary tables from a results.jsonl.
    Report {
        /// Defaults to <out>/results.jsonl.
        #[arg(long)]
        results: Option<PathBuf>,
    },
}

fn resolve(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Command::Generate { records: Some(n) } = cli.command {
        config.data.synthetic.n_records = n;
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: Cli) -> anyhow::Result<ExitCode> {
    let config = resolve(&cli)?;
    match cli.command {
        Command::Generate { .. } => {
            commands::generate(&config)?;
        }
        Command::Run => {
            let summary = commands::run(&config)?;
            println!(
                "{} cells, {} errored; results in {}",
                summary.rows.len(),
                summary.errors,
                summary.out.display()
            );
            if summary.errors > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Fit { family, ratio } => {
            let (_, accuracy) = commands::fit_one(&config, family, ratio)?;
            println!("{family}: test accuracy {accuracy:.4}");
        }
        Command::Importance { models } => {
            for (label, imp) in commands::importance(&config, &models)? {
                let top = commands::ranking(&imp)[0];
                let names = commands::feature_names(imp.len());
                println!("{label}: top feature {} ({:.4})", names[top], imp[top]);
            }
        }
        Command::Report { results } => {
            let path = results.unwrap_or_else(|| config.out.join("results.jsonl"));
            let n = commands::report(&config, &path)?;
            println!("tables rebuilt from {n} rows");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
