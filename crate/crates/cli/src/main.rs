use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use linfty_core::seqspec::parse_seq;

mod config;
mod report;
mod run;

use config::RunConfig;
use report::Report;

/// Certified embeddings of separable Banach spaces into l-infinity that avoid c.
#[derive(Parser, Debug)]
#[command(name = "linfty", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report path (default: linfty-<command>.json).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the witness and classification budgets.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isometry defects, oscillation witnesses and verdicts for T(x).
    Embed,
    /// Extracts a scheme for D and certifies the placed embedding against D + c.
    Extend,
    /// Classifies sequences against c.
    Classify {
        /// Extra sequence spec, e.g. `periodic:-1,1`; repeatable.
        #[arg(long = "seq")]
        seqs: Vec<String>,
    },
    /// Runs embed, extend and classify together.
    Suite,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Embed => "embed",
            Command::Extend => "extend",
            Command::Classify { .. } => "classify",
            Command::Suite => "suite",
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(b) = cli.budget {
        config.witness_budget = b;
        config.classify_budget = b;
    }
    let base_dir = cli.config.as_ref().and_then(|p| p.parent()).map(|p| p.to_path_buf());
    let out = cli
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("linfty-{}.json", cli.command.name())));
    let prepared = config.prepare(base_dir.as_deref())?;
    let mut report = Report::new(cli.command.name(), prepared.config.clone(), prepared.space.label());
    match &cli.command {
        Command::Embed => run::embed(&prepared, &mut report)?,
        Command::Extend => run::extend(&prepared, &mut report)?,
        Command::Classify { seqs } => {
            let env: BTreeMap<_, _> = prepared.sequences.iter().cloned().collect();
            let extra = seqs
                .iter()
                .map(|s| parse_seq(s, &env).map(|seq| (s.clone(), seq)))
                .collect::<linfty_core::Result<Vec<_>>>()
                .context("--seq")?;
            run::classify(&prepared, &extra, &mut report)?
        }
        Command::Suite => run::suite(&prepared, &mut report)?,
    }
    report.finish();
    report.timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| format!("unix:{}", d.as_secs()))
        .unwrap_or_default();
    std::fs::write(&out, report.to_json()? + "\n").with_context(|| format!("writing {}", out.display()))?;
    print!("{}", report.table());
    println!("report: {}", out.display());
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
