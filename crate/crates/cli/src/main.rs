use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use hyperfill::{config::ExperimentConfig, experiments, oracle};
use hyperfill_core::filling::{build_filling, FillingParams};
use hyperfill_core::space::build_nets;
use hyperfill_core::{fixtures, io};

#[derive(Parser)]
#[command(name = "hyperfill", about = "Hardy constants on hyperbolic fillings of finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config and write report.json,
    /// cells.csv, and slopes.csv into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a filling and print (or write) its JSON export.
    InspectFilling {
        /// space file (.json or .csv); mutually exclusive with --fixture
        #[arg(long)]
        space: Option<PathBuf>,
        /// named fixture, e.g. fixb or grid1d:32
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run brute-force cross-checks on a small instance file.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    hyperfill::init_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading config {}", config.display()))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let output = experiments::run_to_dir(&cfg, &out)?;
            println!(
                "wrote {} cells to {} (experiment {})",
                output.report.cells.len(),
                out.display(),
                output.report.experiment
            );
        }
        Command::InspectFilling { space, fixture, beta, depth, out } => {
            let space = match (space, fixture) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading space {}", path.display()))?;
                    if path.extension().is_some_and(|e| e == "csv") {
                        io::space_from_csv(&text)?
                    } else {
                        io::space_from_json(&text)?
                    }
                }
                (None, Some(name)) => fixtures::by_name(&name)?,
                _ => anyhow::bail!("pass exactly one of --space or --fixture"),
            };
            let nets = build_nets(&space, fixtures::alpha(), depth)?;
            let filling = build_filling(&space, &nets, FillingParams::standard(beta, depth))?;
            let json = serde_json::to_string_pretty(&filling.export())?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
        }
        Command::Oracle { instance } => {
            let text = std::fs::read_to_string(&instance)
                .with_context(|| format!("reading instance {}", instance.display()))?;
            let spec: oracle::OracleSpec = serde_json::from_str(&text)?;
            let lines = oracle::run_oracle(&spec)?;
            let mut all_pass = true;
            for line in &lines {
                println!(
                    "[{}] p = {}: solver {:.10e} vs oracle {:.10e} (gap {:.2e})",
                    if line.pass { "PASS" } else { "FAIL" },
                    line.p,
                    line.solver,
                    line.oracle,
                    line.relative_gap
                );
                all_pass &= line.pass;
            }
            if !all_pass {
                anyhow::bail!("oracle cross-check failed");
            }
        }
    }
    Ok(())
}
