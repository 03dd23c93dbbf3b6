use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use perc_range::harness::{run_with_workers, ExperimentSpec, RECIPES};

#[derive(Parser)]
#[command(name = "perc-range", version, about = "Run a percolation random-walk experiment recipe")]
struct Cli {
    /// One of the shipped recipes.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(RECIPES))]
    recipe: String,
    /// Flat TOML parameter file.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for CSV/JSON artifacts and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let text = fs::read_to_string(&cli.config).with_context(|| format!("reading {}", cli.config.display()))?;
    let spec = ExperimentSpec::from_toml(&text)?;
    let output = run_with_workers(&cli.recipe, &spec, cli.workers)?;
    let report = &output.report;
    for a in &report.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!(
        "{}: {}/{} assertions passed in {:.1}s",
        report.recipe,
        report.assertions.iter().filter(|a| a.passed).count(),
        report.assertions.len(),
        report.wall_clock_seconds
    );
    if let Some(dir) = &cli.out {
        output.write_to(dir).with_context(|| format!("writing to {}", dir.display()))?;
        println!("artifacts written to {}", dir.display());
    }
    Ok(report.passed())
}
