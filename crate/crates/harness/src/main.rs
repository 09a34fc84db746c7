use clap::Parser;
use dirikern::{emit_reports, parse_config, run, Command, HarnessError, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical checks for composition operators on Dirichlet-type spaces.
///
/// Exit codes: 0 all verdicts positive, 2 negative mathematical verdict,
/// 3 numerical failure, 4 configuration error.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's "output")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra refinement levels on top of the configured settings
    #[arg(long, default_value_t = 0)]
    refine: u32,
    /// Seed for random interior sampling
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, HarnessError> {
    let text =
        std::fs::read_to_string(&cli.config).map_err(|e| HarnessError::io(&cli.config, e))?;
    let config = parse_config(&text, Some(cli.command))?;
    let output = run(
        &config,
        RunOptions {
            refine: cli.refine,
            seed: cli.seed,
        },
    )?;
    for r in &output.rows {
        let value = r.value.map_or("-".to_string(), |v| format!("{v:.10e}"));
        println!(
            "{:<28} {:<22} {:>18}  {}",
            r.input, r.quantity, value, r.verdict
        );
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("dirikern-out"));
    let paths = emit_reports(
        &output.mirror(&config),
        &output.plots,
        &dir,
        &config.experiment,
    )?;
    println!("wrote {}", paths.csv.display());
    Ok(output.exit_code)
}
