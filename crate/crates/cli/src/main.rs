//! `surfnoise`: config-driven front end of the surface-noise toolbox.

mod commands;
mod config;
mod error;
mod output;
mod units;
mod validity;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::Command;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "surfnoise", version, about = "Surface-induced decoherence, noise and heating rates")]
struct Cli {
    command: Command,
    /// Scenario document (JSON) or a run manifest.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; defaults to SURFNOISE_THREADS, then the CPU count.
    #[arg(long)]
    threads: Option<usize>,
}

fn threads(cli: &Cli) -> Result<Option<usize>, CliError> {
    if cli.threads.is_some() {
        return Ok(cli.threads);
    }
    match std::env::var("SURFNOISE_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::config(format!("SURFNOISE_THREADS='{v}' is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn execute(cli: &Cli) -> Result<serde_json::Value, CliError> {
    if let Some(n) = threads(cli)? {
        if n == 0 {
            return Err(CliError::config("thread count must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let text = fs::read_to_string(&cli.config).map_err(|e| CliError::config(format!("{}: {e}", cli.config.display())))?;
    let mut cfg = config::parse(&text)?;
    let scenario = cfg.resolve()?;
    log::info!("running {} with {:?}", cli.command.name(), scenario.kernel.method());

    let out = commands::run(cli.command, &scenario)?;
    let report = validity::check_validity(
        &scenario.geometry,
        scenario.motion.height(),
        scenario.motion.frequency(),
        out.relaxation_rate,
        &scenario.compute.thresholds,
    );
    for note in &report.notes {
        log::warn!("{note}");
    }
    out.write(&cli.out)?;
    let manifest = output::manifest(cli.command.name(), &cfg, &report, &out);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(cli.out.join("manifest.json"), text + "\n")?;
    Ok(json!({
        "command": cli.command.name(),
        "outputs": out.file_names(),
        "results": out.results,
        "validity": report,
    }))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
