use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use sensilab_cli::config::OUTPUT_DIR_ENV;
use sensilab_cli::run::render_checks;
use sensilab_cli::{exit_code_for, load_config, run, ConfigSources, EXIT_NUMERICAL, EXIT_OK};

/// Spectral laboratory for sensitive singular perturbations.
#[derive(Debug, Parser)]
#[command(name = "sensilab", version)]
struct Cli {
    /// One of: sl-check, strip-solve, strip-sweep, layer-verify,
    /// annulus-solve, annulus-sweep, hadamard, cosh-demo.
    subcommand: String,

    /// Flat TOML file of key = value settings.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one setting; the value is read as TOML, else as a string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory; takes precedence over every other source.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn execute(cli: Cli) -> Result<u8> {
    let sources = ConfigSources {
        file: cli.config,
        overrides: cli.set,
        output_dir: cli.output_dir,
        env_output_dir: std::env::var(OUTPUT_DIR_ENV).ok(),
    };
    let config = load_config(&cli.subcommand, &sources)?;
    let report = run(&config)?;
    print!("{}", render_checks(&report));
    println!(
        "wrote {} file(s) to {}",
        report.files.len(),
        config.output_dir.display()
    );
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
