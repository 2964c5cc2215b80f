//! Command-line front end for the capacity laboratory.
//!
//! Exit codes separate operational failures from mathematical findings:
//! 0 means the run completed and every tested property held, 2 means the
//! run completed but a property failed (a violated inequality, a broken
//! nesting chain), and 1 means the run itself could not be carried out.

mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use serde_json::json;
use thiserror::Error;

use config::{Cli, KvFile, ResolvedCommand};
use report::{write_report, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Geometry(#[from] rieszcap::GeometryError),
    #[error(transparent)]
    Solver(#[from] rieszcap::SolverError),
    #[error(transparent)]
    Extension(#[from] rieszcap::extension::ExtensionError),
    #[error(transparent)]
    Analysis(#[from] rieszcap::analysis::AnalysisError),
}

/// Parse, run, and report; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut file = match &cli.globals.config {
        Some(path) => KvFile::parse(path)?,
        None => KvFile::empty(),
    };
    let globals = config::resolve_globals(&cli.globals, &mut file)?;
    let resolved = config::resolve_command(&cli.command, &mut file)?;
    file.finish(&config::accepted_keys(&cli.command))?;

    let config_json = json!({ "globals": globals, "params": resolved });
    if cli.globals.print_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&config_json)
                .map_err(|e| CliError::Config(format!("config serialization failed: {e}")))?
        );
        return Ok(0);
    }

    let (results, code) = match &resolved {
        ResolvedCommand::Capacity(cfg) => commands::cmd_capacity(&globals, cfg)?,
        ResolvedCommand::Convergence(cfg) => commands::cmd_convergence(&globals, cfg)?,
        ResolvedCommand::Bm(cfg) => commands::cmd_bm(&globals, cfg)?,
        ResolvedCommand::Concavity(cfg) => commands::cmd_concavity(&globals, cfg)?,
        ResolvedCommand::Levelsets(cfg) => commands::cmd_levelsets(&globals, cfg)?,
        ResolvedCommand::Extension(cfg) => commands::cmd_extension(&globals, cfg)?,
    };

    let report = Report::new(
        cli.command.name(),
        globals.seed,
        globals.directions,
        config_json,
        !globals.no_timestamp,
        results,
    );
    let path = write_report(&globals.out, &report)?;
    println!("report: {}", path.display());
    Ok(code)
}
