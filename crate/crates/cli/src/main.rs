//! `gsfluct` command-line driver.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 when a numerical
//! tolerance is not met.

mod commands;
mod output;
mod params;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};

use params::{build_cli, command_spec, settings, Format};

/// Directory for output files when `--output` is not given.
const OUTPUT_DIR_ENV: &str = "GSFLUCT_OUTPUT_DIR";

enum Failure {
    Invalid(anyhow::Error),
    Tolerance(String),
}

fn classify(e: anyhow::Error) -> Failure {
    match e.downcast_ref::<gsfluct::Error>() {
        Some(gsfluct::Error::Tolerance { .. } | gsfluct::Error::NoConvergence { .. }) => {
            Failure::Tolerance(format!("{e:#}"))
        }
        _ => Failure::Invalid(e),
    }
}

fn main() -> ExitCode {
    let matches = match build_cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Tolerance(msg)) => {
            eprintln!("tolerance failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(matches: &clap::ArgMatches) -> std::result::Result<(), Failure> {
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let spec = command_spec(name).expect("every subcommand has a spec");
    let s = settings(spec, sub).map_err(Failure::Invalid)?;
    let format = s.format().map_err(Failure::Invalid)?;
    let outcome = commands::run(name, &s).map_err(classify)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let text = match format {
        Format::Csv => outcome.table.to_csv(),
        Format::Json => output::json_report(s.to_json(spec).map_err(Failure::Invalid)?, &outcome.table),
    };
    let target = s.output().or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{name}.{}", format.extension())))
    });
    emit(target, &text).map_err(Failure::Invalid)?;
    if !outcome.failed.is_empty() {
        return Err(Failure::Tolerance(format!(
            "failed checks: {}",
            outcome.failed.join(", ")
        )));
    }
    Ok(())
}

fn emit(target: Option<PathBuf>, text: &str) -> Result<()> {
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
