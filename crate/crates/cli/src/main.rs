//! `treeca` command-line front end.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::{run, write_file, CliError};

fn report(err: &CliError) -> ExitCode {
    if let CliError::FixtureMismatch(rows) = err {
        for row in rows {
            eprintln!("{row}");
        }
    }
    let line = serde_json::json!({ "error": err.code(), "message": err.to_string() });
    eprintln!("{line}");
    ExitCode::from(err.exit_code())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let output = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| run(cli))?,
        None => run(cli)?,
    };
    for note in &output.notes {
        eprintln!("{note}");
    }
    match &cli.out {
        Some(path) => write_file(path, &output.body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            return report(&CliError::Usage(
                first.trim_start_matches("error: ").to_string(),
            ));
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
