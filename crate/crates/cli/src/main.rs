mod config;
mod jobs;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::{Cli, JobConfig, THREADS_ENV};
use jobs::{Artifact, JobError};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_VALIDATION) } else { ExitCode::SUCCESS };
        }
    };
    let threads = std::env::var(THREADS_ENV).ok();
    let config = match JobConfig::new(cli.command, threads.as_deref()) {
        Ok(config) => config,
        Err(e) => {
            let args: Vec<String> = std::env::args().collect();
            let body = json!({"error": {"kind": e.kind(), "message": e.to_string(), "exit_code": EXIT_VALIDATION}, "args": args});
            eprintln!("{}", serde_json::to_string_pretty(&body).expect("json value serializes"));
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match jobs::run(&config) {
        Ok(artifact) => match emit(&config, artifact) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => report("IoError", &e.to_string(), EXIT_VALIDATION, &config),
        },
        Err(JobError::Library(e)) => {
            let code = match e {
                _ if e.is_validation() => EXIT_VALIDATION,
                hardy_core::Error::Io(_) | hardy_core::Error::Json(_) => EXIT_VALIDATION,
                _ => EXIT_NUMERICAL,
            };
            report(e.kind(), &e.to_string(), code, &config)
        }
        Err(JobError::Check(failed)) => {
            let _ = emit(&config, Artifact::Json(failed.report));
            report(failed.kind, &failed.message, EXIT_NUMERICAL, &config)
        }
    }
}

fn emit(config: &JobConfig, artifact: Artifact) -> std::io::Result<()> {
    let text = match artifact {
        Artifact::Csv(s) => s,
        Artifact::Json(v) => serde_json::to_string_pretty(&v).expect("json value serializes") + "\n",
    };
    match &config.common().output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// JSON error report on stderr.
fn report(kind: &str, message: &str, code: u8, config: &JobConfig) -> ExitCode {
    let body = json!({"error": {"kind": kind, "message": message, "exit_code": code}, "config": config});
    eprintln!("{}", serde_json::to_string_pretty(&body).expect("json value serializes"));
    ExitCode::from(code)
}
