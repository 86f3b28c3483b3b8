//! File formats, built-in scenarios and the batch runner behind the
//! `mmconc` command line tool.

pub mod builtins;
pub mod commands;
pub mod error;
pub mod schema;
pub mod table;

use std::fs;
use std::path::Path;

use serde::Serialize;

use commands::{Command, Outcome, RunOptions};
use error::{exit, AppError};

/// Parameters and results of one run, written as `manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub builtin: Option<&'a str>,
    pub options: RunOptions,
    pub config: &'a Command,
    pub tables: Vec<String>,
    pub documents: Vec<String>,
    pub errors: &'a [String],
    pub assertion_failures: &'a [String],
}

/// Reads a config file for the given subcommand.
pub fn load_config(subcommand: &str, path: &Path) -> Result<Command, AppError> {
    let text = fs::read_to_string(path)?;
    let source = path.display().to_string();
    Ok(match subcommand {
        "mmdist" => Command::Mmdist(schema::parse(&text, &source)?),
        "obsdiam" => Command::Obsdiam(schema::parse(&text, &source)?),
        "levy-scan" => Command::LevyScan(schema::parse(&text, &source)?),
        "invariance-defect" => Command::InvarianceDefect(schema::parse(&text, &source)?),
        "flow-check" => Command::FlowCheck(schema::parse(&text, &source)?),
        "concentrate" => Command::Concentrate(schema::parse(&text, &source)?),
        "generate" => Command::Generate(schema::parse(&text, &source)?),
        other => {
            return Err(AppError::invalid(
                "command",
                format!("unknown subcommand `{other}`"),
            ))
        }
    })
}

/// Writes every table, document and the manifest into `out_dir`.
pub fn write_outcome(
    out_dir: &Path,
    command: &Command,
    builtin: Option<&str>,
    opts: &RunOptions,
    outcome: &Outcome,
) -> Result<(), AppError> {
    fs::create_dir_all(out_dir)?;
    for table in &outcome.tables {
        table.write_to(fs::File::create(out_dir.join(table.file_name()))?)?;
    }
    for (name, doc) in &outcome.documents {
        fs::write(
            out_dir.join(name),
            serde_json::to_string_pretty(doc)? + "\n",
        )?;
    }
    let manifest = Manifest {
        tool: "mmconc",
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        builtin,
        options: *opts,
        config: command,
        tables: outcome.tables.iter().map(|t| t.file_name()).collect(),
        documents: outcome.documents.iter().map(|d| d.0.clone()).collect(),
        errors: &outcome.errors,
        assertion_failures: &outcome.assertion_failures,
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

/// 2 when a checked property failed, 3 when some rows failed, else 0.
pub fn exit_code(outcome: &Outcome) -> i32 {
    if !outcome.assertion_failures.is_empty() {
        exit::ASSERTION
    } else if !outcome.errors.is_empty() {
        exit::PARTIAL
    } else {
        exit::SUCCESS
    }
}
