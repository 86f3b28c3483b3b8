use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmconc::builtins::{builtin, BUILTINS};
use mmconc::commands::{Command, MetricChoice, MmdistConfig, RunOptions};
use mmconc::error::{exit, AppError};
use mmconc::schema::{parse, MeasureSpec, SpaceSpec};
use mmconc::{exit_code, load_config, write_outcome};

/// Metric measure space quantities on finite spaces and group actions.
#[derive(Parser)]
#[command(name = "mmconc", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Directory for CSV tables and the manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also compute exact or independent reference values where feasible.
    #[arg(long, global = true)]
    oracle: bool,
    /// Fill the runtime_ms columns.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "builtin")]
    config: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args)]
struct MmdistArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, requires_all = ["mu", "nu"], conflicts_with_all = ["config", "builtin"])]
    space: Option<PathBuf>,
    #[arg(long)]
    mu: Option<PathBuf>,
    #[arg(long)]
    nu: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    metric: MetricArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MetricArg {
    Mt,
    Prokhorov,
    Both,
}

#[derive(Subcommand)]
enum Sub {
    /// Mass transportation and Prokhorov distances between two measures.
    Mmdist(MmdistArgs),
    /// Observable-diameter bounds for a list of mm-spaces.
    Obsdiam(Source),
    /// Observable diameters along a sequence with a decay fit.
    LevyScan(Source),
    /// Translation defects of measures on finite groups.
    InvarianceDefect(Source),
    /// Average displacement against observable diameters on group actions.
    FlowCheck(Source),
    /// Concentration criterion for user-supplied maps to a target space.
    Concentrate(Source),
    /// Expands generated objects into explicit JSON.
    Generate(Source),
    /// Lists the built-in scenarios.
    Builtins,
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &PathBuf) -> Result<T, AppError> {
    parse(&std::fs::read_to_string(path)?, &path.display().to_string())
}

fn resolve(name: &'static str, source: &Source) -> Result<Command, AppError> {
    let command = match (&source.config, &source.builtin) {
        (Some(path), _) => load_config(name, path)?,
        (None, Some(b)) => builtin(b)?,
        (None, None) => {
            return Err(AppError::invalid(
                "arguments",
                "either --config or --builtin is required",
            ))
        }
    };
    if command.name() != name {
        return Err(AppError::invalid(
            "builtin",
            format!("scenario is for `{}`, not `{name}`", command.name()),
        ));
    }
    Ok(command)
}

fn command_of(sub: &Sub) -> Result<Command, AppError> {
    match sub {
        Sub::Mmdist(a) => match &a.space {
            Some(space) => {
                let (mu, nu) = (
                    a.mu.as_ref().expect("required by clap"),
                    a.nu.as_ref().expect("required by clap"),
                );
                Ok(Command::Mmdist(MmdistConfig {
                    space: read_json::<SpaceSpec>(space)?,
                    mu: read_json::<MeasureSpec>(mu)?,
                    nu: read_json::<MeasureSpec>(nu)?,
                    metric: match a.metric {
                        MetricArg::Mt => MetricChoice::Mt,
                        MetricArg::Prokhorov => MetricChoice::Prokhorov,
                        MetricArg::Both => MetricChoice::Both,
                    },
                }))
            }
            None => resolve("mmdist", &a.source),
        },
        Sub::Obsdiam(s) => resolve("obsdiam", s),
        Sub::LevyScan(s) => resolve("levy-scan", s),
        Sub::InvarianceDefect(s) => resolve("invariance-defect", s),
        Sub::FlowCheck(s) => resolve("flow-check", s),
        Sub::Concentrate(s) => resolve("concentrate", s),
        Sub::Generate(s) => resolve("generate", s),
        Sub::Builtins => unreachable!("handled before dispatch"),
    }
}

fn builtin_name(sub: &Sub) -> Option<&str> {
    match sub {
        Sub::Mmdist(a) => a.source.builtin.as_deref(),
        Sub::Obsdiam(s)
        | Sub::LevyScan(s)
        | Sub::InvarianceDefect(s)
        | Sub::FlowCheck(s)
        | Sub::Concentrate(s)
        | Sub::Generate(s) => s.builtin.as_deref(),
        Sub::Builtins => None,
    }
}

fn run(cli: &Cli) -> Result<i32, AppError> {
    if let Sub::Builtins = cli.command {
        for name in BUILTINS {
            println!("{name}\t{}", builtin(name)?.name());
        }
        return Ok(exit::SUCCESS);
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| AppError::invalid("threads", e))?;
    }
    let command = command_of(&cli.command)?;
    let opts = RunOptions {
        seed: cli.seed,
        oracle: cli.oracle,
        timing: cli.timing,
    };
    let outcome = command.run(&opts)?;
    write_outcome(
        &cli.out,
        &command,
        builtin_name(&cli.command),
        &opts,
        &outcome,
    )?;
    for e in &outcome.errors {
        eprintln!("row failed: {e}");
    }
    for a in &outcome.assertion_failures {
        eprintln!("assertion failed: {a}");
    }
    Ok(exit_code(&outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}
