//! `spinlab`: scan runner for collective-spin interferometry.
//!
//! Exit status: 0 on success, 2 for configuration or parameter errors, 3
//! when a verification run finds a violation, 1 for I/O failures.

mod config;
mod runners;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use config::Config;
use runners::{Outcome, RunError};
use table::Format;

const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Exact collective-spin interferometry scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment and Fisher sensitivities against twisting strength, noiseless.
    SensitivityVsChit(CommonArgs),
    /// Moment and Fisher sensitivities against detection noise.
    SensitivityVsSigma(CommonArgs),
    /// Phase-maximized classical Fisher information against detection noise.
    MaxcfiVsSigma(CommonArgs),
    /// Cat-state outcome histograms with and without an echo.
    Histograms(CommonArgs),
    /// Best split of a fixed total twisting budget.
    #[command(name = "fixed-T", alias = "fixed-t")]
    FixedT(CommonArgs),
    /// Randomized check that parity measurements saturate the quantum bound.
    VerifyTheorem(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` (default) or `json`.
    #[arg(long)]
    format: Option<String>,
    /// Seed for randomized runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "SPINLAB_THREADS")]
    threads: Option<usize>,
    /// Record the wall time in the metadata (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SensitivityVsChit(_) => "sensitivity-vs-chit",
            Command::SensitivityVsSigma(_) => "sensitivity-vs-sigma",
            Command::MaxcfiVsSigma(_) => "maxcfi-vs-sigma",
            Command::Histograms(_) => "histograms",
            Command::FixedT(_) => "fixed-T",
            Command::VerifyTheorem(_) => "verify-theorem",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::SensitivityVsChit(a)
            | Command::SensitivityVsSigma(a)
            | Command::MaxcfiVsSigma(a)
            | Command::Histograms(a)
            | Command::FixedT(a)
            | Command::VerifyTheorem(a) => a,
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("spinlab: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, format!("cannot read {}: {e}", args.config.display())),
    };
    let cfg = match Config::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", args.config.display())),
    };
    let format = match args.format.clone().map(Ok).unwrap_or_else(|| cfg.string_or("output.format", "csv")) {
        Ok(f) => match f.parse::<Format>() {
            Ok(f) => f,
            Err(e) => return fail(EXIT_CONFIG, e),
        },
        Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", args.config.display())),
    };
    let out = match cfg.string_or("output.path", "") {
        Ok(p) => args.out.clone().or_else(|| (!p.is_empty()).then(|| PathBuf::from(p))),
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(threads) = args.threads {
        if threads == 0 {
            return fail(EXIT_CONFIG, "--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return fail(1, format!("cannot start worker pool: {e}"));
        }
    }

    let start = Instant::now();
    let result = match &cli.command {
        Command::SensitivityVsChit(_) => runners::sensitivity_vs_chit(&cfg),
        Command::SensitivityVsSigma(_) => runners::sensitivity_vs_sigma(&cfg),
        Command::MaxcfiVsSigma(_) => runners::maxcfi_vs_sigma(&cfg),
        Command::Histograms(_) => runners::histograms(&cfg),
        Command::FixedT(_) => runners::fixed_t(&cfg),
        Command::VerifyTheorem(_) => runners::verify(&cfg, args.seed),
    };
    let Outcome { mut table, failure } = match result {
        Ok(o) => o,
        Err(e @ RunError::Config(_)) => return fail(EXIT_CONFIG, format!("{}: {e}", args.config.display())),
        Err(e) => return fail(EXIT_CONFIG, e),
    };

    table.meta("tool", "spinlab");
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("subcommand", cli.command.name());
    table.meta("config", Value::Object(cfg.values().into_iter().map(|(k, v)| (k, Value::String(v))).collect()));
    if !matches!(cli.command, Command::VerifyTheorem(_)) && !cfg.values().contains_key("system.n") {
        table.meta("assumptions", vec!["system.n not set; using N = 100"]);
    }
    if args.timing {
        table.meta("wall_time_s", start.elapsed().as_secs_f64());
    }

    let rendered = table.render(format);
    match &out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                return fail(1, format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{rendered}"),
    }
    match failure {
        Some(msg) => fail(EXIT_VERIFY, msg),
        None => ExitCode::SUCCESS,
    }
}
