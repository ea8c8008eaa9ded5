//! Command-line entry point. Flags override an optional config file, every
//! run writes `manifest.json` and `run.ini` next to its outputs, and the exit
//! code is 0 on pass, 1 on a failed check or runtime error, 2 on usage errors.

mod args;
mod config;
mod data;
mod jobs;
mod settings;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

pub use args::{Cli, Command};
pub use config::ConfigFile;
pub use data::{multiscale, Equation, InitialKind};
pub use settings::Settings;

use crate::error::{Error, Result};
use crate::imethod::ConstantsTable;
use crate::output::to_json;
use jobs::{Context, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Run manifest written into every output directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub seed: u64,
    pub threads: usize,
    pub out: String,
    /// Every resolved setting, by `section.key`; `run.ini` holds the same in
    /// config-file form.
    pub config: Value,
    pub constants: ConstantsTable,
    pub pass: bool,
    pub results: Value,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::InvalidArgument(_) | Error::Precondition(_) | Error::Parse { .. } | Error::InvalidGrid(_))
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

/// Runs the parsed command; `Ok(false)` means a check failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    let start = Instant::now();
    let file = match &cli.config {
        Some(path) => ConfigFile::parse(&fs::read_to_string(path)?)?,
        None => ConfigFile::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| file.get("run.out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut flags = cli.command.overrides();
    if let Some(seed) = cli.seed {
        flags.set("run.seed", seed.to_string());
    }
    if let Some(t) = cli.threads {
        flags.set("run.threads", t.to_string());
    }
    let settings = Settings::new(file, flags);
    let seed = settings.value("run.seed", 0u64)?;
    let threads = settings.optional::<usize>("run.threads")?;
    let constants: ConstantsTable = settings.value("imethod.constants", "calibrated".to_string())?.parse()?;
    fs::create_dir_all(&out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut ctx = Context { settings: &settings, out: out.clone(), seed, constants, files: Vec::new() };
    let (outcome, workers) = pool.install(|| -> Result<(Outcome, usize)> {
        let outcome = match &cli.command {
            Command::Simulate(_) => jobs::simulate(&mut ctx),
            Command::Invariants(_) => jobs::invariant_check(&mut ctx),
            Command::DriftSweep(_) => jobs::drift(&mut ctx),
            Command::VerifyIdentity(_) => jobs::verify_identity(&mut ctx),
            Command::VerifyBounds(_) => jobs::verify_bounds(&mut ctx),
            Command::VerifyDmvt(_) => jobs::verify_dmvt(&mut ctx),
            Command::VerifyCancellation(_) => jobs::verify_cancellation(&mut ctx),
            Command::VerifyDerivative(_) => jobs::verify_derivative(&mut ctx),
            Command::Plancherel(_) => jobs::plancherel(&mut ctx),
            Command::PlanGwp(_) => jobs::plan(&mut ctx),
            Command::RescaleCheck(_) => jobs::rescale_check(&mut ctx),
            Command::Ledger(_) => jobs::ledger(&mut ctx),
        }?;
        Ok((outcome, rayon::current_num_threads()))
    })?;
    let resolved = settings.resolved();
    fs::write(out.join("run.ini"), resolved.render())?;
    let mut outputs = ctx.files;
    outputs.push("run.ini".into());
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        seed,
        threads: workers,
        out: out.display().to_string(),
        config: jobs::config_json(&settings),
        constants,
        pass: outcome.pass,
        results: outcome.results,
        outputs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    fs::write(out.join("manifest.json"), to_json(&manifest)?)?;
    if let Some(text) = outcome.stdout {
        print!("{text}");
    }
    Ok(outcome.pass)
}
