//! `lax-shortcuts`: runs one scenario from a JSON config and writes CSV/JSON
//! artifacts plus a manifest.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or the run errored,
//! 2 the config is unreadable or invalid (diagnostics as JSON on stderr).

mod artifacts;
mod config;
mod report;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::{Diagnostic, Format};
use report::Profile;

const THREADS_ENV: &str = "LAX_SHORTCUTS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "lax-shortcuts", version, about = "Counterdiabatic driving scenarios and certification")]
struct Cli {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs` in the config (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact formats; overrides `formats` in the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// `strict` tightens every residual bound by a factor of ten.
    #[arg(long, value_enum, default_value = "default")]
    tolerance_profile: Profile,
    /// Validate the config, print diagnostics and exit.
    #[arg(long)]
    validate_only: bool,
}

fn fail_validation(diags: &[Diagnostic]) -> ExitCode {
    eprintln!("{}", json!({ "status": "invalid", "diagnostics": diags }));
    ExitCode::from(2)
}

fn thread_cap() -> Result<Option<usize>, Diagnostic> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Diagnostic {
                path: format!("env:{THREADS_ENV}"),
                kind: "schema",
                message: format!("expected a positive integer, got `{v}`"),
            }),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::load(&cli.config) {
        Ok(c) => c,
        Err(diags) => return fail_validation(&diags),
    };
    let threads = match thread_cap() {
        Ok(t) => t,
        Err(d) => return fail_validation(&[d]),
    };
    if cli.validate_only {
        println!("{}", json!({ "status": "valid", "diagnostics": [] }));
        return ExitCode::SUCCESS;
    }
    if let Some(n) = threads {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let format = cli.format.unwrap_or_else(|| cfg.format());
    let out = cli.out.clone().or_else(|| cfg.outputs.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let outcome = match scenarios::run(&cfg, cli.tolerance_profile) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", json!({ "status": "error", "scenario": cfg.scenario.name(), "message": e.to_string() }));
            return ExitCode::from(1);
        }
    };
    for c in &outcome.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}.{}: {} (bound {})", c.suite, c.name, report::sci(c.value), report::sci(c.bound));
    }
    match artifacts::write_all(&out, &cfg, cli.tolerance_profile, format, &outcome) {
        Ok(files) => println!("wrote {} files to {}", files.len(), out.display()),
        Err(e) => {
            eprintln!("{}", json!({ "status": "error", "message": format!("writing artifacts: {e}") }));
            return ExitCode::from(1);
        }
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
