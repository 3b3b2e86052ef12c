mod args;
mod commands;
mod input;
mod output;
mod suites;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use output::{emit, Outcome};

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("ROE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("ROE_LAB_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("ROE_LAB_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<Outcome, String> {
    configure_threads()?;
    match cli.command {
        Command::Cohomology(c) => commands::cohomology(&c),
        Command::RipsShadow(c) => commands::rips_shadow(&c),
        Command::Pair { common, at, rounds } => commands::pair(&common, at, rounds),
        Command::Verify { suite, common } => {
            let ctx = suites::Context { seed: common.seed, backends: common.backend.backends() };
            let checks = suites::run(suite, &ctx)?;
            let mut outcome = Outcome::Pass;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.summary);
                outcome = outcome.max(match (c.passed, c.stabilized) {
                    (false, _) => Outcome::Fail,
                    (true, false) => Outcome::Unstable,
                    (true, true) => Outcome::Pass,
                });
            }
            if let Some(path) = common.out.as_deref() {
                let report = json!({ "seed": common.seed, "checks": checks });
                let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
                emit(Some(path), format!("{text}\n").as_bytes())?;
            }
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => ExitCode::from(o.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
