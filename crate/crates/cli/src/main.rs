mod args;
mod cache;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use commands::{Failure, Outcome};

const EXIT_INVALID: u8 = 1;
const EXIT_FALSIFIED: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("MCGCALC_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.global.threads {
        mcgcalc_core::exec::configure_threads(t);
    }
    let start = Instant::now();
    let outcome = commands::run(&cli.command, &cli.global);
    let timing = cli.global.timing.then(|| start.elapsed().as_millis());
    match outcome {
        Ok(out) => {
            let code = if out.passed { 0 } else { EXIT_FALSIFIED };
            emit(&cli, &out, timing, None);
            if !out.passed {
                eprintln!("mcgcalc: {}: computed value differs from the expected one", out.command);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Invalid(m) | Failure::Other(m) => (EXIT_INVALID, m),
                Failure::Falsified(m) => (EXIT_FALSIFIED, m),
                Failure::Resource(m) => (EXIT_RESOURCE, m),
            };
            eprintln!("mcgcalc: {msg}");
            let out = Outcome {
                command: output::command_name(&cli.command),
                params: serde_json::Value::Null,
                result: serde_json::Value::Null,
                provenance: serde_json::Value::Null,
                passed: false,
                cache_hits: 0,
            };
            emit(&cli, &out, timing, Some(&msg));
            ExitCode::from(code)
        }
    }
}

fn emit(cli: &Cli, out: &Outcome, timing: Option<u128>, error: Option<&str>) {
    let text = match cli.global.format {
        args::Format::Json => output::json(out, timing, error).map_err(|e| e.to_string()),
        args::Format::Csv => output::csv(out).map_err(|e| e.to_string()),
    };
    match text {
        Ok(t) => print!("{t}"),
        Err(e) => eprintln!("mcgcalc: cannot format report: {e}"),
    }
}
