mod args;
mod check;
mod data;
mod error;
mod gen;
mod learn;
mod solve;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Gen(a) => gen::run(a, cli.seed),
        Command::Bound(a) => solve::bound(a),
        Command::Solve(a) => solve::solve(a, cli),
        Command::Train(a) => learn::run_train(a, cli),
        Command::Eval(a) => learn::run_eval(a, cli),
        Command::Verify(a) => check::run_verify(a, cli.seed),
        Command::Export(a) => check::run_export(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
