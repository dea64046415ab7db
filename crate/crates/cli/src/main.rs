mod args;
mod commands;
mod error;
mod inputs;
mod output;
mod plot;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sample(a) => commands::cmd_sample(a),
        Command::Eval(a) => commands::cmd_eval(a),
        Command::Series(a) => commands::cmd_series(a),
        Command::Classify(a) => commands::cmd_classify(a),
        Command::Scan(a) => commands::cmd_scan(a),
        Command::Ef(a) => commands::cmd_ef(a),
        Command::Amalgam(a) => commands::cmd_amalgam(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))
            .and_then(|pool| pool.install(|| run(&cli))),
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
