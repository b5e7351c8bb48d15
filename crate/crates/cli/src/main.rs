mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Settings that identify a run, without the output location.
fn canonical(command: &Command) -> String {
    let mut c = command.clone();
    match &mut c {
        Command::Lif(a) => a.output.out_dir.clear(),
        Command::Lisa(a) => a.output.out_dir.clear(),
        Command::Simulate(a) => a.output.out_dir.clear(),
        Command::Surface(a) => a.out_dir.clear(),
    }
    format!("{c:?}")
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let key = canonical(&cli.command);
    match &cli.command {
        Command::Lif(a) => commands::lif(a, &key),
        Command::Lisa(a) => commands::lisa(a, &key),
        Command::Simulate(a) => commands::simulate(a, &key),
        Command::Surface(a) => commands::surface(a, &key),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<spatial_influence::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
