use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use hka_credit_cli::{run, threads_from_env, Cli, CliError};

fn fail(err: &CliError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return fail(&CliError::config("args", first));
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    match threads_from_env() {
        Ok(Some(n)) => pool = pool.num_threads(n),
        Ok(None) => {}
        Err(e) => return fail(&e),
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => return fail(&CliError::config("HKA_THREADS", e.to_string())),
    };

    let stdout = io::stdout();
    match pool.install(|| run(&cli, &mut stdout.lock())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
