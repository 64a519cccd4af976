use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use d6lab_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = run(cli, &mut stdout);
    let _ = stdout.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("d6lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
