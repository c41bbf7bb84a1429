use std::process::ExitCode;

use clap::Parser;
use gesto_cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with 2 on usage errors on its own.
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gesto: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
