//! Command-line front end for the worst-case quadrature library.
//!
//! Exit codes: 0 on success, 2 on usage errors, 3 on numerical failures
//! (quadrature or search budgets).

mod cmds;
mod out;

use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "oscirad",
    about = "Worst-case optimal quadrature for oscillatory and general weights on [0,1]",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: cmds::Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cmds::run(cli.command) {
        Ok(rendered) => {
            if let Some((path, contents)) = rendered.file {
                if let Err(e) = std::fs::write(&path, contents) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(rendered.stdout.as_bytes()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
