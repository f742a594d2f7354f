use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fixsolve::cli::Cli;

fn main() -> ExitCode {
    let out = Cli::parse().run();
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
