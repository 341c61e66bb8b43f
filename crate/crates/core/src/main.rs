use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use latvoa::cli::{execute, render, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = execute(&cli);
    let mut out = std::io::stdout().lock();
    if out.write_all(render(&cli, &report).as_bytes()).is_err() {
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}
