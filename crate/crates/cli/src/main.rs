use std::process::ExitCode;

fn main() -> ExitCode {
    wavl1_cli::run(std::env::args_os())
}
