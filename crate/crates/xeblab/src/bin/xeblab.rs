use std::process::ExitCode;

fn main() -> ExitCode {
    xeblab::cli::main_with_args(std::env::args_os())
}
