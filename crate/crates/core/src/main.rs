use std::process::ExitCode;

fn main() -> ExitCode {
    apgaps::cli::main_with_args(std::env::args_os())
}
