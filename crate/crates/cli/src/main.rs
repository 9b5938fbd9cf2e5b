use std::process::ExitCode;

mod commands;

fn main() -> ExitCode {
    ExitCode::from(commands::run(std::env::args_os()))
}
