use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(touchbench::cli::run() as u8)
}
