use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cauchy_coeffs::cli::main_with_args(std::env::args_os()))
}
