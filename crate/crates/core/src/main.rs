use std::process::ExitCode;

fn main() -> ExitCode {
    poincare_lab::cli::run_cli()
}
