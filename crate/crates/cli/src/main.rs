use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(monopole_spectra::run(std::env::args_os()))
}
