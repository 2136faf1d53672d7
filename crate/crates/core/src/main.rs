use std::process::ExitCode;

fn main() -> ExitCode {
    alpha_watchdog::cli::main()
}
