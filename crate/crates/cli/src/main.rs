use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(riskgate_cli::commands::main())
}
