use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, report) = sigmaterm_cli::run(std::env::args_os());
    // a closed pipe is not worth a panic
    let _ = if code >= sigmaterm_cli::USAGE {
        writeln!(std::io::stderr(), "{report}")
    } else {
        writeln!(std::io::stdout(), "{report}")
    };
    ExitCode::from(code as u8)
}
