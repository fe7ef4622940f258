use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = goursat::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
