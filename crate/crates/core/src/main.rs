use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = concentrate::cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    if !outcome.output.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(outcome.output.as_bytes());
        let _ = stdout.flush();
    }
    if let Some(err) = &outcome.error {
        eprintln!("error: {}", err.trim_end());
    }
    ExitCode::from(outcome.code as u8)
}
