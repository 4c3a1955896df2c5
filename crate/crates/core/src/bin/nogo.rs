use std::io::Write;
use std::process::ExitCode;

use spin_nogo::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::from_args(std::env::args_os()) {
        Ok(config) => config,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if config.output.is_none() {
                let mut stdout = std::io::stdout().lock();
                if stdout
                    .write_all(&outcome.bytes)
                    .and_then(|_| stdout.flush())
                    .is_err()
                {
                    return ExitCode::from(3);
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(err) => {
            eprintln!("nogo: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
