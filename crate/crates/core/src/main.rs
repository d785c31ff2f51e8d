use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ncrational::cli::{self, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.command.input().jobs;
    if jobs > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match cli::run(&cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", cli::error_json(&e));
            ExitCode::from(1)
        }
    }
}
