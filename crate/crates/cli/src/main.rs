use std::process::ExitCode;

use clap::Parser;
use sqg_cli::commands::{dispatch, Cli};
use sqg_cli::report;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            if cli.json {
                print!("{}", report::to_string(&out.report));
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(if out.failed { 1 } else { 0 })
        }
        Err(e) => {
            if cli.json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
