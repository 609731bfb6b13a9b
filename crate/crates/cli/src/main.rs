use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use wvagw_cli::{commands, RunManifest};

fn main() -> ExitCode {
    let manifest = match RunManifest::try_parse() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&manifest) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.to_exit_code()
        }
    }
}
