//! `ifsm`: batch front-end for the filter-bank / IFS measure library.
//!
//! One command per process; deterministic output files (fixed ordering,
//! shortest round-trip float formatting, seeded randomness); diagnostics on
//! standard error only.
//!
//! Exit codes: 0 success, 1 malformed input, 2 validation failure,
//! 3 enumeration cap overflow.

use clap::error::ErrorKind;
use clap::Parser;
use ifs_measures_cli::commands::dispatch;
use ifs_measures_cli::config::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("ifsm: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
