//! Command-line frontend: marker scans, power curves, simulations and model
//! summaries on top of `allele-assoc`.

pub mod args;
pub mod commands;
pub mod counts;
pub mod error;
pub mod scan;

use args::{Cli, Command};
use error::CliResult;
use std::io::Write;

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Model(a) => commands::model(a, out),
        Command::Scan(a) => commands::scan(a, out, err),
        Command::Power(a) => commands::power(a, out),
        Command::Simulate(a) => commands::simulate(a, out),
    }
}
