use allele_assoc_cli::args::Cli;
use clap::Parser;
use std::io::{self, BufWriter};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors; everything else is a usage error
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = BufWriter::new(io::stdout().lock());
    match allele_assoc_cli::run(cli, &mut out, &mut io::stderr()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            drop(out);
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
