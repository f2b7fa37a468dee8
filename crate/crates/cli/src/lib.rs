//! The `fsindex` command line.
//!
//! [`run`] parses arguments, applies the optional config file and
//! dispatches to a subcommand, writing to the given streams, so the binary
//! and the integration tests share one entry point.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub mod cmd;
pub mod corpus;
pub mod error;
pub mod options;

pub use error::{CliError, Result};
pub use options::{Cli, Command, RunConfig};

/// Runs one command line and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if help {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return 1;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let config = RunConfig::resolve(cli)?;
    let seed = config.seed;
    match &config.command {
        Command::Build(o) => cmd::build::run(o, out),
        Command::Search(o) => cmd::search::run(o, seed, out),
        Command::Bench(o) => cmd::bench::run(o, seed, out),
        Command::Iterate(o) => cmd::iterate::run(o, out, err),
        Command::Distexp(o) => cmd::distexp::run(o, seed, out),
        Command::Audit(o) => cmd::audit::run(o, out),
    }
}
