//! Command-line front end: argument parsing, subcommands, figure presets and
//! data-file output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::io::IsTerminal;

use clap::{ColorChoice, CommandFactory, FromArgMatches};

use crate::cli::Cli;
use crate::error::CliError;

fn no_color() -> bool {
    std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty())
}

fn configure(cmd: clap::Command, color: ColorChoice) -> clap::Command {
    cmd.args_override_self(true)
        .allow_negative_numbers(true)
        .color(color)
        .mut_subcommands(move |c| configure(c, color))
}

fn report(e: &CliError) {
    let prefix = if !no_color() && std::io::stderr().is_terminal() { "\x1b[31merror:\x1b[0m" } else { "error:" };
    eprintln!("{prefix} {e}");
}

/// Runs the tool on `argv` (program name first) and returns the exit code:
/// 0 success, 1 argument or validation error, 2 numerical failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            report(&e);
            return e.exit_code();
        }
    };
    let color = if no_color() { ColorChoice::Never } else { ColorChoice::Auto };
    let matches = match configure(Cli::command(), color).try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            report(&e);
            e.exit_code()
        }
    }
}
