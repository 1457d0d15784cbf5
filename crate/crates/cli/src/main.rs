//! `fakb`: extraction, consistency checking, strengths and fuzzy queries
//! over argumentative knowledge bases.
//!
//! Exit status is 0 on success, 1 when the input is well-formed but fails
//! semantically (inconsistent, or strengths do not converge) and 2 for usage
//! and I/O errors.

mod commands;
mod config;
mod graph;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::EngineConfig;

#[derive(Debug, Parser)]
#[command(name = "fakb", version, about = "Fuzzy argumentative knowledge bases")]
struct Cli {
    #[command(flatten)]
    config: EngineConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the source and updated FABoxes from a mock extraction fixture.
    Extract {
        fixture: PathBuf,
        /// Directory for `source.*` and `updated.*`.
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check a FABox, and with a TBox the whole knowledge base.
    Check { fabox: PathBuf, tbox: Option<PathBuf> },
    /// Initial and final strength of every argument.
    Strengths { fabox: PathBuf },
    /// Answer a fuzzy query, e.g. 'Arg(?x) > 0.75'.
    Query {
        fabox: PathBuf,
        tbox: PathBuf,
        query: String,
    },
    /// Print the rewriting of a query under a TBox.
    Rewrite { tbox: PathBuf, query: String },
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    cli.config.validate()?;
    let cfg = &cli.config;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match &cli.command {
        Command::Extract { fixture, out_dir } => commands::extract(cfg, &mut out, fixture, out_dir)?,
        Command::Check { fabox, tbox } => commands::check(cfg, &mut out, fabox, tbox.as_deref())?,
        Command::Strengths { fabox } => commands::strengths(cfg, &mut out, fabox)?,
        Command::Query { fabox, tbox, query } => commands::query(cfg, &mut out, fabox, tbox, query)?,
        Command::Rewrite { tbox, query } => commands::rewrite(cfg, &mut out, tbox, query)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
