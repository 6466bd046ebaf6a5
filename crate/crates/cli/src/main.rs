//! `qbm`: tables and grids for a two-packet superposition in a linear heat bath.
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical failure,
//! 4 criterion run without a crossing before `tmax` (the table is still written).

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, Output};
use config::{Format, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_NO_CROSSING: u8 = 4;

#[derive(Parser)]
#[command(name = "qbm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat JSON config; any flag given on the command line wins.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// G, Gdot, s, sdot, <xdot^2> and the thermal wavelength against time.
    Kinetics,
    /// Interference visibility a(t) and attenuation exponent A(t).
    Coherence,
    /// Separability criterion C(t) and its first zero.
    Criterion,
    /// Four-dimensional Wigner grid, or a 2D slice with --slice.
    Wigner,
    /// Coordinate probability on a (q1, q2) grid.
    Probability,
}

fn run(cli: Cli) -> Result<(Output, RunConfig), Failure> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let merged = cli.flags.over(base);
    let cfg = merged.resolve()?;
    let out = match cli.command {
        Command::Kinetics => commands::kinetics(&cfg),
        Command::Coherence => commands::coherence(&cfg),
        Command::Criterion => commands::criterion(&cfg),
        Command::Wigner => commands::wigner(&cfg),
        Command::Probability => commands::probability(&cfg),
    }?;
    Ok((out, merged))
}

fn emit(out: &Output, merged: &RunConfig) -> io::Result<()> {
    let cfg = merged.resolve().expect("resolved once already");
    let format = merged.format.unwrap_or(Format::Csv);
    let mut sink: Box<dyn Write> = match &merged.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    out.table.write(&cfg, format, &mut sink)?;
    sink.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, merged)) => {
            if let Err(e) = emit(&out, &merged) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
            if out.no_crossing {
                eprintln!("no crossing before tmax");
                ExitCode::from(EXIT_NO_CROSSING)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
