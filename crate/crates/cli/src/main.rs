//! Command-line front end for the ASI beamforming library.

mod args;
mod commands;
mod error;
mod output;
mod svg;
mod weights_csv;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::args::Global;
use crate::commands::{expand, pattern, simulate, synthesize};

#[derive(Parser)]
#[command(name = "asibeam", version, about = "Array structure inheritance beamforming tools")]
struct Cli {
    /// Overrides the seed of the optimizer or the deployment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving all outputs.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Angular sampling step in degrees.
    #[arg(long, global = true, default_value_t = 1.0)]
    grid_deg: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a protoarray by repeated companion attachment.
    Expand(expand::ExpandArgs),
    /// Evaluate per-polarization and total power patterns.
    Pattern(pattern::PatternArgs),
    /// Design a broad beam from a JSON configuration.
    Synthesize(synthesize::SynthesizeArgs),
    /// Compare beams in a multi-cell deployment.
    Simulate(simulate::SimulateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global {
        seed: cli.seed,
        out_dir: cli.out_dir,
        grid_deg: cli.grid_deg,
    };
    let result = global.validate().and_then(|()| match &cli.command {
        Command::Expand(a) => expand::run(&global, a),
        Command::Pattern(a) => pattern::run(&global, a),
        Command::Synthesize(a) => synthesize::run(&global, a),
        Command::Simulate(a) => simulate::run(&global, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
