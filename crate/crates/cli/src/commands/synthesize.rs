use std::path::PathBuf;

use asibeam::design::{synthesize, ArrayConfig, BeamMode, InitialGuess};
use asibeam::patterns::{beam_shape, BeamShape};
use asibeam::synthesis::{ObjectiveReport, OptimizerConfig, SynthesisTarget};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::args::Global;
use crate::error::{config, Result};
use crate::output::{read_input, to_json, OutDir};
use crate::weights_csv;

#[derive(Args, Debug)]
pub struct SynthesizeArgs {
    /// Synthesis configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfig {
    pub mode: BeamMode,
    pub array: ArrayConfig,
    pub target: SynthesisTarget,
    pub optimizer: OptimizerConfig,
    pub initial: InitialGuess,
    pub outputs: SynthesisOutputs,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisOutputs {
    pub weights: String,
    pub report: String,
}

#[derive(Debug, Serialize)]
struct SynthesisReport<'a> {
    mode: BeamMode,
    initial: InitialGuess,
    seed: u64,
    taper_loss_db: f64,
    elevation: ObjectiveReport,
    azimuth: ObjectiveReport,
    /// Measured main beam; absent when a cut has no half-power crossing.
    shape: Option<BeamShape>,
    provenance: &'a [String],
}

pub fn run(global: &Global, args: &SynthesizeArgs) -> Result<()> {
    let bytes = read_input(&args.config)?;
    let mut cfg: SynthesisConfig = serde_json::from_slice(&bytes).map_err(config)?;
    if let Some(seed) = global.seed {
        cfg.optimizer.seed = seed;
    }
    let s = synthesize(cfg.mode, &cfg.array, &cfg.target, &cfg.optimizer, cfg.initial).map_err(config)?;
    let g = cfg.array.geometry().map_err(config)?;
    let shape = beam_shape(&s.weights, &g, &cfg.array.element, global.grid_deg / 10.0).ok();
    let report = SynthesisReport {
        mode: s.mode,
        initial: cfg.initial,
        seed: cfg.optimizer.seed,
        taper_loss_db: s.taper_loss_db,
        elevation: s.elevation,
        azimuth: s.azimuth,
        shape,
        provenance: &s.provenance,
    };

    println!("taper loss {:.6} dB", s.taper_loss_db);
    println!(
        "pattern variance: elevation {:.6} dB², azimuth {:.6} dB²",
        s.elevation.pattern_variance_db2, s.azimuth.pattern_variance_db2
    );
    if let Some(b) = shape {
        println!(
            "HPBW azimuth {:.3}°, elevation {:.3}°, peak elevation {:.3}°",
            b.hpbw_az_deg, b.hpbw_el_deg, b.peak_elevation_deg
        );
    }

    let mut out = OutDir::create(&global.out_dir)?;
    out.write(&cfg.outputs.weights, &weights_csv::to_csv(&s.weights)?)?;
    out.write(&cfg.outputs.report, &to_json(&report)?)?;
    out.finish("synthesize", Some(cfg.optimizer.seed), &bytes, Vec::new())
}
