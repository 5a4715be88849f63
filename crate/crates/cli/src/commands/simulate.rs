use std::collections::HashSet;
use std::path::{Path, PathBuf};

use asibeam::design::ArrayConfig;
use asibeam::netsim::{attach_and_run, DeploymentConfig, NamedBeam};
use asibeam::synthesis::normalize_power;
use clap::Args;
use serde::Deserialize;

use crate::args::Global;
use crate::error::{config, Result};
use crate::output::{fixed6, read_input, sha256_hex, InputDigest, OutDir};
use crate::svg::{line_plot, Series};
use crate::weights_csv;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Deployment and array configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Beam weight file as `PATH` or `NAME=PATH`. Repeat for more beams.
    #[arg(long = "beam", required = true)]
    pub beams: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub deployment: DeploymentConfig,
    pub array: ArrayConfig,
}

fn split_beam(beam_arg: &str) -> (String, &Path) {
    match beam_arg.split_once('=') {
        Some((name, path)) if !name.is_empty() => (name.to_string(), Path::new(path)),
        _ => {
            let path = Path::new(beam_arg);
            let stem = path
                .file_stem()
                .map_or_else(|| beam_arg.to_string(), |s| s.to_string_lossy().into_owned());
            (stem, path)
        }
    }
}

pub fn run(global: &Global, args: &SimulateArgs) -> Result<()> {
    let bytes = read_input(&args.config)?;
    let mut cfg: SimulationConfig = serde_json::from_slice(&bytes).map_err(config)?;
    if let Some(seed) = global.seed {
        cfg.deployment.seed = seed;
    }
    let g = cfg.array.geometry().map_err(config)?;

    let mut names = HashSet::new();
    let mut beams = Vec::new();
    let mut inputs = Vec::new();
    for beam_arg in &args.beams {
        let (name, path) = split_beam(beam_arg);
        if !names.insert(name.clone()) {
            return Err(config(format!("duplicate beam name {name:?}")));
        }
        let raw = read_input(path)?;
        let w = weights_csv::from_csv(&raw).map_err(|e| config(format!("{}: {e}", path.display())))?;
        if w.shape() != g.shape() {
            return Err(config(format!(
                "{}: weights are {:?}, array is {:?}",
                path.display(),
                w.shape(),
                g.shape()
            )));
        }
        inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&raw),
        });
        beams.push(NamedBeam {
            name,
            weights: normalize_power(&w, cfg.deployment.bs_power_dbm),
            geometry: g,
            element: cfg.array.element,
        });
    }

    let sim = attach_and_run(&cfg.deployment, &cfg.array.element, &beams).map_err(config)?;

    let mut results = String::from("beam_name,ue_id,cell_id,rx_dbm\n");
    let mut cdf = String::from("beam_name,percentile,rx_dbm\n");
    let mut series = Vec::new();
    for b in &sim.beams {
        for s in &b.samples {
            results.push_str(&format!(
                "{},{},{},{}\n",
                b.name,
                s.ue_id,
                s.cell_id,
                fixed6(s.rx_power_dbm)
            ));
        }
        let mut points = Vec::new();
        for p in 0..=100 {
            let v = b.cdf.percentile(p as f64).expect("non-empty CDF");
            cdf.push_str(&format!("{},{p},{}\n", b.name, fixed6(v)));
            points.push((v, p as f64 / 100.0));
        }
        series.push(Series {
            name: b.name.clone(),
            points,
        });
    }

    let median = |i: usize| sim.beams[i].cdf.median().expect("non-empty CDF");
    for (i, b) in sim.beams.iter().enumerate() {
        println!("{}: {} UEs, median {:.3} dBm", b.name, b.cdf.len(), median(i));
    }
    for i in 1..sim.beams.len() {
        println!(
            "median gap {} - {}: {:.3} dB",
            sim.beams[i].name,
            sim.beams[0].name,
            median(i) - median(0)
        );
    }

    let mut out = OutDir::create(&global.out_dir)?;
    out.write("results.csv", results.as_bytes())?;
    out.write("cdf.csv", cdf.as_bytes())?;
    out.write(
        "cdf.svg",
        line_plot(
            "received power CDF",
            "received power (dBm)",
            "CDF",
            &series,
            Some((0.0, 1.0)),
        )
        .as_bytes(),
    )?;
    out.finish("simulate", Some(cfg.deployment.seed), &bytes, inputs)
}
