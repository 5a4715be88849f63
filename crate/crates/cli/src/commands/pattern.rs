use asibeam::geometry::Direction;
use asibeam::patterns::{azimuth_cut_grid, elevation_cut_grid, sphere_grid, to_db, total_pattern, PatternResult};
use asibeam::{DualPolWeightsMat, ElementPattern, UraGeometry};
use clap::Args;
use serde::Serialize;

use crate::args::{ElementArgs, GeometryArgs, Global};
use crate::error::{config, Result};
use crate::output::{fixed6, to_json, OutDir};
use crate::svg::{hemisphere_heatmap, line_plot, polar_plot, Series};
use crate::weights_csv;

const PLOT_RANGE_DB: f64 = 40.0;
const HEATMAP_PIXELS: usize = 91;

#[derive(Args, Debug, Serialize)]
pub struct PatternArgs {
    /// Builtin fixture name or weight CSV file.
    #[arg(long)]
    pub weights: String,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub element: ElementArgs,
    #[arg(long, default_value = "pattern.csv")]
    pub output: String,
    /// Also write cut plots and a front-hemisphere heat map.
    #[arg(long)]
    pub svg: bool,
}

pub fn run(global: &Global, args: &PatternArgs) -> Result<()> {
    let (w, input) = weights_csv::load(&args.weights)?;
    let (m, n) = w.shape();
    let g = args.geometry.ura(m, n)?;
    let p = args.element.pattern()?;
    let grid = sphere_grid(global.grid_deg).map_err(config)?;
    let res = total_pattern(&w, &g, &p, &grid).map_err(config)?;

    let mut csv = String::from("theta_deg,phi_deg,pow_a_db,pow_b_db,pow_total_db\n");
    for (((d, a), b), t) in res
        .grid
        .iter()
        .zip(&res.field_a)
        .zip(&res.field_b)
        .zip(&res.total_power)
    {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fixed6(d.zenith().to_degrees()),
            fixed6(d.azimuth().to_degrees()),
            fixed6(to_db(a.norm_sqr())),
            fixed6(to_db(b.norm_sqr())),
            fixed6(to_db(*t)),
        ));
    }
    let peak = res.total_power.iter().copied().fold(0.0, f64::max);
    println!(
        "{m}x{n} array, {} directions, peak total power {:.6} dB",
        res.len(),
        to_db(peak)
    );

    let mut out = OutDir::create(&global.out_dir)?;
    out.write(&args.output, csv.as_bytes())?;
    if args.svg {
        write_plots(&mut out, &w, &g, &p, global.grid_deg)?;
    }
    out.finish("pattern", global.seed, &to_json(args)?, input.into_iter().collect())
}

fn cut_series(res: &PatternResult, angle: impl Fn(&Direction) -> f64) -> Vec<Series> {
    let pick = |name: &str, pow: &dyn Fn(usize) -> f64| Series {
        name: name.into(),
        points: res
            .grid
            .iter()
            .enumerate()
            .map(|(i, d)| (angle(d), to_db(pow(i))))
            .collect(),
    };
    vec![
        pick("polarization A", &|i| res.field_a[i].norm_sqr()),
        pick("polarization B", &|i| res.field_b[i].norm_sqr()),
        pick("total", &|i| res.total_power[i]),
    ]
}

fn write_plots(out: &mut OutDir, w: &DualPolWeightsMat, g: &UraGeometry, p: &ElementPattern, step: f64) -> Result<()> {
    let az = total_pattern(w, g, p, &azimuth_cut_grid(step, 90.0).map_err(config)?).map_err(config)?;
    let el = total_pattern(w, g, p, &elevation_cut_grid(step, 0.0).map_err(config)?).map_err(config)?;
    let cuts = [
        (
            "azimuth",
            "azimuth (deg)",
            cut_series(&az, |d| d.azimuth().to_degrees()),
        ),
        (
            "elevation",
            "elevation (deg)",
            cut_series(&el, |d| d.elevation().to_degrees()),
        ),
    ];
    for (name, label, series) in &cuts {
        let top = series
            .iter()
            .flat_map(|s| s.points.iter().map(|q| q.1))
            .fold(f64::NEG_INFINITY, f64::max)
            .ceil();
        let range = (top - PLOT_RANGE_DB, top + 1.0);
        let title = format!("{name} cut");
        out.write(
            &format!("{name}_cut.svg"),
            line_plot(&title, label, "power (dB)", series, Some(range)).as_bytes(),
        )?;
        out.write(
            &format!("{name}_cut_polar.svg"),
            polar_plot(&title, series, range.0, range.1).as_bytes(),
        )?;
    }

    let k = HEATMAP_PIXELS;
    let coord = |i: usize| -1.0 + (i as f64 + 0.5) * 2.0 / k as f64;
    let mut dirs = Vec::new();
    let mut index = vec![vec![None; k]; k];
    for (i, row) in index.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let (u, v) = (coord(j), -coord(i));
            let r2 = u * u + v * v;
            if r2 <= 1.0 {
                let x = (1.0 - r2).sqrt();
                *slot = Some(dirs.len());
                dirs.push(Direction::new(u.atan2(x), v.clamp(-1.0, 1.0).acos()));
            }
        }
    }
    let hemi = total_pattern(w, g, p, &dirs).map_err(config)?;
    let raster: Vec<Vec<f64>> = index
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| s.map_or(f64::NAN, |i| to_db(hemi.total_power[i])))
                .collect()
        })
        .collect();
    let top = raster
        .iter()
        .flatten()
        .copied()
        .filter(|x| !x.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    out.write(
        "hemisphere.svg",
        hemisphere_heatmap("total power, front hemisphere (dB)", &raster, top - PLOT_RANGE_DB, top).as_bytes(),
    )?;
    Ok(())
}
