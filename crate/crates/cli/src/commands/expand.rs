use asibeam::asi::{expand_ura, ExpansionOrder};
use asibeam::patterns::{array_factor_total, sphere_grid, to_db};
use asibeam::DualPolWeights;
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::args::{GeometryArgs, Global};
use crate::error::{config, Result};
use crate::output::{to_json, OutDir};
use crate::weights_csv;

const MAX_DOUBLINGS: u32 = 12;

#[derive(Args, Debug, Serialize)]
pub struct ExpandArgs {
    /// `single`, a builtin fixture name, or a weight CSV file.
    #[arg(long, default_value = "single")]
    pub proto: String,
    /// Horizontal doublings.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Vertical doublings.
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, value_enum, default_value_t = Order::RowsFirst)]
    pub order: Order,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value = "expanded.csv")]
    pub output: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    RowsFirst,
    ColumnsFirst,
}

impl From<Order> for ExpansionOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::RowsFirst => ExpansionOrder::RowsFirst,
            Order::ColumnsFirst => ExpansionOrder::ColumnsFirst,
        }
    }
}

pub fn run(global: &Global, args: &ExpandArgs) -> Result<()> {
    if args.k + args.l > MAX_DOUBLINGS {
        return Err(config(format!("at most {MAX_DOUBLINGS} doublings in total")));
    }
    let (proto, input) = weights_csv::load(&args.proto)?;
    let (m, n) = proto.shape();
    let expanded = expand_ura(&proto, args.k, args.l, args.order.into()).weights;
    let (me, ne) = expanded.shape();

    let grid = sphere_grid(global.grid_deg).map_err(config)?;
    let af_proto = array_factor_total(&proto, &args.geometry.ura(m, n)?, &grid).map_err(config)?;
    let af = array_factor_total(&expanded, &args.geometry.ura(me, ne)?, &grid).map_err(config)?;
    let gain = (me * ne) as f64 / (m * n) as f64;
    let peak = af.iter().copied().fold(0.0, f64::max);
    let scaling_dev = af
        .iter()
        .zip(&af_proto)
        .map(|(e, p)| (e - gain * p).abs() / peak)
        .fold(0.0, f64::max);
    let min = af.iter().copied().fold(f64::INFINITY, f64::min);
    let ripple = to_db(peak) - to_db(min);
    let moduli: Vec<f64> = expanded.stacked().iter().map(|x| x.norm()).collect();
    let (lo, hi) = moduli
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));

    println!("expanded {m}x{n} -> {me}x{ne} (k={}, l={})", args.k, args.l);
    println!("pattern scaling deviation: {scaling_dev:.3e}");
    println!("total power ripple: {ripple:.6} dB over {} directions", grid.len());
    println!(
        "modulus: min {lo:.12}, max {hi:.12}, constant {}",
        expanded.is_constant_modulus(1e-12)
    );

    let mut out = OutDir::create(&global.out_dir)?;
    out.write(&args.output, &weights_csv::to_csv(&expanded)?)?;
    out.finish("expand", global.seed, &to_json(args)?, input.into_iter().collect())
}
