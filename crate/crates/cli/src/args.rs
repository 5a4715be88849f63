use std::path::PathBuf;

use asibeam::{ElementPattern, UraGeometry};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::{config, Result};

pub struct Global {
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub grid_deg: f64,
}

impl Global {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_deg > 0.0 && self.grid_deg <= 90.0) {
            return Err(config(format!("--grid-deg must lie in (0, 90], got {}", self.grid_deg)));
        }
        Ok(())
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GeometryArgs {
    /// Horizontal element spacing in wavelengths.
    #[arg(long, default_value_t = 0.5)]
    pub dy: f64,
    /// Vertical element spacing in wavelengths.
    #[arg(long, default_value_t = 0.6)]
    pub dz: f64,
    /// Multiplier of π·d_z in the vertical phase.
    #[arg(long, default_value_t = asibeam::geometry::DEFAULT_Z_PHASE_FACTOR)]
    pub z_factor: f64,
}

impl GeometryArgs {
    pub fn ura(&self, m_rows: usize, n_cols: usize) -> Result<UraGeometry> {
        UraGeometry::new(m_rows, n_cols, self.dy, self.dz)
            .and_then(|g| g.with_z_phase_factor(self.z_factor))
            .map_err(config)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementChoice {
    Isotropic,
    Gaussian,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ElementArgs {
    #[arg(long, value_enum, default_value_t = ElementChoice::Isotropic)]
    pub element: ElementChoice,
    /// Gaussian element azimuth HPBW in degrees.
    #[arg(long, default_value_t = 90.0)]
    pub hpbw_az: f64,
    /// Gaussian element elevation HPBW in degrees.
    #[arg(long, default_value_t = 90.0)]
    pub hpbw_el: f64,
}

impl ElementArgs {
    pub fn pattern(&self) -> Result<ElementPattern> {
        match self.element {
            ElementChoice::Isotropic => Ok(ElementPattern::isotropic()),
            ElementChoice::Gaussian => ElementPattern::gaussian(self.hpbw_az, self.hpbw_el).map_err(config),
        }
    }
}
