//! Multi-cell received-power simulation.
//!
//! Three-sector sites on a hexagonal grid, UEs dropped uniformly outside
//! the cell holes, UMa pathloss with lognormal shadowing, and a small ray
//! cloud per UE for angular spread. Every random draw belongs to the UE and
//! happens before any beam is evaluated, so competing beams see identical
//! channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::NetsimError;
use crate::geometry::{Direction, UraGeometry};
use crate::patterns::{to_db, EirpModel, ElementPattern, NormalizedWeights};
use crate::weights::DualPolWeightsMat;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentConfig {
    pub isd_m: f64,
    pub n_sites: usize,
    pub cell_hole_m: f64,
    pub bs_height_m: f64,
    pub building_height_m: f64,
    pub ue_outdoor_height_m: f64,
    pub indoor_fraction: f64,
    pub indoor_penetration_db: f64,
    pub shadowing_sigma_db: f64,
    /// Per-UE angular spread σ, drawn uniformly from this range.
    pub angular_spread_deg: UniformRange,
    pub rays_per_ue: usize,
    pub freq_ghz: f64,
    pub bs_power_dbm: f64,
    pub ue_ant_gain_dbi: f64,
    pub ues_per_cell: usize,
    pub seed: u64,
    /// Restrict statistics to UEs served by the centre site.
    pub center_site_only: bool,
    /// Cap on the number of drops; drops keep their ids, so capped runs are
    /// a prefix of uncapped ones.
    #[serde(default)]
    pub max_ues: Option<usize>,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        Self {
            isd_m: 500.0,
            n_sites: 9,
            cell_hole_m: 25.0,
            bs_height_m: 25.0,
            building_height_m: 20.0,
            ue_outdoor_height_m: 1.5,
            indoor_fraction: 0.8,
            indoor_penetration_db: 20.0,
            shadowing_sigma_db: 6.0,
            angular_spread_deg: UniformRange { min: 2.0, max: 5.0 },
            rays_per_ue: 8,
            freq_ghz: 3.5,
            bs_power_dbm: 46.0,
            ue_ant_gain_dbi: 0.0,
            ues_per_cell: 100,
            seed: 1,
            center_site_only: false,
            max_ues: None,
        }
    }
}

impl DeploymentConfig {
    pub fn validate(&self) -> Result<(), NetsimError> {
        let bad = |what: &str| Err(NetsimError::InvalidConfig(what.into()));
        let positive = [
            ("isd_m", self.isd_m),
            ("bs_height_m", self.bs_height_m),
            ("building_height_m", self.building_height_m),
            ("ue_outdoor_height_m", self.ue_outdoor_height_m),
            ("freq_ghz", self.freq_ghz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        let non_negative = [
            ("cell_hole_m", self.cell_hole_m),
            ("indoor_penetration_db", self.indoor_penetration_db),
            ("shadowing_sigma_db", self.shadowing_sigma_db),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be non-negative"));
            }
        }
        if !self.bs_power_dbm.is_finite() || !self.ue_ant_gain_dbi.is_finite() {
            return bad("powers and gains must be finite");
        }
        if self.n_sites == 0 || self.ues_per_cell == 0 || self.rays_per_ue == 0 || self.max_ues == Some(0) {
            return bad("n_sites, ues_per_cell, rays_per_ue and max_ues must be positive");
        }
        if !(0.0..=1.0).contains(&self.indoor_fraction) {
            return bad("indoor_fraction must lie in [0, 1]");
        }
        let s = self.angular_spread_deg;
        if !(s.min.is_finite() && s.max.is_finite() && 0.0 <= s.min && s.min <= s.max) {
            return bad("angular_spread_deg needs 0 <= min <= max");
        }
        if self.cell_hole_m >= self.isd_m / 2.0 {
            return bad("cell hole must be smaller than half the inter-site distance");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub site: usize,
    /// Sector boresight azimuth in the global frame, radians.
    pub boresight_rad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub sites: Vec<Site>,
    pub cells: Vec<Cell>,
    /// Site nearest the layout centroid.
    pub center_site: usize,
}

pub const SECTOR_BORESIGHTS_DEG: [f64; 3] = [30.0, 150.0, 270.0];

/// Sites on a triangular lattice, rows of `ceil(√n)` with every other row
/// shifted by half the inter-site distance; three sectors per site.
pub fn generate_layout(cfg: &DeploymentConfig) -> Layout {
    let n = cfg.n_sites;
    let per_row = (n as f64).sqrt().ceil() as usize;
    let row_step = cfg.isd_m * 3f64.sqrt() / 2.0;
    let mut sites: Vec<Site> = (0..n)
        .map(|id| {
            let (r, c) = (id / per_row, id % per_row);
            let shift = if r % 2 == 1 { cfg.isd_m / 2.0 } else { 0.0 };
            Site {
                id,
                x: c as f64 * cfg.isd_m + shift,
                y: r as f64 * row_step,
            }
        })
        .collect();
    let cx = sites.iter().map(|s| s.x).sum::<f64>() / n as f64;
    let cy = sites.iter().map(|s| s.y).sum::<f64>() / n as f64;
    for s in &mut sites {
        s.x -= cx;
        s.y -= cy;
    }
    let center_site = sites
        .iter()
        .min_by(|a, b| a.x.hypot(a.y).total_cmp(&b.x.hypot(b.y)))
        .map(|s| s.id)
        .expect("at least one site");
    let cells = sites
        .iter()
        .flat_map(|s| {
            SECTOR_BORESIGHTS_DEG.iter().enumerate().map(move |(k, b)| Cell {
                id: 3 * s.id + k,
                site: s.id,
                boresight_rad: b.to_radians(),
            })
        })
        .collect();
    Layout {
        sites,
        cells,
        center_site,
    }
}

/// One UE with every random quantity it will ever need.
#[derive(Debug, Clone, PartialEq)]
pub struct UeDrop {
    pub id: usize,
    pub position: [f64; 3],
    pub indoor: bool,
    pub serving_cell: usize,
    /// Pathloss toward every cell, indexed by cell id.
    pub pathloss_db: Vec<f64>,
    pub shadowing_db: Vec<f64>,
    /// Angular offsets `(Δφ, Δθ)` of the rays, radians.
    pub ray_offsets: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub ue_id: usize,
    pub cell_id: usize,
    pub rx_power_dbm: f64,
}

fn ue_rng(seed: u64, ue: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ue as u64);
    rng
}

/// Uniform point in the hexagonal cell of a lattice site: inradius ISD/2,
/// flat sides facing the six neighbours. Points inside the hole are
/// redrawn.
fn sample_in_hexagon(rng: &mut ChaCha8Rng, isd: f64, hole: f64) -> (f64, f64) {
    let inr = isd / 2.0;
    let circ = isd / 3f64.sqrt();
    let normals = [0f64, 60.0, 120.0].map(|a| (a.to_radians().cos(), a.to_radians().sin()));
    loop {
        let x = rng.random_range(-circ..circ);
        let y = rng.random_range(-circ..circ);
        let inside = normals.iter().all(|(c, s)| (x * c + y * s).abs() <= inr);
        if inside && x.hypot(y) >= hole {
            return (x, y);
        }
    }
}

/// Direction of `ue` seen from the array of `cell`, in the array frame.
pub fn direction_from(cell: &Cell, site: &Site, bs_height: f64, ue: &[f64; 3]) -> Direction {
    let dx = ue[0] - site.x;
    let dy = ue[1] - site.y;
    let dz = ue[2] - bs_height;
    let az = dy.atan2(dx) - cell.boresight_rad;
    let zen = dx.hypot(dy).atan2(dz);
    Direction::new(crate::geometry::wrap_pi(az), zen)
}

/// UMa pathloss (NLOS with the LOS lower bound), plus the penetration term
/// for indoor UEs. UE heights outside the model range are clamped to it.
pub fn pathloss_db(cfg: &DeploymentConfig, bs: [f64; 3], ue: [f64; 3], indoor: bool) -> Result<f64, NetsimError> {
    let d2 = (ue[0] - bs[0]).hypot(ue[1] - bs[1]);
    let d3 = d2.hypot(ue[2] - bs[2]);
    if d3.is_nan() || d3 <= 0.0 {
        return Err(NetsimError::ZeroDistance);
    }
    let fc = cfg.freq_ghz;
    let h_bs = bs[2];
    let h_ut = ue[2].clamp(1.5, 22.5);
    let d_bp = 4.0 * (h_bs - 1.0) * (h_ut - 1.0) * fc * 1e9 / SPEED_OF_LIGHT;
    let pl1 = 28.0 + 22.0 * d3.log10() + 20.0 * fc.log10();
    let los = if d2 <= d_bp {
        pl1
    } else {
        28.0 + 40.0 * d3.log10() + 20.0 * fc.log10() - 9.0 * (d_bp * d_bp + (h_bs - h_ut).powi(2)).log10()
    };
    let nlos = 13.54 + 39.08 * d3.log10() + 20.0 * fc.log10() - 0.6 * (h_ut - 1.5);
    let penetration = if indoor { cfg.indoor_penetration_db } else { 0.0 };
    Ok(los.max(nlos) + penetration)
}

/// Drops `ues_per_cell × cells` UEs and attaches each to the cell with the
/// lowest link loss: pathloss plus shadowing minus the element gain toward
/// the UE. The element gain separates co-sited sectors, which share a
/// pathloss; it does not depend on any beam.
pub fn drop_ues(cfg: &DeploymentConfig, layout: &Layout, element: &ElementPattern) -> Result<Vec<UeDrop>, NetsimError> {
    cfg.validate()?;
    let total = (cfg.ues_per_cell * layout.cells.len()).min(cfg.max_ues.unwrap_or(usize::MAX));
    (0..total)
        .into_par_iter()
        .map(|id| drop_one(cfg, layout, element, id))
        .collect()
}

fn drop_one(
    cfg: &DeploymentConfig,
    layout: &Layout,
    element: &ElementPattern,
    id: usize,
) -> Result<UeDrop, NetsimError> {
    let mut rng = ue_rng(cfg.seed, id);
    let site = &layout.sites[rng.random_range(0..layout.sites.len())];
    let (x, y) = sample_in_hexagon(&mut rng, cfg.isd_m, cfg.cell_hole_m);
    let indoor = rng.random::<f64>() < cfg.indoor_fraction;
    let h = if indoor {
        rng.random_range(0.0..=cfg.building_height_m)
    } else {
        cfg.ue_outdoor_height_m
    };
    let spread = cfg.angular_spread_deg;
    let sigma = if spread.max > spread.min {
        rng.random_range(spread.min..spread.max)
    } else {
        spread.min
    }
    .to_radians();
    let ray_offsets = (0..cfg.rays_per_ue)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            (sigma * a, sigma * b)
        })
        .collect();
    let shadowing_db: Vec<f64> = (0..layout.cells.len())
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            cfg.shadowing_sigma_db * z
        })
        .collect();

    let position = [site.x + x, site.y + y, h];
    let mut pathloss_db = Vec::with_capacity(layout.cells.len());
    for cell in &layout.cells {
        let s = &layout.sites[cell.site];
        pathloss_db.push(pathloss_db_for(cfg, s, &position, indoor)?);
    }
    let serving_cell = layout
        .cells
        .iter()
        .map(|c| {
            let s = &layout.sites[c.site];
            let g = element.gain(&direction_from(c, s, cfg.bs_height_m, &position));
            (c.id, link_loss(pathloss_db[c.id], shadowing_db[c.id], g))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("cells exist");
    Ok(UeDrop {
        id,
        position,
        indoor,
        serving_cell,
        pathloss_db,
        shadowing_db,
        ray_offsets,
    })
}

fn pathloss_db_for(cfg: &DeploymentConfig, s: &Site, ue: &[f64; 3], indoor: bool) -> Result<f64, NetsimError> {
    pathloss_db(cfg, [s.x, s.y, cfg.bs_height_m], *ue, indoor)
}

/// Attachment metric: pathloss + shadowing − element gain (dB).
pub fn link_loss(pathloss_db: f64, shadowing_db: f64, element_gain_lin: f64) -> f64 {
    pathloss_db + shadowing_db - to_db(element_gain_lin)
}

/// A named beam ready for evaluation.
#[derive(Debug, Clone)]
pub struct NamedBeam {
    pub name: String,
    pub weights: NormalizedWeights<DualPolWeightsMat>,
    pub geometry: UraGeometry,
    pub element: ElementPattern,
}

/// Received power at `ue` from `cell`: ray-averaged EIRP, minus pathloss
/// and shadowing, plus UE gain. Both UE branches are counted, so the total
/// power pattern applies.
pub fn received_power(
    model: &EirpModel<'_, DualPolWeightsMat>,
    layout: &Layout,
    cell_id: usize,
    ue: &UeDrop,
    cfg: &DeploymentConfig,
) -> LinkSample {
    let cell = &layout.cells[cell_id];
    let site = &layout.sites[cell.site];
    let d = direction_from(cell, site, cfg.bs_height_m, &ue.position);
    let eirp: f64 = ue
        .ray_offsets
        .iter()
        .map(|(da, dz)| {
            let zen = (d.zenith() + dz).clamp(0.0, std::f64::consts::PI);
            model.eirp_mw(&Direction::new(crate::geometry::wrap_pi(d.azimuth() + da), zen))
        })
        .sum::<f64>()
        / ue.ray_offsets.len() as f64;
    LinkSample {
        ue_id: ue.id,
        cell_id,
        rx_power_dbm: to_db(eirp) - ue.pathloss_db[cell_id] - ue.shadowing_db[cell_id] + cfg.ue_ant_gain_dbi,
    }
}

/// Sorted samples with interpolated percentiles.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSummary {
    sorted: Vec<f64>,
}

impl CdfSummary {
    pub fn from_samples(mut v: Vec<f64>) -> Self {
        v.sort_by(f64::total_cmp);
        Self { sorted: v }
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Linear interpolation at fractional index `p/100 · (n−1)`.
    pub fn percentile(&self, p: f64) -> Option<f64> {
        let n = self.sorted.len();
        if n == 0 || !(0.0..=100.0).contains(&p) {
            return None;
        }
        let x = p / 100.0 * (n - 1) as f64;
        let (i, f) = (x.floor() as usize, x.fract());
        let lo = self.sorted[i];
        Some(if i + 1 < n {
            lo + f * (self.sorted[i + 1] - lo)
        } else {
            lo
        })
    }

    pub fn median(&self) -> Option<f64> {
        self.percentile(50.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamOutcome {
    pub name: String,
    pub samples: Vec<LinkSample>,
    pub cdf: CdfSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub layout: Layout,
    pub ues: Vec<UeDrop>,
    pub beams: Vec<BeamOutcome>,
}

/// Drops UEs once, attaches them, and evaluates every beam on the same
/// realizations.
pub fn attach_and_run(
    cfg: &DeploymentConfig,
    attach_element: &ElementPattern,
    beams: &[NamedBeam],
) -> Result<SimulationOutput, NetsimError> {
    if beams.is_empty() {
        return Err(NetsimError::NoBeams);
    }
    let layout = generate_layout(cfg);
    let ues = drop_ues(cfg, &layout, attach_element)?;
    let counted: Vec<&UeDrop> = ues
        .iter()
        .filter(|u| !cfg.center_site_only || layout.cells[u.serving_cell].site == layout.center_site)
        .collect();
    let mut out = Vec::with_capacity(beams.len());
    for b in beams {
        let model = EirpModel::new(&b.weights, &b.geometry, b.element)?;
        let samples: Vec<LinkSample> = counted
            .par_iter()
            .map(|u| received_power(&model, &layout, u.serving_cell, u, cfg))
            .collect();
        let cdf = CdfSummary::from_samples(samples.iter().map(|s| s.rx_power_dbm).collect());
        out.push(BeamOutcome {
            name: b.name.clone(),
            samples,
            cdf,
        });
    }
    Ok(SimulationOutput {
        layout,
        ues,
        beams: out,
    })
}
