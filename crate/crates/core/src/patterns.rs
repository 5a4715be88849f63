//! Element patterns, radiated fields and total-power patterns.
//!
//! The total power pattern of a dual-polarized array is the sum of the two
//! per-polarization power patterns. With identical element patterns it
//! factors into an array factor `A(r̂) = |w_Aᵀa|² + |w_Bᵀa|²` times the
//! element power pattern.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{LN_2, PI};

use crate::error::PatternError;
use crate::geometry::{wrap_pi, Direction, UlaGeometry, UraGeometry};
use crate::weights::{DualPolWeights, DualPolWeightsMat, DualPolWeightsVec};

/// Lower clamp for every dB value written out.
pub const DB_FLOOR: f64 = -100.0;

/// `10 log10(x)` clamped at [`DB_FLOOR`].
pub fn to_db(x: f64) -> f64 {
    if x > 0.0 {
        (10.0 * x.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Isotropic,
    Gaussian,
}

/// Power pattern of one array element, identical for both polarizations.
///
/// The Gaussian model is separable: `exp(-4 ln2 [(Δaz/HPBW_az)² + (Δel/HPBW_el)²])`,
/// with azimuth and elevation offsets taken from the boresight direction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "ElementSpec", into = "ElementSpec")]
pub struct ElementPattern {
    kind: ElementKind,
    hpbw_az_deg: f64,
    hpbw_el_deg: f64,
    boresight: Direction,
}

/// Serialized form of an [`ElementPattern`] with broadside boresight.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub kind: ElementKind,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
}

impl TryFrom<ElementSpec> for ElementPattern {
    type Error = PatternError;

    fn try_from(s: ElementSpec) -> Result<Self, PatternError> {
        match s.kind {
            ElementKind::Isotropic => Ok(Self::isotropic()),
            ElementKind::Gaussian => Self::gaussian(s.hpbw_az_deg, s.hpbw_el_deg),
        }
    }
}

impl From<ElementPattern> for ElementSpec {
    fn from(p: ElementPattern) -> Self {
        Self {
            kind: p.kind,
            hpbw_az_deg: p.hpbw_az_deg,
            hpbw_el_deg: p.hpbw_el_deg,
        }
    }
}

impl ElementPattern {
    pub fn isotropic() -> Self {
        Self {
            kind: ElementKind::Isotropic,
            hpbw_az_deg: 180.0,
            hpbw_el_deg: 180.0,
            boresight: Direction::broadside(),
        }
    }

    pub fn gaussian(hpbw_az_deg: f64, hpbw_el_deg: f64) -> Result<Self, PatternError> {
        for h in [hpbw_az_deg, hpbw_el_deg] {
            if !(h > 0.0 && h < 180.0) {
                return Err(PatternError::InvalidElement(format!("HPBW {h}° outside (0°, 180°)")));
            }
        }
        Ok(Self {
            kind: ElementKind::Gaussian,
            hpbw_az_deg,
            hpbw_el_deg,
            boresight: Direction::broadside(),
        })
    }

    pub fn with_boresight(mut self, boresight: Direction) -> Self {
        self.boresight = boresight;
        self
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn hpbw_az_deg(&self) -> f64 {
        self.hpbw_az_deg
    }

    pub fn hpbw_el_deg(&self) -> f64 {
        self.hpbw_el_deg
    }

    pub fn boresight(&self) -> Direction {
        self.boresight
    }

    /// Linear power gain relative to the boresight value.
    pub fn gain(&self, d: &Direction) -> f64 {
        match self.kind {
            ElementKind::Isotropic => 1.0,
            ElementKind::Gaussian => {
                let daz = wrap_pi(d.azimuth() - self.boresight.azimuth()).to_degrees();
                let del = (d.elevation() - self.boresight.elevation()).to_degrees();
                let x = daz / self.hpbw_az_deg;
                let y = del / self.hpbw_el_deg;
                (-4.0 * LN_2 * (x * x + y * y)).exp()
            }
        }
    }

    /// Peak directivity `4π / ∮ G dΩ`, integrated numerically on a 0.5° grid.
    pub fn directivity(&self) -> f64 {
        match self.kind {
            ElementKind::Isotropic => 1.0,
            ElementKind::Gaussian => {
                let step = 0.5f64.to_radians();
                let n_theta = 360;
                let n_phi = 720;
                let integral: f64 = (0..n_theta)
                    .into_par_iter()
                    .map(|i| {
                        let theta = (i as f64 + 0.5) * step;
                        let row: f64 = (0..n_phi)
                            .map(|k| {
                                let phi = -PI + (k as f64 + 0.5) * step;
                                self.gain(&Direction::new(phi, theta))
                            })
                            .sum();
                        row * theta.sin() * step * step
                    })
                    .sum();
                4.0 * PI / integral
            }
        }
    }
}

/// A weight set paired with the geometry it excites.
pub trait ArrayWeights: DualPolWeights + Sync {
    type Geometry: Sync;

    /// Errors when the weights do not fit the geometry.
    fn check_geometry(&self, g: &Self::Geometry) -> Result<(), PatternError>;

    /// Per-polarization fields for isotropic elements. Dimensions must
    /// already have been checked.
    fn array_fields(&self, g: &Self::Geometry, d: &Direction) -> (Complex64, Complex64);
}

fn phasor_sum(w: impl Iterator<Item = Complex64>, step: Complex64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for x in w {
        acc += x * p;
        p *= step;
    }
    acc
}

impl ArrayWeights for DualPolWeightsVec {
    type Geometry = UlaGeometry;

    fn check_geometry(&self, g: &UlaGeometry) -> Result<(), PatternError> {
        if self.len() == g.n_elements() {
            Ok(())
        } else {
            Err(PatternError::DimensionMismatch {
                weights: (1, self.len()),
                array: (1, g.n_elements()),
            })
        }
    }

    fn array_fields(&self, g: &UlaGeometry, d: &Direction) -> (Complex64, Complex64) {
        let step = Complex64::from_polar(1.0, g.phase_y(d));
        (
            phasor_sum(self.a().iter().copied(), step),
            phasor_sum(self.b().iter().copied(), step),
        )
    }
}

impl ArrayWeights for DualPolWeightsMat {
    type Geometry = UraGeometry;

    fn check_geometry(&self, g: &UraGeometry) -> Result<(), PatternError> {
        if self.shape() == g.shape() {
            Ok(())
        } else {
            Err(PatternError::DimensionMismatch {
                weights: self.shape(),
                array: g.shape(),
            })
        }
    }

    fn array_fields(&self, g: &UraGeometry, d: &Direction) -> (Complex64, Complex64) {
        let step_y = Complex64::from_polar(1.0, g.phase_y(d));
        let step_z = Complex64::from_polar(1.0, g.phase_z(d));
        let field = |w: &ndarray::Array2<Complex64>| {
            phasor_sum(
                w.rows().into_iter().map(|row| phasor_sum(row.iter().copied(), step_y)),
                step_z,
            )
        };
        (field(self.a()), field(self.b()))
    }
}

/// Fields `(w_Aᵀa, w_Bᵀa)·√G_el` radiated by a linear array.
pub fn fields_ula(
    w: &DualPolWeightsVec,
    g: &UlaGeometry,
    p: &ElementPattern,
    d: &Direction,
) -> Result<(Complex64, Complex64), PatternError> {
    fields(w, g, p, d)
}

/// Fields `(vecᵀ(W_A)vec(A), vecᵀ(W_B)vec(A))·√G_el` radiated by a URA.
pub fn fields_ura(
    w: &DualPolWeightsMat,
    g: &UraGeometry,
    p: &ElementPattern,
    d: &Direction,
) -> Result<(Complex64, Complex64), PatternError> {
    fields(w, g, p, d)
}

pub fn fields<W: ArrayWeights>(
    w: &W,
    g: &W::Geometry,
    p: &ElementPattern,
    d: &Direction,
) -> Result<(Complex64, Complex64), PatternError> {
    w.check_geometry(g)?;
    let (ea, eb) = w.array_fields(g, d);
    let amp = p.gain(d).sqrt();
    Ok((ea * amp, eb * amp))
}

/// Total-power array factor over a grid (isotropic elements).
pub fn array_factor_total<W: ArrayWeights>(
    w: &W,
    g: &W::Geometry,
    grid: &[Direction],
) -> Result<Vec<f64>, PatternError> {
    w.check_geometry(g)?;
    Ok(grid
        .par_iter()
        .map(|d| {
            let (ea, eb) = w.array_fields(g, d);
            ea.norm_sqr() + eb.norm_sqr()
        })
        .collect())
}

/// Sampled per-polarization fields and total power over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub grid: Vec<Direction>,
    pub field_a: Vec<Complex64>,
    pub field_b: Vec<Complex64>,
    pub total_power: Vec<f64>,
}

impl PatternResult {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn power_a(&self) -> impl Iterator<Item = f64> + '_ {
        self.field_a.iter().map(|e| e.norm_sqr())
    }

    pub fn power_b(&self) -> impl Iterator<Item = f64> + '_ {
        self.field_b.iter().map(|e| e.norm_sqr())
    }

    /// Total power against a per-sample angle, in degrees.
    pub fn cut(&self, angle: impl Fn(&Direction) -> f64) -> Cut {
        Cut {
            angles_deg: self.grid.iter().map(|d| angle(d).to_degrees()).collect(),
            power: self.total_power.clone(),
        }
    }

    /// Cut indexed by azimuth, for grids at fixed zenith.
    pub fn azimuth_cut(&self) -> Cut {
        self.cut(|d| d.azimuth())
    }

    /// Cut indexed by elevation, for grids at fixed azimuth.
    pub fn elevation_cut(&self) -> Cut {
        self.cut(|d| d.elevation())
    }
}

/// Array factor times element pattern, with per-polarization fields.
pub fn total_pattern<W: ArrayWeights>(
    w: &W,
    g: &W::Geometry,
    p: &ElementPattern,
    grid: &[Direction],
) -> Result<PatternResult, PatternError> {
    w.check_geometry(g)?;
    let (field_a, field_b): (Vec<_>, Vec<_>) = grid
        .par_iter()
        .map(|d| {
            let (ea, eb) = w.array_fields(g, d);
            let amp = p.gain(d).sqrt();
            (ea * amp, eb * amp)
        })
        .unzip();
    let total_power = field_a
        .iter()
        .zip(&field_b)
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect();
    Ok(PatternResult {
        grid: grid.to_vec(),
        field_a,
        field_b,
        total_power,
    })
}

fn steps(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, PatternError> {
    if !(step > 0.0 && step.is_finite()) || hi < lo {
        return Err(PatternError::InvalidGrid(format!(
            "range [{lo}, {hi}] with step {step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Horizontal cut at fixed zenith, azimuth from -180° to 180° inclusive.
pub fn azimuth_cut_grid(step_deg: f64, zenith_deg: f64) -> Result<Vec<Direction>, PatternError> {
    Ok(steps(-180.0, 180.0, step_deg)?
        .into_iter()
        .map(|phi| Direction::from_degrees(phi, zenith_deg))
        .collect())
}

/// Vertical cut at fixed azimuth, elevation from -90° to 90° (zenith 180°..0°).
pub fn elevation_cut_grid(step_deg: f64, azimuth_deg: f64) -> Result<Vec<Direction>, PatternError> {
    Ok(steps(-90.0, 90.0, step_deg)?
        .into_iter()
        .map(|el| Direction::from_degrees(azimuth_deg, (90.0 - el).clamp(0.0, 180.0)))
        .collect())
}

/// Full `(θ, φ)` grid, zenith-major: θ in [0°, 180°], φ in [-180°, 180°).
pub fn sphere_grid(step_deg: f64) -> Result<Vec<Direction>, PatternError> {
    let thetas = steps(0.0, 180.0, step_deg)?;
    let phis: Vec<f64> = steps(-180.0, 180.0, step_deg)?
        .into_iter()
        .filter(|&p| p < 180.0 - 1e-9)
        .collect();
    Ok(thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| Direction::from_degrees(p, t)))
        .collect())
}

/// A one-dimensional pattern slice: linear power against angle in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub angles_deg: Vec<f64>,
    pub power: Vec<f64>,
}

impl Cut {
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &p)| (self.angles_deg[i], p))
    }
}

/// Width between the two half-power crossings around the peak, linearly
/// interpolated between samples.
pub fn measure_hpbw(cut: &Cut) -> Result<f64, PatternError> {
    let peak = cut.power.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Among samples tied with the maximum (front/back lobes) take the one
    // nearest the cut origin.
    let i_peak = (0..cut.power.len())
        .filter(|&i| cut.power[i] >= peak * (1.0 - 1e-9))
        .min_by(|&i, &j| cut.angles_deg[i].abs().total_cmp(&cut.angles_deg[j].abs()))
        .ok_or(PatternError::NoHalfPowerCrossing)?;
    if peak.is_nan() || peak <= 0.0 {
        return Err(PatternError::NoHalfPowerCrossing);
    }
    let half = peak / 2.0;
    let p = &cut.power;
    let x = &cut.angles_deg;
    let interp = |i: usize, j: usize| x[i] + (half - p[i]) / (p[j] - p[i]) * (x[j] - x[i]);

    let left = (0..i_peak)
        .rev()
        .find(|&i| p[i] < half)
        .map(|i| interp(i, i + 1))
        .ok_or(PatternError::NoHalfPowerCrossing)?;
    let right = (i_peak + 1..p.len())
        .find(|&i| p[i] < half)
        .map(|i| interp(i - 1, i))
        .ok_or(PatternError::NoHalfPowerCrossing)?;
    Ok(right - left)
}

/// Main-beam summary of a planar array pattern.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BeamShape {
    pub peak_elevation_deg: f64,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
}

/// Elevation cut at azimuth 0°, then an azimuth cut through the elevation
/// peak, both sampled every `step_deg`.
pub fn beam_shape<W: ArrayWeights>(
    w: &W,
    g: &W::Geometry,
    p: &ElementPattern,
    step_deg: f64,
) -> Result<BeamShape, PatternError> {
    let el_cut = total_pattern(w, g, p, &elevation_cut_grid(step_deg, 0.0)?)?.elevation_cut();
    let (peak_elevation_deg, _) = el_cut.peak().ok_or(PatternError::NoHalfPowerCrossing)?;
    let az_cut = total_pattern(w, g, p, &azimuth_cut_grid(step_deg, 90.0 - peak_elevation_deg)?)?.azimuth_cut();
    Ok(BeamShape {
        peak_elevation_deg,
        hpbw_az_deg: measure_hpbw(&az_cut)?,
        hpbw_el_deg: measure_hpbw(&el_cut)?,
    })
}

/// Peak-to-trough variation in dB over samples with angle in `[lo, hi]`.
pub fn ripple_db(cut: &Cut, lo_deg: f64, hi_deg: f64) -> Result<f64, PatternError> {
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, &p) in cut.angles_deg.iter().zip(&cut.power) {
        if *a >= lo_deg && *a <= hi_deg {
            let db = to_db(p);
            min = min.min(db);
            max = max.max(db);
        }
    }
    if min.is_finite() {
        Ok(max - min)
    } else {
        Err(PatternError::EmptySector)
    }
}

/// Weights scaled to a transmit power budget by
/// [`crate::synthesis::normalize_power`]. Entries are in √mW, so the summed
/// squared magnitude is the radiated power in mW.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights<W> {
    weights: W,
    scale: f64,
    power_budget_dbm: f64,
}

impl<W: DualPolWeights> NormalizedWeights<W> {
    pub(crate) fn new(weights: W, scale: f64, power_budget_dbm: f64) -> Self {
        Self {
            weights,
            scale,
            power_budget_dbm,
        }
    }

    pub fn weights(&self) -> &W {
        &self.weights
    }

    /// Factor that was applied to the input weights.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn power_budget_dbm(&self) -> f64 {
        self.power_budget_dbm
    }

    /// Radiated power in dBm (budget minus taper loss).
    pub fn radiated_power_dbm(&self) -> f64 {
        10.0 * self.weights.total_power().log10()
    }

    pub fn into_weights(self) -> W {
        self.weights
    }
}

/// EIRP evaluator with the element directivity computed once.
///
/// `EIRP(r̂) = D_el · A(r̂) · G_el(r̂)` in mW, where `A` is the array factor of
/// the normalized (√mW) weights and `D_el` the element peak directivity.
#[derive(Debug, Clone)]
pub struct EirpModel<'a, W: ArrayWeights> {
    weights: &'a NormalizedWeights<W>,
    geometry: &'a W::Geometry,
    element: ElementPattern,
    directivity: f64,
}

impl<'a, W: ArrayWeights> EirpModel<'a, W> {
    pub fn new(
        weights: &'a NormalizedWeights<W>,
        geometry: &'a W::Geometry,
        element: ElementPattern,
    ) -> Result<Self, PatternError> {
        weights.weights().check_geometry(geometry)?;
        Ok(Self {
            weights,
            geometry,
            element,
            directivity: element.directivity(),
        })
    }

    pub fn directivity(&self) -> f64 {
        self.directivity
    }

    /// EIRP in mW.
    pub fn eirp_mw(&self, d: &Direction) -> f64 {
        let (ea, eb) = self.weights.weights().array_fields(self.geometry, d);
        (ea.norm_sqr() + eb.norm_sqr()) * self.element.gain(d) * self.directivity
    }

    pub fn eirp_dbm(&self, d: &Direction) -> f64 {
        to_db(self.eirp_mw(d))
    }
}

/// One-off EIRP in dBm toward `d`.
pub fn eirp_dbm<W: ArrayWeights>(
    w: &NormalizedWeights<W>,
    g: &W::Geometry,
    p: &ElementPattern,
    d: &Direction,
) -> Result<f64, PatternError> {
    Ok(EirpModel::new(w, g, *p)?.eirp_dbm(d))
}
