//! Cell-specific broad-beam design.
//!
//! Beams are designed separately in elevation and azimuth and combined into
//! a full-array excitation. Single-polarization (SPBF) designs use one outer
//! product fed to both polarizations; dual-polarization (DPBF) designs use
//! the companion structure so the combined weights stay constant modulus.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{LN_2, PI};

use crate::asi::expand_ula;
use crate::error::SynthesisError;
use crate::geometry::{Direction, UlaGeometry, UraGeometry};
use crate::patterns::{
    azimuth_cut_grid, elevation_cut_grid, measure_hpbw, to_db, total_pattern, Cut, ElementPattern, NormalizedWeights,
};
use crate::weights::{DualPolWeights, DualPolWeightsMat, DualPolWeightsVec};

/// `2MN · max|w|² / ‖w‖²` over both polarizations stacked. Equals 1 exactly
/// when every entry has the same modulus.
pub fn taper_loss<W: DualPolWeights>(w: &W) -> f64 {
    let s = w.stacked();
    let max = s.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
    let total: f64 = s.iter().map(|x| x.norm_sqr()).sum();
    if s.iter().all(|x| x.norm_sqr() == max) {
        return 1.0;
    }
    s.len() as f64 * max / total
}

pub fn taper_loss_db<W: DualPolWeights>(w: &W) -> f64 {
    10.0 * taper_loss(w).log10()
}

fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Scales weights so the strongest power amplifier runs exactly at its share
/// `P_BS / 2MN` of the budget. The radiated power is then `P_BS / L_taper`.
///
/// The scale is `α = sqrt(P_BS / (L_taper ‖w‖²))`.
pub fn normalize_power<W: DualPolWeights>(w: &W, p_bs_dbm: f64) -> NormalizedWeights<W> {
    let p = dbm_to_mw(p_bs_dbm);
    let alpha = (p / (taper_loss(w) * w.total_power())).sqrt();
    NormalizedWeights::new(w.scaled(alpha), alpha, p_bs_dbm)
}

/// Per-element phase ramp `exp(-j c π m d sin(tilt))` that steers a vertical
/// line of `n` elements `tilt_deg` below the horizon. `c` is the geometry's
/// vertical phase factor.
pub fn tilt_ramp(n: usize, spacing_z: f64, z_phase_factor: f64, tilt_deg: f64) -> Vec<Complex64> {
    let step = -z_phase_factor * PI * spacing_z * tilt_deg.to_radians().sin();
    (0..n).map(|m| Complex64::from_polar(1.0, m as f64 * step)).collect()
}

/// Multiplies row `m` of both polarizations by the tilt ramp.
pub fn apply_tilt(w: &DualPolWeightsMat, g: &UraGeometry, tilt_deg: f64) -> DualPolWeightsMat {
    let ramp = tilt_ramp(w.shape().0, g.spacing_z(), g.z_phase_factor(), tilt_deg);
    let tilt = |x: &Array2<Complex64>| {
        let mut y = x.clone();
        for (mut row, r) in y.rows_mut().into_iter().zip(&ramp) {
            row.mapv_inplace(|v| v * r);
        }
        y
    };
    DualPolWeightsMat::new(tilt(w.a()), tilt(w.b())).expect("tilt is a pure phase")
}

/// Expands subarray weights to element space: each subarray weight is
/// repeated `s` times, then element `r` inside a subarray gets the subarray
/// tilt phase.
pub fn virtualize_subarrays(
    w_sub: &[Complex64],
    g: &UraGeometry,
    s: usize,
    subarray_tilt_deg: f64,
) -> Result<Vec<Complex64>, SynthesisError> {
    let m = g.m_rows();
    if s == 0 || !m.is_multiple_of(s) {
        return Err(SynthesisError::IndivisibleSubarray { m, s });
    }
    if w_sub.len() * s != m {
        return Err(SynthesisError::DimensionMismatch {
            expected: m / s,
            got: w_sub.len(),
        });
    }
    let inner = tilt_ramp(s, g.spacing_z(), g.z_phase_factor(), subarray_tilt_deg);
    Ok(w_sub.iter().flat_map(|w| inner.iter().map(move |r| w * r)).collect())
}

/// `W = w_z ⊗ w_yᵀ`, fed identically to both polarizations.
pub fn build_spbf_2d(
    w_z: &[Complex64],
    w_y: &[Complex64],
    g: &UraGeometry,
) -> Result<DualPolWeightsMat, SynthesisError> {
    check_len(w_z, g.m_rows())?;
    check_len(w_y, g.n_cols())?;
    let w = outer(w_z, w_y);
    Ok(DualPolWeightsMat::new(w.clone(), w)?)
}

fn check_len(x: &[Complex64], expected: usize) -> Result<(), SynthesisError> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(SynthesisError::DimensionMismatch { expected, got: x.len() })
    }
}

fn outer(u: &[Complex64], v: &[Complex64]) -> Array2<Complex64> {
    Array2::from_shape_fn((u.len(), v.len()), |(i, k)| u[i] * v[k])
}

/// Pads with zeros at the high-index end.
pub fn zero_pad(x: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut y = x.to_vec();
    y.resize(len.max(x.len()), Complex64::new(0.0, 0.0));
    y
}

/// Dual-polarization 2D build:
///
/// `W_A = w_zA ⊗ w_yAᵀ − w_zB ⊗ (J w_yB*)ᵀ`,
/// `W_B = w_zA ⊗ w_yBᵀ + w_zB ⊗ (J w_yA*)ᵀ`.
///
/// The total array factor separates into elevation total times azimuth
/// total for any inputs. The azimuth vectors must be zero padded so the
/// reversed terms land on the complementary columns; overlapping supports
/// are rejected because they would introduce amplitude taper.
pub fn build_dpbf_2d(
    w_za: &[Complex64],
    w_zb: &[Complex64],
    w_ya: &[Complex64],
    w_yb: &[Complex64],
    g: &UraGeometry,
) -> Result<DualPolWeightsMat, SynthesisError> {
    let (m, n) = g.shape();
    check_len(w_za, m)?;
    check_len(w_zb, m)?;
    check_len(w_ya, n)?;
    check_len(w_yb, n)?;

    let nz = |x: &Complex64| x.norm_sqr() > 0.0;
    if w_zb.iter().any(nz) && w_za.iter().any(nz) {
        let rev_overlap = |p: &[Complex64], q: &[Complex64]| (0..n).any(|i| nz(&p[i]) && nz(&q[n - 1 - i]));
        if rev_overlap(w_ya, w_yb) || rev_overlap(w_yb, w_ya) {
            return Err(SynthesisError::OverlappingSupport);
        }
    }

    let rev_conj = |x: &[Complex64]| -> Vec<Complex64> { x.iter().rev().map(|v| v.conj()).collect() };
    let jb = rev_conj(w_yb);
    let ja = rev_conj(w_ya);
    let wa = outer(w_za, w_ya) - outer(w_zb, &jb);
    let wb = outer(w_za, w_yb) + outer(w_zb, &ja);
    Ok(DualPolWeightsMat::new(wa, wb)?)
}

/// Two-element dual-polarized protoarray `w_A = ½[e^{-jγ}, e^{jγ}]`,
/// `w_B = w_A*`. Its total array factor is `1 + cos(2γ) cos ψ_y`.
pub fn two_element_weights(gamma_rad: f64) -> DualPolWeightsVec {
    let a = vec![
        Complex64::from_polar(0.5, -gamma_rad),
        Complex64::from_polar(0.5, gamma_rad),
    ];
    let b = a.iter().map(|x| x.conj()).collect();
    DualPolWeightsVec::new(a, b).expect("nonzero")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionResult {
    pub weights: DualPolWeightsVec,
    pub gamma_rad: f64,
    pub hpbw_deg: f64,
    pub iterations: usize,
}

/// Tolerance on the achieved HPBW.
pub const BISECTION_TOL_DEG: f64 = 0.1;
pub const BISECTION_MAX_ITER: usize = 60;
const BISECTION_GRID_DEG: f64 = 0.05;

fn two_element_hpbw(gamma: f64, p: &ElementPattern, g: &UlaGeometry) -> Option<f64> {
    let grid = azimuth_cut_grid(BISECTION_GRID_DEG, 90.0).expect("valid grid");
    let cut = total_pattern(&two_element_weights(gamma), g, p, &grid)
        .expect("two elements")
        .azimuth_cut();
    measure_hpbw(&cut).ok()
}

/// Finds the two-element phase offset `γ ∈ [0°, 45°)` whose total azimuth
/// pattern (with element `p`) has the requested HPBW. HPBW grows with `γ`,
/// from the narrowest beam at `γ = 0` to the element pattern at `γ = 45°`.
pub fn two_element_bisection(
    target_hpbw_deg: f64,
    p: &ElementPattern,
    spacing_y: f64,
) -> Result<BisectionResult, SynthesisError> {
    let g = UlaGeometry::new(2, spacing_y)?;
    let min = two_element_hpbw(0.0, p, &g).unwrap_or(f64::INFINITY);
    let max = two_element_hpbw(PI / 4.0 - 1e-9, p, &g).unwrap_or(f64::INFINITY);
    if !(target_hpbw_deg >= min && target_hpbw_deg < max) {
        return Err(SynthesisError::TargetOutOfRange {
            target: target_hpbw_deg,
            min,
            max,
        });
    }
    let (mut lo, mut hi) = (0.0, PI / 4.0);
    let mut best = (0.0, min);
    for it in 1..=BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let h = two_element_hpbw(mid, p, &g).unwrap_or(f64::INFINITY);
        if (h - target_hpbw_deg).abs() < (best.1 - target_hpbw_deg).abs() {
            best = (mid, h);
        }
        if (h - target_hpbw_deg).abs() <= BISECTION_TOL_DEG {
            return Ok(BisectionResult {
                weights: two_element_weights(mid),
                gamma_rad: mid,
                hpbw_deg: h,
                iterations: it,
            });
        }
        if h < target_hpbw_deg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BisectionResult {
        weights: two_element_weights(best.0),
        gamma_rad: best.0,
        hpbw_deg: best.1,
        iterations: BISECTION_MAX_ITER,
    })
}

/// Desired beam: Gaussian in both planes, steered `tilt_deg` below horizon.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisTarget {
    pub shape: TargetShape,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
    pub tilt_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetShape {
    Gaussian,
}

impl SynthesisTarget {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        for h in [self.hpbw_az_deg, self.hpbw_el_deg] {
            if !(h > 0.0 && h < 180.0) {
                return Err(SynthesisError::InvalidTarget(format!("HPBW {h}° outside (0°, 180°)")));
            }
        }
        if !self.tilt_deg.is_finite() {
            return Err(SynthesisError::InvalidTarget("tilt is not finite".into()));
        }
        Ok(())
    }
}

/// Gaussian gain with the given HPBW centred on `center_deg`.
pub fn gaussian_target(angle_deg: f64, center_deg: f64, hpbw_deg: f64) -> f64 {
    let x = (angle_deg - center_deg) / hpbw_deg;
    (-4.0 * LN_2 * x * x).exp()
}

/// Variance of the dB difference between target and achieved power after
/// aligning both at their maxima. Inputs are linear powers.
pub fn pattern_variance(achieved: &[f64], target: &[f64]) -> Result<f64, SynthesisError> {
    if achieved.is_empty() || achieved.len() != target.len() {
        return Err(crate::error::PatternError::EmptySector.into());
    }
    let peak_a = to_db(achieved.iter().copied().fold(0.0, f64::max));
    let peak_t = to_db(target.iter().copied().fold(0.0, f64::max));
    let diffs: Vec<f64> = achieved
        .iter()
        .zip(target)
        .map(|(a, t)| (to_db(*t) - peak_t) - (to_db(*a) - peak_a))
        .collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    Ok(diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutPlane {
    /// Horizontal line of elements along y, cut at the horizon.
    Azimuth,
    /// Vertical line of elements along z, cut at zero azimuth.
    Elevation,
}

/// How the second polarization relates to the optimized first one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationMode {
    /// Both polarizations carry the same weights (SPBF fed on both ports).
    Single,
    /// Independent phases per polarization.
    Dual,
    /// `w_B = w_A*`, which makes the total pattern symmetric about the
    /// untilted broadside.
    DualSymmetric,
}

/// A one-dimensional design problem: a line of (possibly virtualized)
/// elements whose total pattern on one cut should follow a Gaussian target.
#[derive(Debug, Clone, PartialEq)]
pub struct LineArrayDesign {
    pub plane: CutPlane,
    /// Element-level geometry: `M×1` for elevation, `1×N` for azimuth.
    pub geometry: UraGeometry,
    pub element: ElementPattern,
    /// Elements per virtual element (elevation only).
    pub subarray_size: usize,
    pub subarray_tilt_deg: f64,
    /// Electrical tilt of the whole line (elevation only).
    pub tilt_deg: f64,
    pub target_hpbw_deg: f64,
    /// Half-width of the variance window around the target peak.
    pub sector_half_width_deg: f64,
    pub grid_step_deg: f64,
    /// Outside the window the pattern is penalized where it exceeds
    /// `max(target, floor)` relative to peak.
    pub sidelobe_floor_db: f64,
    pub sidelobe_penalty: f64,
}

/// Default variance windows.
pub const DEFAULT_AZIMUTH_SECTOR_DEG: f64 = 60.0;
pub const DEFAULT_ELEVATION_SECTOR_DEG: f64 = 15.0;

impl LineArrayDesign {
    pub fn elevation(
        geometry: UraGeometry,
        element: ElementPattern,
        subarray_size: usize,
        subarray_tilt_deg: f64,
        tilt_deg: f64,
        target_hpbw_deg: f64,
    ) -> Result<Self, SynthesisError> {
        let d = Self {
            plane: CutPlane::Elevation,
            geometry: geometry.resized(geometry.m_rows(), 1)?,
            element,
            subarray_size,
            subarray_tilt_deg,
            tilt_deg,
            target_hpbw_deg,
            sector_half_width_deg: DEFAULT_ELEVATION_SECTOR_DEG,
            grid_step_deg: 0.5,
            sidelobe_floor_db: -15.0,
            sidelobe_penalty: 1.0,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn azimuth(
        geometry: UraGeometry,
        element: ElementPattern,
        target_hpbw_deg: f64,
    ) -> Result<Self, SynthesisError> {
        let d = Self {
            plane: CutPlane::Azimuth,
            geometry: geometry.resized(1, geometry.n_cols())?,
            element,
            subarray_size: 1,
            subarray_tilt_deg: 0.0,
            tilt_deg: 0.0,
            target_hpbw_deg,
            sector_half_width_deg: DEFAULT_AZIMUTH_SECTOR_DEG,
            grid_step_deg: 0.5,
            sidelobe_floor_db: -15.0,
            sidelobe_penalty: 1.0,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<(), SynthesisError> {
        if !(self.target_hpbw_deg > 0.0 && self.target_hpbw_deg < 180.0) {
            return Err(SynthesisError::InvalidTarget(format!(
                "HPBW {}° outside (0°, 180°)",
                self.target_hpbw_deg
            )));
        }
        match self.plane {
            CutPlane::Elevation => {
                let m = self.geometry.m_rows();
                if self.subarray_size == 0 || !m.is_multiple_of(self.subarray_size) {
                    return Err(SynthesisError::IndivisibleSubarray {
                        m,
                        s: self.subarray_size,
                    });
                }
            }
            CutPlane::Azimuth => {
                if self.subarray_size != 1 || self.tilt_deg != 0.0 || self.subarray_tilt_deg != 0.0 {
                    return Err(SynthesisError::InvalidTarget(
                        "azimuth designs take neither subarrays nor tilt".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Number of free (virtual) elements.
    pub fn free_elements(&self) -> usize {
        match self.plane {
            CutPlane::Elevation => self.geometry.m_rows() / self.subarray_size,
            CutPlane::Azimuth => self.geometry.n_cols(),
        }
    }

    /// Peak direction of the target on the cut, degrees.
    pub fn target_center_deg(&self) -> f64 {
        match self.plane {
            CutPlane::Elevation => -self.tilt_deg,
            CutPlane::Azimuth => 0.0,
        }
    }

    /// Virtual-element weights to element space, tilt included.
    pub fn element_space(&self, w: &[Complex64]) -> Result<Vec<Complex64>, SynthesisError> {
        check_len(w, self.free_elements())?;
        match self.plane {
            CutPlane::Azimuth => Ok(w.to_vec()),
            CutPlane::Elevation => {
                let s = self.subarray_size;
                let ramp = tilt_ramp(
                    w.len(),
                    self.geometry.spacing_z() * s as f64,
                    self.geometry.z_phase_factor(),
                    self.tilt_deg,
                );
                let tilted: Vec<Complex64> = w.iter().zip(&ramp).map(|(x, r)| x * r).collect();
                virtualize_subarrays(&tilted, &self.geometry, s, self.subarray_tilt_deg)
            }
        }
    }

    /// Element-space dual-polarization weights as a line matrix.
    pub fn element_weights(&self, w: &DualPolWeightsVec) -> Result<DualPolWeightsMat, SynthesisError> {
        let a = self.element_space(w.a())?;
        let b = self.element_space(w.b())?;
        let v = DualPolWeightsVec::new(a, b)?;
        Ok(match self.plane {
            CutPlane::Elevation => v.to_column_matrix(),
            CutPlane::Azimuth => v.to_row_matrix(),
        })
    }

    pub fn cut_grid(&self) -> Vec<Direction> {
        match self.plane {
            CutPlane::Elevation => elevation_cut_grid(self.grid_step_deg, 0.0),
            CutPlane::Azimuth => azimuth_cut_grid(self.grid_step_deg, 90.0),
        }
        .expect("positive grid step")
    }

    /// Total power on the design cut.
    pub fn evaluate(&self, w: &DualPolWeightsVec) -> Result<Cut, SynthesisError> {
        let ew = self.element_weights(w)?;
        let pat = total_pattern(&ew, &self.geometry, &self.element, &self.cut_grid())?;
        Ok(match self.plane {
            CutPlane::Elevation => pat.elevation_cut(),
            CutPlane::Azimuth => pat.azimuth_cut(),
        })
    }

    fn target_on(&self, cut: &Cut) -> Vec<f64> {
        let c = self.target_center_deg();
        cut.angles_deg
            .iter()
            .map(|&a| gaussian_target(a, c, self.target_hpbw_deg))
            .collect()
    }

    fn in_sector(&self, angle: f64) -> bool {
        (angle - self.target_center_deg()).abs() <= self.sector_half_width_deg + 1e-9
    }

    /// Variance objective restricted to the sector.
    pub fn variance_on(&self, cut: &Cut) -> Result<f64, SynthesisError> {
        let target = self.target_on(cut);
        let (a, t): (Vec<f64>, Vec<f64>) = cut
            .angles_deg
            .iter()
            .zip(cut.power.iter().zip(&target))
            .filter(|(ang, _)| self.in_sector(**ang))
            .map(|(_, (p, t))| (*p, *t))
            .unzip();
        pattern_variance(&a, &t)
    }

    pub fn variance(&self, w: &DualPolWeightsVec) -> Result<f64, SynthesisError> {
        self.variance_on(&self.evaluate(w)?)
    }

    /// Scalarized objective: variance plus the out-of-sector mask penalty.
    pub fn objective(&self, w: &DualPolWeightsVec) -> Result<f64, SynthesisError> {
        let cut = self.evaluate(w)?;
        let variance = self.variance_on(&cut)?;
        let target = self.target_on(&cut);
        let peak = to_db(cut.power.iter().copied().fold(0.0, f64::max));
        let (mut excess, mut count) = (0.0, 0usize);
        for ((ang, p), t) in cut.angles_deg.iter().zip(&cut.power).zip(&target) {
            if !self.in_sector(*ang) {
                let mask = to_db(*t).max(self.sidelobe_floor_db);
                let e = (to_db(*p) - peak - mask).max(0.0);
                excess += e * e;
                count += 1;
            }
        }
        let penalty = if count > 0 { excess / count as f64 } else { 0.0 };
        Ok(variance + self.sidelobe_penalty * penalty)
    }
}

/// Settings for the seeded population search.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub iterations: usize,
    pub population: usize,
}

/// Outcome metrics of a design.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ObjectiveReport {
    pub pattern_variance_db2: f64,
    pub taper_loss_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOnlyDesign {
    /// Virtual-element weights, every entry of modulus `1/√(2n)`.
    pub weights: DualPolWeightsVec,
    pub report: ObjectiveReport,
    /// Scalarized objective of the returned weights.
    pub objective: f64,
}

const DE_MUTATION: f64 = 0.6;
const DE_CROSSOVER: f64 = 0.9;

fn genome_len(n: usize, mode: PolarizationMode) -> usize {
    match mode {
        PolarizationMode::Dual => 2 * n,
        PolarizationMode::Single | PolarizationMode::DualSymmetric => n,
    }
}

fn weights_from_phases(phases: &[f64], n: usize, mode: PolarizationMode) -> DualPolWeightsVec {
    let amp = 1.0 / ((2 * n) as f64).sqrt();
    let a: Vec<Complex64> = phases[..n].iter().map(|&t| Complex64::from_polar(amp, t)).collect();
    let b = match mode {
        PolarizationMode::Single => a.clone(),
        PolarizationMode::DualSymmetric => a.iter().map(|x| x.conj()).collect(),
        PolarizationMode::Dual => phases[n..].iter().map(|&t| Complex64::from_polar(amp, t)).collect(),
    };
    DualPolWeightsVec::new(a, b).expect("unit modulus entries")
}

/// Phases of an existing constant-modulus vector, usable as an initial
/// population member.
pub fn phases_of(w: &DualPolWeightsVec, mode: PolarizationMode) -> Vec<f64> {
    let mut p: Vec<f64> = w.a().iter().map(|x| x.arg()).collect();
    if mode == PolarizationMode::Dual {
        p.extend(w.b().iter().map(|x| x.arg()));
    }
    p
}

fn wrap(t: f64) -> f64 {
    crate::geometry::wrap_pi(t)
}

/// Phase-only search (differential evolution, rand/1/bin) over the
/// virtual-element phases of `design`.
///
/// The trajectory depends only on `config.seed`: trial vectors are drawn
/// serially each generation and evaluated in parallel behind a barrier.
/// `initial` phases, when given, replace the first population member.
pub fn optimize_phase_only(
    design: &LineArrayDesign,
    mode: PolarizationMode,
    config: &OptimizerConfig,
    initial: Option<&[f64]>,
) -> Result<PhaseOnlyDesign, SynthesisError> {
    if config.population < 2 {
        return Err(SynthesisError::InfeasibleConfig("population must be at least 2".into()));
    }
    if config.iterations == 0 {
        return Err(SynthesisError::InfeasibleConfig("iterations must be positive".into()));
    }
    let n = design.free_elements();
    let dim = genome_len(n, mode);
    if let Some(init) = initial {
        check_len(&vec![Complex64::default(); init.len()], dim)?;
    }
    let score = |g: &[f64]| -> f64 {
        design
            .objective(&weights_from_phases(g, n, mode))
            .unwrap_or(f64::INFINITY)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pop: Vec<Vec<f64>> = (0..config.population)
        .map(|_| (0..dim).map(|_| rng.random_range(-PI..PI)).collect())
        .collect();
    if let Some(init) = initial {
        pop[0] = init.iter().map(|&t| wrap(t)).collect();
    }
    let mut fit: Vec<f64> = pop.par_iter().map(|g| score(g)).collect();

    for _ in 0..config.iterations {
        let trials: Vec<Vec<f64>> = (0..config.population)
            .map(|i| {
                let pick = |rng: &mut ChaCha8Rng| loop {
                    let r = rng.random_range(0..config.population);
                    if r != i || config.population < 4 {
                        break r;
                    }
                };
                let (r1, r2, r3) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                let forced = rng.random_range(0..dim);
                (0..dim)
                    .map(|j| {
                        if j == forced || rng.random::<f64>() < DE_CROSSOVER {
                            wrap(pop[r1][j] + DE_MUTATION * wrap(pop[r2][j] - pop[r3][j]))
                        } else {
                            pop[i][j]
                        }
                    })
                    .collect()
            })
            .collect();
        let trial_fit: Vec<f64> = trials.par_iter().map(|g| score(g)).collect();
        for (i, (t, f)) in trials.into_iter().zip(trial_fit).enumerate() {
            if f <= fit[i] {
                pop[i] = t;
                fit[i] = f;
            }
        }
    }

    let best = fit
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("population is nonempty");
    let weights = weights_from_phases(&pop[best], n, mode);
    let variance = design.variance(&weights)?;
    let taper = taper_loss_db(&design.element_weights(&weights)?);
    Ok(PhaseOnlyDesign {
        weights,
        report: ObjectiveReport {
            pattern_variance_db2: variance,
            taper_loss_db: taper,
        },
        objective: fit[best],
    })
}

/// The azimuth protoarray after `k` doublings, padded to `n_cols` and ready
/// for [`build_dpbf_2d`].
pub fn padded_azimuth(
    proto: &DualPolWeightsVec,
    n_cols: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>), SynthesisError> {
    let half = n_cols / 2;
    if !n_cols.is_multiple_of(2) || !half.is_multiple_of(proto.len()) || !(half / proto.len()).is_power_of_two() {
        return Err(SynthesisError::DimensionMismatch {
            expected: n_cols / 2,
            got: proto.len(),
        });
    }
    let k = (half / proto.len()).trailing_zeros();
    let e = expand_ula(proto, k).weights;
    Ok((zero_pad(e.a(), n_cols), zero_pad(e.b(), n_cols)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::array_factor_total;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn taper_loss_examples() {
        let uni = crate::asi::expand_ula(&DualPolWeightsVec::single_element(), 3).weights;
        assert_eq!(taper_loss(&uni), 1.0);
        let one_pol = DualPolWeightsVec::from_real(&[1.0], &[0.0]).unwrap();
        assert_relative_eq!(taper_loss(&one_pol), 2.0);
        assert_relative_eq!(taper_loss_db(&one_pol), 3.0103, epsilon = 1e-4);
    }

    #[test]
    fn normalize_power_examples() {
        let w = crate::asi::expand_ura(
            &DualPolWeightsMat::single_element(),
            3,
            3,
            crate::asi::ExpansionOrder::RowsFirst,
        )
        .weights;
        let nw = normalize_power(&w, 46.0);
        let expect = 10f64.powf((46.0 - 10.0 * 128f64.log10()) / 10.0);
        for x in nw.weights().stacked() {
            assert_relative_eq!(x.norm_sqr(), expect, max_relative = 1e-12);
        }
        assert_relative_eq!(nw.radiated_power_dbm(), 46.0, epsilon = 1e-12);

        let again = normalize_power(nw.weights(), 46.0);
        assert_relative_eq!(again.scale(), 1.0, max_relative = 1e-12);

        let tapered = DualPolWeightsVec::from_real(&[1.0, 0.5], &[0.25, 1.0]).unwrap();
        let nw = normalize_power(&tapered, 30.0);
        let max = nw.weights().stacked().iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
        assert_relative_eq!(max, 1000.0 / 4.0, max_relative = 1e-12);
        assert_relative_eq!(nw.radiated_power_dbm(), 30.0 - taper_loss_db(&tapered), epsilon = 1e-12);
    }

    #[test]
    fn tilt_is_identity_at_zero_and_preserves_moduli() {
        let w = DualPolWeightsMat::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]], &[&[0.5, 0.0], &[1.0, -1.0]]).unwrap();
        let g = UraGeometry::new(2, 2, 0.5, 0.6).unwrap();
        assert_eq!(apply_tilt(&w, &g, 0.0), w);
        let t = apply_tilt(&w, &g, 11.0);
        for (x, y) in w.stacked().iter().zip(t.stacked()) {
            assert_relative_eq!(x.norm(), y.norm(), max_relative = 1e-15);
        }
    }

    #[test]
    fn tilt_moves_elevation_peak() {
        let g = UraGeometry::new(8, 1, 0.5, 0.6).unwrap();
        let col = DualPolWeightsVec::from_real(&[1.0; 8], &[0.0; 8])
            .unwrap()
            .to_column_matrix();
        let t = apply_tilt(&col, &g, 6.0);
        let grid = elevation_cut_grid(0.05, 0.0).unwrap();
        let cut = total_pattern(&t, &g, &ElementPattern::isotropic(), &grid)
            .unwrap()
            .elevation_cut();
        let (peak, _) = cut.peak().unwrap();
        assert!((peak + 6.0).abs() <= 0.25, "{peak}");
    }

    #[test]
    fn virtualize_examples() {
        let g = UraGeometry::new(4, 1, 0.5, 0.6).unwrap();
        let w = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0), c(3.0, 0.0)];
        let g1 = UraGeometry::new(4, 1, 0.5, 0.6).unwrap();
        assert_eq!(virtualize_subarrays(&w, &g1, 1, 0.0).unwrap(), w);
        let v = virtualize_subarrays(&w[..2], &g, 2, 0.0).unwrap();
        assert_eq!(v, vec![w[0], w[0], w[1], w[1]]);
        let g3 = UraGeometry::new(3, 1, 0.5, 0.6).unwrap();
        assert!(matches!(
            virtualize_subarrays(&w[..1], &g3, 2, 0.0),
            Err(SynthesisError::IndivisibleSubarray { .. })
        ));
    }

    #[test]
    fn subarray_narrows_elevation_pattern() {
        let p = ElementPattern::gaussian(90.0, 90.0).unwrap();
        let g = UraGeometry::new(2, 1, 0.5, 0.6).unwrap();
        let v = virtualize_subarrays(&[c(1.0, 0.0)], &g, 2, 6.0).unwrap();
        let w = DualPolWeightsVec::new(v.clone(), v).unwrap().to_column_matrix();
        let grid = elevation_cut_grid(0.1, 0.0).unwrap();
        let cut = total_pattern(&w, &g, &p, &grid).unwrap().elevation_cut();
        let h = measure_hpbw(&cut).unwrap();
        assert!(h < 90.0 - 10.0, "{h}");
        assert!(cut.peak().unwrap().0 < 0.0);
    }

    #[test]
    fn spbf_build_examples() {
        let g = UraGeometry::new(1, 1, 0.5, 0.5).unwrap();
        let w = build_spbf_2d(&[c(1.0, 0.0)], &[c(1.0, 0.0)], &g).unwrap();
        assert_eq!(w.a()[[0, 0]], c(1.0, 0.0));
        assert_eq!(w.a(), w.b());
        let g = UraGeometry::new(2, 3, 0.5, 0.5).unwrap();
        let w = build_spbf_2d(
            &[c(1.0, 1.0), c(0.5, 0.0)],
            &[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)],
            &g,
        )
        .unwrap();
        // rank one: every 2x2 minor vanishes
        let a = w.a();
        assert!((a[[0, 0]] * a[[1, 1]] - a[[0, 1]] * a[[1, 0]]).norm() < 1e-15);
        assert!((a[[0, 1]] * a[[1, 2]] - a[[0, 2]] * a[[1, 1]]).norm() < 1e-15);
        assert!(build_spbf_2d(&[c(1.0, 0.0)], &[c(1.0, 0.0)], &g).is_err());
    }

    #[test]
    fn dpbf_degenerate_reduces_to_outer_product() {
        let g = UraGeometry::new(1, 1, 0.5, 0.5).unwrap();
        let one = [c(1.0, 0.0)];
        let zero = [c(0.0, 0.0)];
        let w = build_dpbf_2d(&one, &zero, &one, &one, &g).unwrap();
        let s = build_spbf_2d(&one, &one, &g).unwrap();
        assert_eq!(w, s);
    }

    #[test]
    fn dpbf_rejects_overlapping_support() {
        let g = UraGeometry::new(2, 2, 0.5, 0.5).unwrap();
        let z = [c(1.0, 0.0), c(1.0, 0.0)];
        let y = [c(1.0, 0.0), c(1.0, 0.0)];
        assert_eq!(
            build_dpbf_2d(&z, &z, &y, &y, &g),
            Err(SynthesisError::OverlappingSupport)
        );
    }

    #[test]
    fn two_element_factor_limits() {
        let g = UlaGeometry::new(2, 0.5).unwrap();
        let grid = azimuth_cut_grid(1.0, 90.0).unwrap();
        let flat = array_factor_total(&two_element_weights(PI / 4.0), &g, &grid).unwrap();
        assert!(flat.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let narrow = array_factor_total(&two_element_weights(0.0), &g, &grid).unwrap();
        for (d, x) in grid.iter().zip(narrow) {
            assert!((x - (1.0 + g.phase_y(d).cos())).abs() < 1e-12);
        }
        assert!(two_element_bisection(120.0, &ElementPattern::gaussian(90.0, 90.0).unwrap(), 0.5).is_err());
        assert!(two_element_bisection(10.0, &ElementPattern::gaussian(90.0, 90.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn bisection_hits_target() {
        let p = ElementPattern::gaussian(90.0, 90.0).unwrap();
        let r = two_element_bisection(65.0, &p, 0.5).unwrap();
        assert!((r.hpbw_deg - 65.0).abs() <= BISECTION_TOL_DEG);
        assert!(r.gamma_rad > 0.0 && r.gamma_rad < PI / 4.0);
    }

    #[test]
    fn variance_examples() {
        let t = [1.0, 0.5, 0.25, 0.1];
        assert!(pattern_variance(&t, &t).unwrap() < 1e-24);
        let shifted: Vec<f64> = t.iter().map(|x| x * 3.7).collect();
        assert!(pattern_variance(&shifted, &t).unwrap() < 1e-24);
        assert!(pattern_variance(&[], &[]).is_err());
    }

    #[test]
    fn optimizer_rejects_infeasible_config() {
        let p = ElementPattern::gaussian(90.0, 90.0).unwrap();
        let g = UraGeometry::new(1, 4, 0.5, 0.5).unwrap();
        let d = LineArrayDesign::azimuth(g, p, 65.0).unwrap();
        for (pop, it) in [(1, 10), (10, 0)] {
            let cfg = OptimizerConfig {
                seed: 1,
                iterations: it,
                population: pop,
            };
            assert!(matches!(
                optimize_phase_only(&d, PolarizationMode::Dual, &cfg, None),
                Err(SynthesisError::InfeasibleConfig(_))
            ));
        }
    }

    #[test]
    fn single_element_matching_target_has_zero_variance() {
        let p = ElementPattern::gaussian(65.0, 65.0).unwrap();
        let g = UraGeometry::new(1, 1, 0.5, 0.5).unwrap();
        let d = LineArrayDesign::azimuth(g, p, 65.0).unwrap();
        let cfg = OptimizerConfig {
            seed: 3,
            iterations: 5,
            population: 4,
        };
        let r = optimize_phase_only(&d, PolarizationMode::Dual, &cfg, None).unwrap();
        assert!(r.report.pattern_variance_db2 < 1e-20);
        assert_eq!(r.report.taper_loss_db, 0.0);
    }

    #[test]
    fn optimizer_is_deterministic_and_phase_only() {
        let p = ElementPattern::gaussian(90.0, 90.0).unwrap();
        let g = UraGeometry::new(8, 8, 0.5, 0.6).unwrap();
        let d = LineArrayDesign::elevation(g, p, 2, 6.0, 6.0, 15.0).unwrap();
        let cfg = OptimizerConfig {
            seed: 11,
            iterations: 20,
            population: 12,
        };
        let r1 = optimize_phase_only(&d, PolarizationMode::DualSymmetric, &cfg, None).unwrap();
        let r2 = optimize_phase_only(&d, PolarizationMode::DualSymmetric, &cfg, None).unwrap();
        assert_eq!(r1, r2);
        let amp = 1.0 / 8f64.sqrt();
        for x in r1.weights.stacked() {
            assert!((x.norm() - amp).abs() <= 1e-12);
        }
        for (a, b) in r1.weights.a().iter().zip(r1.weights.b()) {
            assert_eq!(*b, a.conj());
        }
    }

    #[test]
    fn untilted_symmetric_design_is_symmetric_about_horizon() {
        let p = ElementPattern::gaussian(90.0, 90.0).unwrap();
        let g = UraGeometry::new(8, 1, 0.5, 0.6).unwrap();
        let d = LineArrayDesign::elevation(g, p, 2, 0.0, 0.0, 15.0).unwrap();
        let w = weights_from_phases(&[0.3, -1.2, 2.0, 0.7], 4, PolarizationMode::DualSymmetric);
        let cut = d.evaluate(&w).unwrap();
        let n = cut.power.len();
        for i in 0..n / 2 {
            let (x, y) = (cut.power[i], cut.power[n - 1 - i]);
            assert!((x - y).abs() <= 1e-10 * x.max(y).max(1e-300), "{x} vs {y}");
        }
    }

    proptest! {
        #[test]
        fn taper_loss_at_least_one(
            v in prop::collection::vec((0.01f64..2.0, -3.0f64..3.0), 2..20),
        ) {
            let n = v.len() / 2;
            let e: Vec<Complex64> = v.iter().map(|(r, t)| Complex64::from_polar(*r, *t)).collect();
            let w = DualPolWeightsVec::new(e[..n].to_vec(), e[n..2 * n].to_vec()).unwrap();
            prop_assert!(taper_loss(&w) >= 1.0 - 1e-12);
            let uni = w.map(|x| Complex64::from_polar(0.7, x.arg()));
            prop_assert!((taper_loss(&uni) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn two_element_factor_is_analytic(gamma in 0.0f64..(PI / 4.0), phi in -PI..PI) {
            let g = UlaGeometry::new(2, 0.5).unwrap();
            let d = Direction::new(phi, PI / 2.0);
            let af = array_factor_total(&two_element_weights(gamma), &g, &[d]).unwrap()[0];
            let expect = 1.0 + (2.0 * gamma).cos() * g.phase_y(&d).cos();
            prop_assert!((af - expect).abs() <= 1e-12);
        }
    }
}
