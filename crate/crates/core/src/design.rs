//! Full-array beam pipelines: elevation and azimuth vectors to a tilted,
//! virtualized 2D excitation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SynthesisError;
use crate::fixtures;
use crate::geometry::UraGeometry;
use crate::patterns::ElementPattern;
use crate::synthesis::{
    build_dpbf_2d, build_spbf_2d, optimize_phase_only, padded_azimuth, phases_of, taper_loss_db, two_element_bisection,
    LineArrayDesign, ObjectiveReport, OptimizerConfig, PolarizationMode, SynthesisTarget, TargetShape,
};
use crate::weights::{DualPolWeightsMat, DualPolWeightsVec};

/// Array and deployment-side antenna parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub m_rows: usize,
    pub n_cols: usize,
    pub spacing_y: f64,
    pub spacing_z: f64,
    pub z_phase_factor: f64,
    pub subarray_size: usize,
    pub subarray_tilt_deg: f64,
    pub element: ElementPattern,
}

impl Default for ArrayConfig {
    /// 8×8 dual-polarized array, 2×1 subarrays, 90° Gaussian elements.
    fn default() -> Self {
        Self {
            m_rows: 8,
            n_cols: 8,
            spacing_y: 0.5,
            spacing_z: 0.6,
            z_phase_factor: crate::geometry::DEFAULT_Z_PHASE_FACTOR,
            subarray_size: 2,
            subarray_tilt_deg: 6.0,
            element: ElementPattern::gaussian(90.0, 90.0).expect("valid"),
        }
    }
}

impl ArrayConfig {
    pub fn geometry(&self) -> Result<UraGeometry, SynthesisError> {
        Ok(
            UraGeometry::new(self.m_rows, self.n_cols, self.spacing_y, self.spacing_z)?
                .with_z_phase_factor(self.z_phase_factor)?,
        )
    }

    pub fn elevation_design(&self, target: &SynthesisTarget) -> Result<LineArrayDesign, SynthesisError> {
        LineArrayDesign::elevation(
            self.geometry()?,
            self.element,
            self.subarray_size,
            self.subarray_tilt_deg,
            target.tilt_deg,
            target.hpbw_el_deg,
        )
    }

    pub fn azimuth_design(&self, target: &SynthesisTarget) -> Result<LineArrayDesign, SynthesisError> {
        LineArrayDesign::azimuth(self.geometry()?, self.element, target.hpbw_az_deg)
    }
}

pub fn default_target() -> SynthesisTarget {
    SynthesisTarget {
        shape: TargetShape::Gaussian,
        hpbw_az_deg: 65.0,
        hpbw_el_deg: 15.0,
        tilt_deg: 6.0,
    }
}

/// Single-polarization build from subarray elevation weights and column
/// weights. Both polarizations are fed the same matrix.
pub fn spbf_from_vectors(
    cfg: &ArrayConfig,
    target: &SynthesisTarget,
    w_z_sub: &[Complex64],
    w_y: &[Complex64],
) -> Result<DualPolWeightsMat, SynthesisError> {
    let el = cfg.elevation_design(target)?;
    let w_z = el.element_space(w_z_sub)?;
    build_spbf_2d(&w_z, w_y, &cfg.geometry()?)
}

/// Dual-polarization build from polarization-A subarray elevation weights
/// (B is the conjugate) and a dual-polarized azimuth protoarray that is
/// expanded to half the columns and zero padded.
pub fn dpbf_from_vectors(
    cfg: &ArrayConfig,
    target: &SynthesisTarget,
    w_z_sub: &DualPolWeightsVec,
    w_y_proto: &DualPolWeightsVec,
) -> Result<DualPolWeightsMat, SynthesisError> {
    let el = cfg.elevation_design(target)?;
    let w_za = el.element_space(w_z_sub.a())?;
    let w_zb = el.element_space(w_z_sub.b())?;
    let (w_ya, w_yb) = padded_azimuth(w_y_proto, cfg.n_cols)?;
    build_dpbf_2d(&w_za, &w_zb, &w_ya, &w_yb, &cfg.geometry()?)
}

/// SPBF excitation built from the published vectors.
pub fn reference_spbf(cfg: &ArrayConfig, target: &SynthesisTarget) -> Result<DualPolWeightsMat, SynthesisError> {
    spbf_from_vectors(cfg, target, &fixtures::SPBF_WZ1, &fixtures::SPBF_WY)
}

/// DPBF excitation built from the published vectors.
pub fn reference_dpbf(cfg: &ArrayConfig, target: &SynthesisTarget) -> Result<DualPolWeightsMat, SynthesisError> {
    dpbf_from_vectors(
        cfg,
        target,
        &fixtures::dpbf_elevation_subarrays(),
        &fixtures::dpbf_azimuth_proto(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamMode {
    Spbf,
    Dpbf,
}

/// Starting point of a synthesis run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    Random,
    /// Published vectors. For DPBF they seed the elevation search; for SPBF,
    /// whose published vectors carry amplitude taper that a phase-only
    /// search cannot represent, they are used as given.
    Published,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSynthesis {
    pub mode: BeamMode,
    pub weights: DualPolWeightsMat,
    /// Virtual-element elevation weights before tilt.
    pub elevation_weights: DualPolWeightsVec,
    /// Azimuth weights: the two-element protoarray for DPBF, all columns
    /// for SPBF.
    pub azimuth_weights: DualPolWeightsVec,
    pub elevation: ObjectiveReport,
    pub azimuth: ObjectiveReport,
    pub taper_loss_db: f64,
    /// Construction notes carried into run manifests.
    pub provenance: Vec<String>,
}

fn line_report(d: &LineArrayDesign, w: &DualPolWeightsVec) -> Result<ObjectiveReport, SynthesisError> {
    Ok(ObjectiveReport {
        pattern_variance_db2: d.variance(w)?,
        taper_loss_db: taper_loss_db(&d.element_weights(w)?),
    })
}

pub fn synthesize(
    mode: BeamMode,
    cfg: &ArrayConfig,
    target: &SynthesisTarget,
    optimizer: &OptimizerConfig,
    initial: InitialGuess,
) -> Result<BeamSynthesis, SynthesisError> {
    match mode {
        BeamMode::Dpbf => synthesize_dpbf(cfg, target, optimizer, initial),
        BeamMode::Spbf => synthesize_spbf(cfg, target, optimizer, initial),
    }
}

/// Elevation by phase-only search with `w_B = w_A*`, azimuth by two-element
/// bisection followed by expansion and zero padding.
pub fn synthesize_dpbf(
    cfg: &ArrayConfig,
    target: &SynthesisTarget,
    optimizer: &OptimizerConfig,
    initial: InitialGuess,
) -> Result<BeamSynthesis, SynthesisError> {
    target.validate()?;
    let el = cfg.elevation_design(target)?;
    let published = fixtures::dpbf_elevation_subarrays();
    let init = (initial == InitialGuess::Published && published.len() == el.free_elements())
        .then(|| phases_of(&published, PolarizationMode::DualSymmetric));
    let elevation = optimize_phase_only(&el, PolarizationMode::DualSymmetric, optimizer, init.as_deref())?;
    let azimuth = two_element_bisection(target.hpbw_az_deg, &cfg.element, cfg.spacing_y)?;
    let weights = dpbf_from_vectors(cfg, target, &elevation.weights, &azimuth.weights)?;
    let (ya, yb) = padded_azimuth(&azimuth.weights, cfg.n_cols)?;
    let az_report = line_report(&cfg.azimuth_design(target)?, &DualPolWeightsVec::new(ya, yb)?)?;
    Ok(BeamSynthesis {
        mode: BeamMode::Dpbf,
        taper_loss_db: taper_loss_db(&weights),
        weights,
        elevation_weights: elevation.weights,
        azimuth_weights: azimuth.weights,
        elevation: elevation.report,
        azimuth: az_report,
        provenance: vec![
            "azimuth protoarray zero padded at the high-index end".into(),
            "polarization B elevation weights are the conjugate of A".into(),
            format!("azimuth phase offset {:.6} deg", azimuth.gamma_rad.to_degrees()),
        ],
    })
}

/// Single-polarization design co-fed on both polarizations: either the
/// published vectors as given, or phase-only searches in both planes.
pub fn synthesize_spbf(
    cfg: &ArrayConfig,
    target: &SynthesisTarget,
    optimizer: &OptimizerConfig,
    initial: InitialGuess,
) -> Result<BeamSynthesis, SynthesisError> {
    target.validate()?;
    let el = cfg.elevation_design(target)?;
    let az = cfg.azimuth_design(target)?;
    let cofed = |v: &[Complex64]| DualPolWeightsVec::new(v.to_vec(), v.to_vec());
    let (w_z, w_y, note) = match initial {
        InitialGuess::Published => (
            cofed(&fixtures::SPBF_WZ1)?,
            cofed(&fixtures::SPBF_WY)?,
            "published SPBF vectors used as given",
        ),
        InitialGuess::Random => (
            optimize_phase_only(&el, PolarizationMode::Single, optimizer, None)?.weights,
            optimize_phase_only(&az, PolarizationMode::Single, optimizer, None)?.weights,
            "phase-only search in both planes",
        ),
    };
    let weights = spbf_from_vectors(cfg, target, w_z.a(), w_y.a())?;
    Ok(BeamSynthesis {
        mode: BeamMode::Spbf,
        taper_loss_db: taper_loss_db(&weights),
        weights,
        elevation: line_report(&el, &w_z)?,
        azimuth: line_report(&az, &w_y)?,
        elevation_weights: w_z,
        azimuth_weights: w_y,
        provenance: vec![note.into(), "polarization B fed with the polarization A matrix".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{azimuth_cut_grid, elevation_cut_grid, measure_hpbw, total_pattern};
    use crate::weights::DualPolWeights;

    #[test]
    fn reference_spbf_taper_loss() {
        let w = reference_spbf(&ArrayConfig::default(), &default_target()).unwrap();
        let l = taper_loss_db(&w);
        assert!((l - 1.1).abs() <= 0.05, "{l}");
    }

    #[test]
    fn reference_dpbf_is_constant_modulus() {
        let w = reference_dpbf(&ArrayConfig::default(), &default_target()).unwrap();
        assert!(w.is_constant_modulus(1e-12));
        assert!(taper_loss_db(&w).abs() <= 1e-9);
    }

    #[test]
    fn reference_dpbf_elevation_peak_follows_tilt() {
        let cfg = ArrayConfig::default();
        let w = reference_dpbf(&cfg, &default_target()).unwrap();
        let g = cfg.geometry().unwrap();
        let cut = total_pattern(&w, &g, &cfg.element, &elevation_cut_grid(0.1, 0.0).unwrap())
            .unwrap()
            .elevation_cut();
        let (peak, _) = cut.peak().unwrap();
        assert!((peak + 6.0).abs() < 1.0, "{peak}");
        let h = measure_hpbw(&cut).unwrap();
        assert!((h - 15.0).abs() < 2.0, "{h}");
        let az = total_pattern(&w, &g, &cfg.element, &azimuth_cut_grid(0.1, 96.0).unwrap())
            .unwrap()
            .azimuth_cut();
        assert!(measure_hpbw(&az).unwrap() > 40.0);
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            seed: 5,
            iterations: 15,
            population: 10,
        }
    }

    #[test]
    fn dpbf_synthesis_is_constant_modulus_and_reproducible() {
        let cfg = ArrayConfig::default();
        let a = synthesize(BeamMode::Dpbf, &cfg, &default_target(), &quick(), InitialGuess::Random).unwrap();
        let b = synthesize(BeamMode::Dpbf, &cfg, &default_target(), &quick(), InitialGuess::Random).unwrap();
        assert_eq!(a, b);
        assert!(a.weights.is_constant_modulus(1e-12));
        assert!(a.taper_loss_db.abs() < 1e-9);
    }

    #[test]
    fn spbf_published_reproduces_taper_loss() {
        let cfg = ArrayConfig::default();
        let s = synthesize(
            BeamMode::Spbf,
            &cfg,
            &default_target(),
            &quick(),
            InitialGuess::Published,
        )
        .unwrap();
        assert_eq!(s.weights, reference_spbf(&cfg, &default_target()).unwrap());
        assert!((s.taper_loss_db - 1.1).abs() <= 0.05);
        let r = synthesize(BeamMode::Spbf, &cfg, &default_target(), &quick(), InitialGuess::Random).unwrap();
        assert!(r.taper_loss_db.abs() < 1e-9);
    }

    #[test]
    fn array_config_round_trips_through_json() {
        let cfg = ArrayConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ArrayConfig>(&text).unwrap(), cfg);
        let bad = text.replace("\"m_rows\"", "\"rows\"");
        assert!(serde_json::from_str::<ArrayConfig>(&bad).is_err());
    }
}
