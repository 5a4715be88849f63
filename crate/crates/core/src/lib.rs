//! Broad-beam synthesis for dual-polarized antenna arrays.
//!
//! Array-size-invariant expansion doubles an array while keeping its total
//! power pattern, pattern evaluation covers per-polarization fields and
//! EIRP, and a small multi-cell simulator compares designs by received power.

pub mod asi;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod netsim;
pub mod patterns;
pub mod synthesis;
pub mod weights;

pub use error::{AsiError, GeometryError, NetsimError, PatternError, SynthesisError, WeightsError};
pub use geometry::{Direction, UlaGeometry, UraGeometry};
pub use num_complex::Complex64;
pub use patterns::{Cut, ElementPattern, NormalizedWeights, PatternResult};
pub use weights::{DualPolWeights, DualPolWeightsMat, DualPolWeightsVec};
