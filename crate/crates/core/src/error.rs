use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("array must have at least one element")]
    EmptyArray,
    #[error("element spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("vertical phase factor must be positive, got {0}")]
    InvalidPhaseFactor(f64),
    #[error("angle is not finite")]
    NonFiniteAngle,
    #[error("zenith {0} rad outside [0, π]")]
    ZenithOutOfRange(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightsError {
    #[error("polarization A and B weights differ in shape: {a:?} vs {b:?}")]
    ShapeMismatch { a: (usize, usize), b: (usize, usize) },
    #[error("weights must contain at least one element")]
    Empty,
    #[error("all weights are zero")]
    AllZero,
    #[error("weight entry is not finite")]
    NonFinite,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("weights {weights:?} do not match array {array:?}")]
    DimensionMismatch {
        weights: (usize, usize),
        array: (usize, usize),
    },
    #[error("pattern never drops 3 dB below its peak inside the cut")]
    NoHalfPowerCrossing,
    #[error("sector contains no grid samples")]
    EmptySector,
    #[error("invalid element pattern: {0}")]
    InvalidElement(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsiError {
    #[error("expanded array is not a power-of-two enlargement of the protoarray along one axis")]
    GeometryMismatch,
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("weights length {got} does not match expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("array size {m} not divisible by subarray size {s}")]
    IndivisibleSubarray { m: usize, s: usize },
    #[error("infeasible optimizer configuration: {0}")]
    InfeasibleConfig(String),
    #[error("target HPBW {target:.3}° outside achievable range [{min:.3}°, {max:.3}°)")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    #[error("reversed azimuth supports overlap; the DPBF matrix would not be constant modulus")]
    OverlappingSupport,
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetsimError {
    #[error("zero distance between base station and UE")]
    ZeroDistance,
    #[error("invalid deployment config: {0}")]
    InvalidConfig(String),
    #[error("at least one beam is required")]
    NoBeams,
    #[error(transparent)]
    Pattern(#[from] PatternError),
}
