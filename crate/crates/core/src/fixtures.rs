//! Published reference weights, transcribed to three decimals where the
//! source rounds.

use num_complex::Complex64;

use crate::weights::{DualPolWeightsMat, DualPolWeightsVec};

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single element expanded three times along a line.
pub const ULA8_A: [f64; 8] = [1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0];
pub const ULA8_B: [f64; 8] = [1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0];

/// Single element expanded to 8×8, rows along z.
pub const URA8X8_A: [[f64; 8]; 8] = [
    [1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
    [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
];
pub const URA8X8_B: [[f64; 8]; 8] = [
    [1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
    [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0],
];

/// SPBF elevation weights for four 2×1 subarrays, tilt not included.
pub const SPBF_WZ1: [Complex64; 4] = [c(0.297, -0.146), c(0.271, 0.256), c(0.267, 0.260), c(0.301, -0.146)];

/// SPBF azimuth weights for eight columns.
pub const SPBF_WY: [Complex64; 8] = [
    c(0.189, 0.189),
    c(0.093, -0.165),
    c(-0.244, 0.112),
    c(-0.129, 0.232),
    c(-0.129, 0.232),
    c(-0.244, 0.112),
    c(0.093, -0.165),
    c(0.189, 0.189),
];

/// DPBF elevation weights, polarization A, four subarrays.
pub const DPBF_WZ1_A: [Complex64; 4] = [c(0.271, 0.227), c(0.181, 0.304), c(-0.091, 0.342), c(-0.199, 0.292)];

/// DPBF azimuth protoarray, polarization A. Polarization B is the conjugate.
pub const DPBF_WY_A_PROTO: [Complex64; 2] = [c(0.458, -0.200), c(0.458, 0.200)];

pub fn ula8() -> DualPolWeightsVec {
    DualPolWeightsVec::from_real(&ULA8_A, &ULA8_B).expect("fixture")
}

pub fn ura8x8() -> DualPolWeightsMat {
    let a: Vec<&[f64]> = URA8X8_A.iter().map(|r| r.as_slice()).collect();
    let b: Vec<&[f64]> = URA8X8_B.iter().map(|r| r.as_slice()).collect();
    DualPolWeightsMat::from_real_rows(&a, &b).expect("fixture")
}

/// Phase-only weights from rounded printed values: printed phases, common
/// modulus `1/√(2n)`, and `w_B = w_A*`.
fn phase_only_symmetric(printed: &[Complex64]) -> DualPolWeightsVec {
    let r = 1.0 / ((2 * printed.len()) as f64).sqrt();
    let a: Vec<Complex64> = printed.iter().map(|x| Complex64::from_polar(r, x.arg())).collect();
    let b = a.iter().map(|x| x.conj()).collect();
    DualPolWeightsVec::new(a, b).expect("fixture")
}

/// DPBF azimuth protoarray with `w_B = w_A*`, moduli restored to 1/2.
pub fn dpbf_azimuth_proto() -> DualPolWeightsVec {
    phase_only_symmetric(&DPBF_WY_A_PROTO)
}

/// DPBF elevation subarray weights with `w_B = w_A*`, moduli restored to
/// `1/√8`.
pub fn dpbf_elevation_subarrays() -> DualPolWeightsVec {
    phase_only_symmetric(&DPBF_WZ1_A)
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 6] = ["ula8", "ura8x8", "spbf-wz1", "spbf-wy", "dpbf-wz1", "dpbf-wy-proto"];

/// A named fixture as a linear or rectangular weight set. Single-polarization
/// vectors are returned co-fed (`w_B = w_A`).
pub fn by_name(name: &str) -> Option<Fixture> {
    let cofed = |v: &[Complex64]| DualPolWeightsVec::new(v.to_vec(), v.to_vec()).expect("fixture");
    Some(match name {
        "ula8" => Fixture::Linear(ula8()),
        "ura8x8" => Fixture::Rectangular(ura8x8()),
        "spbf-wz1" => Fixture::Linear(cofed(&SPBF_WZ1)),
        "spbf-wy" => Fixture::Linear(cofed(&SPBF_WY)),
        "dpbf-wz1" => Fixture::Linear(dpbf_elevation_subarrays()),
        "dpbf-wy-proto" => Fixture::Linear(dpbf_azimuth_proto()),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    Linear(DualPolWeightsVec),
    Rectangular(DualPolWeightsMat),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::DualPolWeights;

    #[test]
    fn all_names_resolve() {
        for n in NAMES {
            assert!(by_name(n).is_some(), "{n}");
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn restored_moduli_stay_close_to_print() {
        for (w, printed) in [
            (dpbf_azimuth_proto(), DPBF_WY_A_PROTO.as_slice()),
            (dpbf_elevation_subarrays(), DPBF_WZ1_A.as_slice()),
        ] {
            for (x, p) in w.a().iter().zip(printed) {
                assert!((x - p).norm() < 2e-3, "{x} vs {p}");
            }
        }
    }

    #[test]
    fn expansion_fixtures_are_unimodular() {
        assert!(ula8().is_constant_modulus(0.0));
        assert!(ura8x8().is_constant_modulus(0.0));
    }
}
