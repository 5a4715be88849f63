//! Weight files: `row,col,re_a,im_a,re_b,im_b`, one row per element,
//! row-major.

use std::path::Path;

use asibeam::fixtures::{self, Fixture};
use asibeam::{Complex64, DualPolWeightsMat};
use ndarray::Array2;
use serde::Deserialize;

use crate::error::{config, Result};
use crate::output::{read_input, sha256_hex, sig12, InputDigest};

pub const HEADER: [&str; 6] = ["row", "col", "re_a", "im_a", "re_b", "im_b"];

#[derive(Deserialize)]
struct Record {
    row: usize,
    col: usize,
    re_a: f64,
    im_a: f64,
    re_b: f64,
    im_b: f64,
}

pub fn to_csv(w: &DualPolWeightsMat) -> Result<Vec<u8>> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(HEADER).map_err(config)?;
    for ((m, n), a) in w.a().indexed_iter() {
        let b = w.b()[[m, n]];
        out.write_record([
            m.to_string(),
            n.to_string(),
            sig12(a.re),
            sig12(a.im),
            sig12(b.re),
            sig12(b.im),
        ])
        .map_err(config)?;
    }
    out.into_inner().map_err(config)
}

/// Parses a weight file. Every `(row, col)` of the bounding shape must
/// appear exactly once.
pub fn from_csv(bytes: &[u8]) -> Result<DualPolWeightsMat> {
    let mut reader = csv::Reader::from_reader(bytes);
    let header = reader.headers().map_err(config)?;
    if header.iter().ne(HEADER) {
        return Err(config(format!("weight header must be {}", HEADER.join(","))));
    }
    let records = reader
        .deserialize::<Record>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(config)?;
    let rows = records
        .iter()
        .map(|r| r.row + 1)
        .max()
        .ok_or_else(|| config("weight file has no entries"))?;
    let cols = records.iter().map(|r| r.col + 1).max().unwrap_or(0);
    if records.len() != rows * cols {
        return Err(config(format!(
            "expected {} entries for a {rows}x{cols} array, found {}",
            rows * cols,
            records.len()
        )));
    }
    let mut a = Array2::from_elem((rows, cols), None);
    let mut b = Array2::from_elem((rows, cols), Complex64::new(0.0, 0.0));
    for r in records {
        if a[[r.row, r.col]].replace(Complex64::new(r.re_a, r.im_a)).is_some() {
            return Err(config(format!("duplicate entry at row {}, col {}", r.row, r.col)));
        }
        b[[r.row, r.col]] = Complex64::new(r.re_b, r.im_b);
    }
    let a = a.mapv(|x| x.expect("every cell filled"));
    DualPolWeightsMat::new(a, b).map_err(config)
}

/// Resolves a builtin fixture name or reads a weight file. Linear fixtures
/// become single-row matrices.
pub fn load(source: &str) -> Result<(DualPolWeightsMat, Option<InputDigest>)> {
    if source == "single" {
        return Ok((DualPolWeightsMat::single_element(), None));
    }
    if let Some(f) = fixtures::by_name(source) {
        let w = match f {
            Fixture::Linear(v) => v.to_row_matrix(),
            Fixture::Rectangular(m) => m,
        };
        return Ok((w, None));
    }
    let path = Path::new(source);
    if !path.exists() && path.extension().is_none() && path.parent() == Some(Path::new("")) {
        return Err(config(format!(
            "{source:?} is neither a weight file nor a builtin (single, {})",
            fixtures::NAMES.join(", ")
        )));
    }
    let bytes = read_input(path)?;
    let digest = InputDigest {
        path: source.into(),
        sha256: sha256_hex(&bytes),
    };
    Ok((from_csv(&bytes)?, Some(digest)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use asibeam::fixtures::ura8x8;

    #[test]
    fn round_trip_preserves_values_to_twelve_digits() {
        let a = Array2::from_shape_fn((2, 3), |(m, n)| {
            Complex64::from_polar(0.3 + m as f64, 0.7 * n as f64 - 1.0)
        });
        let w = DualPolWeightsMat::new(a.clone(), a.mapv(|x| x.conj())).unwrap();
        let back = from_csv(&to_csv(&w).unwrap()).unwrap();
        for (x, y) in w.a().iter().chain(w.b()).zip(back.a().iter().chain(back.b())) {
            assert!((x - y).norm() <= 1e-11 * x.norm().max(1.0));
        }
    }

    #[test]
    fn integer_fixture_round_trips_exactly() {
        let w = ura8x8();
        assert_eq!(from_csv(&to_csv(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn malformed_files_are_config_errors() {
        let cases: [&[u8]; 4] = [
            b"row,col,re_a,im_a,re_b\n0,0,1,0,1\n",
            b"row,col,re_a,im_a,re_b,im_b\n",
            b"row,col,re_a,im_a,re_b,im_b\n0,0,1,0,1,0\n0,0,1,0,1,0\n",
            b"row,col,re_a,im_a,re_b,im_b\n0,1,1,0,1,0\n",
        ];
        for c in cases {
            assert_eq!(from_csv(c).unwrap_err().exit_code(), 2);
        }
    }
}
