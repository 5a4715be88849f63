//! Dual-polarized excitation weights.
//!
//! Polarization A and B each carry one complex weight per element. Linear
//! arrays use [`DualPolWeightsVec`], rectangular arrays [`DualPolWeightsMat`].

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::WeightsError;

/// Operations shared by vector and matrix weight sets.
pub trait DualPolWeights: Clone {
    /// Number of elements per polarization.
    fn element_count(&self) -> usize;

    /// All weights, polarization A (column-major for matrices) then B.
    fn stacked(&self) -> Vec<Complex64>;

    /// Applies `f` to every entry of both polarizations.
    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self;

    fn scaled(&self, factor: f64) -> Self {
        self.map(|x| x * factor)
    }

    /// Sum of squared magnitudes over both polarizations.
    fn total_power(&self) -> f64 {
        self.stacked().iter().map(|x| x.norm_sqr()).sum()
    }

    /// True when every entry of both polarizations has the same modulus.
    fn is_constant_modulus(&self, tol: f64) -> bool {
        let s = self.stacked();
        let r = s[0].norm();
        s.iter().all(|x| (x.norm() - r).abs() <= tol)
    }
}

fn check_entries<'a>(mut it: impl Iterator<Item = &'a Complex64>) -> Result<(), WeightsError> {
    let mut any = false;
    for x in it.by_ref() {
        if !(x.re.is_finite() && x.im.is_finite()) {
            return Err(WeightsError::NonFinite);
        }
        any |= x.norm_sqr() > 0.0;
    }
    if any {
        Ok(())
    } else {
        Err(WeightsError::AllZero)
    }
}

/// Per-polarization weight vectors for a linear array.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolWeightsVec {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl DualPolWeightsVec {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self, WeightsError> {
        if a.len() != b.len() {
            return Err(WeightsError::ShapeMismatch {
                a: (1, a.len()),
                b: (1, b.len()),
            });
        }
        if a.is_empty() {
            return Err(WeightsError::Empty);
        }
        check_entries(a.iter().chain(b.iter()))?;
        Ok(Self { a, b })
    }

    /// Real-valued convenience constructor.
    pub fn from_real(a: &[f64], b: &[f64]) -> Result<Self, WeightsError> {
        Self::new(
            a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            b.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// A single dual-polarized element fed with `w_A = w_B = 1`.
    pub fn single_element() -> Self {
        Self {
            a: vec![Complex64::new(1.0, 0.0)],
            b: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn into_parts(self) -> (Vec<Complex64>, Vec<Complex64>) {
        (self.a, self.b)
    }

    /// Interprets the vector as a single-row matrix (a horizontal URA row).
    pub fn to_row_matrix(&self) -> DualPolWeightsMat {
        let n = self.len();
        DualPolWeightsMat {
            a: Array2::from_shape_vec((1, n), self.a.clone()).expect("row shape"),
            b: Array2::from_shape_vec((1, n), self.b.clone()).expect("row shape"),
        }
    }

    /// Interprets the vector as a single-column matrix (a vertical URA column).
    pub fn to_column_matrix(&self) -> DualPolWeightsMat {
        let m = self.len();
        DualPolWeightsMat {
            a: Array2::from_shape_vec((m, 1), self.a.clone()).expect("column shape"),
            b: Array2::from_shape_vec((m, 1), self.b.clone()).expect("column shape"),
        }
    }
}

impl DualPolWeights for DualPolWeightsVec {
    fn element_count(&self) -> usize {
        self.a.len()
    }

    fn stacked(&self) -> Vec<Complex64> {
        self.a.iter().chain(self.b.iter()).copied().collect()
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            a: self.a.iter().map(|&x| f(x)).collect(),
            b: self.b.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// Per-polarization weight matrices for a rectangular array, rows along z.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolWeightsMat {
    a: Array2<Complex64>,
    b: Array2<Complex64>,
}

impl DualPolWeightsMat {
    pub fn new(a: Array2<Complex64>, b: Array2<Complex64>) -> Result<Self, WeightsError> {
        if a.dim() != b.dim() {
            return Err(WeightsError::ShapeMismatch { a: a.dim(), b: b.dim() });
        }
        if a.is_empty() {
            return Err(WeightsError::Empty);
        }
        check_entries(a.iter().chain(b.iter()))?;
        Ok(Self { a, b })
    }

    /// Real-valued row-major convenience constructor.
    pub fn from_real_rows(a: &[&[f64]], b: &[&[f64]]) -> Result<Self, WeightsError> {
        let to_mat = |rows: &[&[f64]]| -> Result<Array2<Complex64>, WeightsError> {
            let m = rows.len();
            let n = rows.first().map_or(0, |r| r.len());
            if rows.iter().any(|r| r.len() != n) {
                return Err(WeightsError::ShapeMismatch { a: (m, n), b: (m, 0) });
            }
            Ok(Array2::from_shape_fn((m, n), |(i, k)| Complex64::new(rows[i][k], 0.0)))
        };
        Self::new(to_mat(a)?, to_mat(b)?)
    }

    pub fn single_element() -> Self {
        DualPolWeightsVec::single_element().to_row_matrix()
    }

    pub fn a(&self) -> &Array2<Complex64> {
        &self.a
    }

    pub fn b(&self) -> &Array2<Complex64> {
        &self.b
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        self.a.dim()
    }

    pub fn into_parts(self) -> (Array2<Complex64>, Array2<Complex64>) {
        (self.a, self.b)
    }
}

impl DualPolWeights for DualPolWeightsMat {
    fn element_count(&self) -> usize {
        self.a.len()
    }

    fn stacked(&self) -> Vec<Complex64> {
        self.a.t().iter().chain(self.b.t().iter()).copied().collect()
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            a: self.a.mapv(&f),
            b: self.b.mapv(&f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_vectors() {
        assert!(matches!(
            DualPolWeightsVec::from_real(&[1.0, 2.0], &[1.0]),
            Err(WeightsError::ShapeMismatch { .. })
        ));
        assert_eq!(DualPolWeightsVec::from_real(&[], &[]), Err(WeightsError::Empty));
        assert_eq!(
            DualPolWeightsVec::from_real(&[0.0, 0.0], &[0.0, 0.0]),
            Err(WeightsError::AllZero)
        );
        assert_eq!(
            DualPolWeightsVec::from_real(&[f64::NAN], &[1.0]),
            Err(WeightsError::NonFinite)
        );
        assert!(DualPolWeightsVec::from_real(&[1.0], &[0.0]).is_ok());
    }

    #[test]
    fn stacked_order_is_a_then_b_column_major() {
        let w = DualPolWeightsMat::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]], &[&[5.0, 6.0], &[7.0, 8.0]]).unwrap();
        let s: Vec<f64> = w.stacked().iter().map(|x| x.re).collect();
        assert_eq!(s, vec![1.0, 3.0, 2.0, 4.0, 5.0, 7.0, 6.0, 8.0]);
        assert_eq!(w.total_power(), 204.0);
    }

    #[test]
    fn row_matrix_round_trip() {
        let w = DualPolWeightsVec::from_real(&[1.0, -1.0], &[1.0, 1.0]).unwrap();
        let m = w.to_row_matrix();
        assert_eq!(m.shape(), (1, 2));
        assert_eq!(m.stacked(), w.stacked());
        assert_eq!(w.to_column_matrix().shape(), (2, 1));
    }
}
