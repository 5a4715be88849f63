//! Array geometries, look directions and steering phases.
//!
//! Angles follow the usual antenna convention: zenith `θ` is measured from
//! the +z axis and azimuth `φ` from the +x axis. Arrays lie in the y-z plane
//! with broadside along +x, so `(φ, θ) = (0, π/2)` is boresight.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::GeometryError;

/// A far-field look direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    azimuth: f64,
    zenith: f64,
}

impl Direction {
    /// Builds a direction from radians. Azimuth is wrapped into `(-π, π]`;
    /// zenith must lie in `[0, π]`.
    pub fn try_new(azimuth_rad: f64, zenith_rad: f64) -> Result<Self, GeometryError> {
        if !azimuth_rad.is_finite() || !zenith_rad.is_finite() {
            return Err(GeometryError::NonFiniteAngle);
        }
        if !(0.0..=PI).contains(&zenith_rad) {
            return Err(GeometryError::ZenithOutOfRange(zenith_rad));
        }
        Ok(Self {
            azimuth: wrap_pi(azimuth_rad),
            zenith: zenith_rad,
        })
    }

    /// Panicking variant of [`Direction::try_new`] for literal angles.
    pub fn new(azimuth_rad: f64, zenith_rad: f64) -> Self {
        Self::try_new(azimuth_rad, zenith_rad).expect("invalid direction")
    }

    pub fn from_degrees(azimuth_deg: f64, zenith_deg: f64) -> Self {
        Self::new(azimuth_deg.to_radians(), zenith_deg.to_radians())
    }

    /// Boresight of an array in the y-z plane.
    pub fn broadside() -> Self {
        Self {
            azimuth: 0.0,
            zenith: PI / 2.0,
        }
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn zenith(&self) -> f64 {
        self.zenith
    }

    /// Elevation above the horizon in radians (`π/2 - θ`).
    pub fn elevation(&self) -> f64 {
        PI / 2.0 - self.zenith
    }

    /// `[sinθ cosφ, sinθ sinφ, cosθ]`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.zenith.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Horizontal uniform linear array along the y axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaGeometry {
    n_elements: usize,
    spacing_y: f64,
}

impl UlaGeometry {
    pub fn new(n_elements: usize, spacing_y: f64) -> Result<Self, GeometryError> {
        if n_elements == 0 {
            return Err(GeometryError::EmptyArray);
        }
        check_spacing(spacing_y)?;
        Ok(Self { n_elements, spacing_y })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spacing_y(&self) -> f64 {
        self.spacing_y
    }

    pub fn phase_y(&self, d: &Direction) -> f64 {
        phase_y(self.spacing_y, d)
    }

    /// Same spacing, different element count.
    pub fn resized(&self, n_elements: usize) -> Result<Self, GeometryError> {
        Self::new(n_elements, self.spacing_y)
    }
}

/// Default factor multiplying `π d_z cosθ` in the vertical steering phase.
pub const DEFAULT_Z_PHASE_FACTOR: f64 = 2.0;

/// Uniform rectangular array in the y-z plane: `m_rows` along z, `n_cols`
/// along y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UraGeometry {
    m_rows: usize,
    n_cols: usize,
    spacing_y: f64,
    spacing_z: f64,
    z_phase_factor: f64,
}

impl UraGeometry {
    pub fn new(m_rows: usize, n_cols: usize, spacing_y: f64, spacing_z: f64) -> Result<Self, GeometryError> {
        if m_rows == 0 || n_cols == 0 {
            return Err(GeometryError::EmptyArray);
        }
        check_spacing(spacing_y)?;
        check_spacing(spacing_z)?;
        Ok(Self {
            m_rows,
            n_cols,
            spacing_y,
            spacing_z,
            z_phase_factor: DEFAULT_Z_PHASE_FACTOR,
        })
    }

    /// Overrides the vertical phase factor `c` in `ψ_z = -c π d_z cosθ`.
    /// `1.0` gives the half-phase variant sometimes printed in the literature.
    pub fn with_z_phase_factor(mut self, factor: f64) -> Result<Self, GeometryError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(GeometryError::InvalidPhaseFactor(factor));
        }
        self.z_phase_factor = factor;
        Ok(self)
    }

    pub fn m_rows(&self) -> usize {
        self.m_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m_rows, self.n_cols)
    }

    pub fn spacing_y(&self) -> f64 {
        self.spacing_y
    }

    pub fn spacing_z(&self) -> f64 {
        self.spacing_z
    }

    pub fn z_phase_factor(&self) -> f64 {
        self.z_phase_factor
    }

    pub fn n_elements(&self) -> usize {
        self.m_rows * self.n_cols
    }

    pub fn phase_y(&self, d: &Direction) -> f64 {
        phase_y(self.spacing_y, d)
    }

    pub fn phase_z(&self, d: &Direction) -> f64 {
        -self.z_phase_factor * PI * self.spacing_z * d.zenith.cos()
    }

    /// Same spacings and phase factor with a new shape.
    pub fn resized(&self, m_rows: usize, n_cols: usize) -> Result<Self, GeometryError> {
        Self::new(m_rows, n_cols, self.spacing_y, self.spacing_z)?.with_z_phase_factor(self.z_phase_factor)
    }

    /// Single row as a horizontal ULA.
    pub fn row_ula(&self) -> UlaGeometry {
        UlaGeometry {
            n_elements: self.n_cols,
            spacing_y: self.spacing_y,
        }
    }
}

fn check_spacing(s: f64) -> Result<(), GeometryError> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidSpacing(s))
    }
}

/// `ψ_y = -2π d_y sinθ sinφ`.
pub fn phase_y(spacing_y: f64, d: &Direction) -> f64 {
    -2.0 * PI * spacing_y * d.zenith.sin() * d.azimuth.sin()
}

/// Entry `n` is `exp(j n ψ_y)`.
pub fn steering_vector_ula(g: &UlaGeometry, d: &Direction) -> Vec<Complex64> {
    let psi = g.phase_y(d);
    (0..g.n_elements)
        .map(|n| Complex64::from_polar(1.0, n as f64 * psi))
        .collect()
}

/// Entry `(m, n)` is `exp(j(n ψ_y + m ψ_z))`.
pub fn steering_matrix_ura(g: &UraGeometry, d: &Direction) -> Array2<Complex64> {
    let psi_y = g.phase_y(d);
    let psi_z = g.phase_z(d);
    Array2::from_shape_fn((g.m_rows, g.n_cols), |(m, n)| {
        Complex64::from_polar(1.0, n as f64 * psi_y + m as f64 * psi_z)
    })
}

/// Column-major vectorization (columns stacked), used wherever a weight or
/// steering matrix is flattened.
pub fn vec_col_major(x: &Array2<Complex64>) -> Vec<Complex64> {
    x.t().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_cclose(a: Complex64, b: Complex64) {
        assert!((a - b).norm() < 1e-12, "{a} != {b}");
    }

    #[test]
    fn unit_vector_axes() {
        let z = Direction::new(0.0, 0.0).unit_vector();
        assert_abs_diff_eq!(z[..], [0.0, 0.0, 1.0][..], epsilon = 1e-15);
        let y = Direction::new(PI / 2.0, PI / 2.0).unit_vector();
        assert_abs_diff_eq!(y[..], [0.0, 1.0, 0.0][..], epsilon = 1e-15);
        let h = 2f64.sqrt() / 2.0;
        let xy = Direction::new(PI / 4.0, PI / 2.0).unit_vector();
        assert_abs_diff_eq!(xy[..], [h, h, 0.0][..], epsilon = 1e-15);
    }

    #[test]
    fn direction_rejects_bad_zenith() {
        assert!(Direction::try_new(0.0, -0.1).is_err());
        assert!(Direction::try_new(0.0, 3.2).is_err());
        assert!(Direction::try_new(f64::NAN, 1.0).is_err());
        let d = Direction::try_new(3.0 * PI / 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(d.azimuth(), -PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn horizontal_phase_examples() {
        let g = UlaGeometry::new(4, 0.5).unwrap();
        assert_abs_diff_eq!(g.phase_y(&Direction::new(PI / 2.0, PI / 2.0)), -PI, epsilon = 1e-15);
        assert_eq!(g.phase_y(&Direction::new(0.0, 1.0)), 0.0);
        assert_abs_diff_eq!(
            g.phase_y(&Direction::new(PI / 6.0, PI / 2.0)),
            -PI / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn vertical_phase_examples() {
        let g = UraGeometry::new(2, 2, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(g.phase_z(&Direction::new(0.3, PI / 2.0)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.phase_z(&Direction::new(0.0, 0.0)), -PI, epsilon = 1e-15);
        let half = UraGeometry::new(2, 2, 0.5, 0.6)
            .unwrap()
            .with_z_phase_factor(1.0)
            .unwrap();
        assert_abs_diff_eq!(half.phase_z(&Direction::new(0.0, 0.0)), -0.6 * PI, epsilon = 1e-15);
    }

    #[test]
    fn ula_steering_examples() {
        let d = Direction::new(0.7, 1.1);
        assert_eq!(
            steering_vector_ula(&UlaGeometry::new(1, 0.5).unwrap(), &d),
            vec![c(1.0, 0.0)]
        );

        // ψ_y = -π
        let g2 = UlaGeometry::new(2, 0.5).unwrap();
        let a = steering_vector_ula(&g2, &Direction::new(PI / 2.0, PI / 2.0));
        assert_cclose(a[0], c(1.0, 0.0));
        assert_cclose(a[1], c(-1.0, 0.0));

        let g4 = UlaGeometry::new(4, 0.7).unwrap();
        for x in steering_vector_ula(&g4, &Direction::new(0.0, 0.4)) {
            assert_cclose(x, c(1.0, 0.0));
        }
    }

    #[test]
    fn ura_steering_examples() {
        let g1 = UraGeometry::new(1, 1, 0.5, 0.5).unwrap();
        let a = steering_matrix_ura(&g1, &Direction::new(1.0, 1.0));
        assert_cclose(a[[0, 0]], c(1.0, 0.0));

        let g = UraGeometry::new(3, 4, 0.5, 0.6).unwrap();
        for x in steering_matrix_ura(&g, &Direction::broadside()).iter() {
            assert_cclose(*x, c(1.0, 0.0));
        }

        // ψ_y = -π at (φ=π/2, θ=π/2) would zero ψ_z, so pick d_z so that
        // ψ_z = -π/2 at a zenith where ψ_y = -π.
        let theta = PI / 3.0;
        let dy = 1.0 / (2.0 * theta.sin());
        let dz = 0.25 / theta.cos();
        let g22 = UraGeometry::new(2, 2, dy, dz).unwrap();
        let d = Direction::new(PI / 2.0, theta);
        assert_abs_diff_eq!(g22.phase_y(&d), -PI, epsilon = 1e-12);
        assert_abs_diff_eq!(g22.phase_z(&d), -PI / 2.0, epsilon = 1e-12);
        let a = steering_matrix_ura(&g22, &d);
        assert_cclose(a[[0, 0]], c(1.0, 0.0));
        assert_cclose(a[[0, 1]], c(-1.0, 0.0));
        assert_cclose(a[[1, 0]], c(0.0, -1.0));
        assert_cclose(a[[1, 1]], c(0.0, 1.0));
    }

    #[test]
    fn vectorization_is_column_major() {
        let x = Array2::from_shape_fn((2, 3), |(m, n)| c((10 * m + n) as f64, 0.0));
        let v: Vec<f64> = vec_col_major(&x).iter().map(|z| z.re).collect();
        assert_eq!(v, vec![0.0, 10.0, 1.0, 11.0, 2.0, 12.0]);
    }

    #[test]
    fn bad_geometry_rejected() {
        assert!(UlaGeometry::new(0, 0.5).is_err());
        assert!(UlaGeometry::new(2, 0.0).is_err());
        assert!(UraGeometry::new(2, 0, 0.5, 0.5).is_err());
        assert!(UraGeometry::new(2, 2, 0.5, -1.0).is_err());
        assert!(UraGeometry::new(2, 2, 0.5, 0.5)
            .unwrap()
            .with_z_phase_factor(0.0)
            .is_err());
    }

    fn direction() -> impl Strategy<Value = Direction> {
        (-PI..PI, 0.0..=PI).prop_map(|(a, z)| Direction::new(a, z))
    }

    proptest! {
        #[test]
        fn unit_vector_has_unit_norm(d in direction()) {
            let u = d.unit_vector();
            let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            prop_assert!((n - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn steering_entries_unit_modulus_and_separable(
            d in direction(),
            m in 1usize..6,
            n in 1usize..6,
            dy in 0.1f64..1.5,
            dz in 0.1f64..1.5,
        ) {
            let g = UraGeometry::new(m, n, dy, dz).unwrap();
            let a = steering_matrix_ura(&g, &d);
            let row = steering_vector_ula(&g.row_ula(), &d);
            for i in 0..m {
                for k in 0..n {
                    prop_assert!((a[[i, k]].norm() - 1.0).abs() <= 1e-12);
                    prop_assert!((a[[i, k]] - a[[i, 0]] * a[[0, k]]).norm() <= 1e-12);
                }
            }
            for k in 0..n {
                prop_assert!((a[[0, k]] - row[k]).norm() <= 1e-12);
            }
        }
    }
}
