//! Array-size-invariant expansion.
//!
//! A protoarray with weights `(w_A, w_B)` is doubled by appending a companion
//! array fed with `(-J w_B*, J w_A*)`. The companion's field is orthogonal to
//! the protoarray's in every direction, so the expanded array radiates
//! exactly twice the protoarray's total power pattern. For rectangular
//! arrays the exchange acts on both axes: `(-J_M W_B* J_N, J_M W_A* J_N)`.
//!
//! Exchange-matrix products are index reversals; no `J` is materialized.

use ndarray::{concatenate, s, Array2, Axis};
use num_complex::Complex64;

use crate::error::AsiError;
use crate::geometry::{Direction, UlaGeometry, UraGeometry};
use crate::patterns::{array_factor_total, ArrayWeights};
use crate::weights::{DualPolWeights, DualPolWeightsMat, DualPolWeightsVec};

/// Where the companion array is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttachSide {
    /// Below the protoarray: rows are appended (the array grows along z).
    Vertical,
    /// Beside the protoarray: columns are appended (the array grows along y).
    Horizontal,
}

/// Which axis a URA expansion doubles first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionOrder {
    /// Grow along elevation (rows) to full height, then along azimuth.
    #[default]
    RowsFirst,
    ColumnsFirst,
}

/// Expanded weights plus the sequence of attach steps that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion<W> {
    pub weights: W,
    pub steps: Vec<AttachSide>,
}

/// Weight sets that admit a pattern-preserving companion.
pub trait Companion: DualPolWeights {
    /// Companion weights for an array of the same size.
    fn companion(&self) -> Self;
}

impl Companion for DualPolWeightsVec {
    fn companion(&self) -> Self {
        companion_ula(self)
    }
}

impl Companion for DualPolWeightsMat {
    fn companion(&self) -> Self {
        companion_ura(self)
    }
}

fn reversed_conj(x: &[Complex64]) -> impl Iterator<Item = Complex64> + '_ {
    x.iter().rev().map(|v| v.conj())
}

/// `(-J w_B*, J w_A*)`.
pub fn companion_ula(w: &DualPolWeightsVec) -> DualPolWeightsVec {
    let a = reversed_conj(w.b()).map(|x| -x).collect();
    let b = reversed_conj(w.a()).collect();
    DualPolWeightsVec::new(a, b).expect("companion preserves validity")
}

/// Doubles the array `k` times, appending the companion after the current
/// weights each time. The result has `N·2^k` elements.
pub fn expand_ula(w: &DualPolWeightsVec, k: u32) -> Expansion<DualPolWeightsVec> {
    let mut current = w.clone();
    let mut steps = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let comp = companion_ula(&current);
        let (mut a, mut b) = current.into_parts();
        let (ca, cb) = comp.into_parts();
        a.extend(ca);
        b.extend(cb);
        current = DualPolWeightsVec::new(a, b).expect("expansion preserves validity");
        steps.push(AttachSide::Horizontal);
    }
    Expansion {
        weights: current,
        steps,
    }
}

fn flip_conj(x: &Array2<Complex64>) -> Array2<Complex64> {
    x.slice(s![..;-1, ..;-1]).mapv(|v| v.conj())
}

/// `(-J_M W_B* J_N, J_M W_A* J_N)`.
pub fn companion_ura(w: &DualPolWeightsMat) -> DualPolWeightsMat {
    let a = flip_conj(w.b()).mapv(|x| -x);
    let b = flip_conj(w.a());
    DualPolWeightsMat::new(a, b).expect("companion preserves validity")
}

/// One URA doubling step on the given side.
pub fn attach_companion(w: &DualPolWeightsMat, side: AttachSide) -> DualPolWeightsMat {
    let comp = companion_ura(w);
    let axis = match side {
        AttachSide::Vertical => Axis(0),
        AttachSide::Horizontal => Axis(1),
    };
    let join = |p: &Array2<Complex64>, c: &Array2<Complex64>| {
        concatenate(axis, &[p.view(), c.view()]).expect("matching shapes")
    };
    DualPolWeightsMat::new(join(w.a(), comp.a()), join(w.b(), comp.b())).expect("expansion preserves validity")
}

/// Expands an `M×N` protoarray to `(M·2^l)×(N·2^k)`: `k` horizontal and `l`
/// vertical doublings in the given order.
pub fn expand_ura(w: &DualPolWeightsMat, k: u32, l: u32, order: ExpansionOrder) -> Expansion<DualPolWeightsMat> {
    let horizontal = std::iter::repeat_n(AttachSide::Horizontal, k as usize);
    let vertical = std::iter::repeat_n(AttachSide::Vertical, l as usize);
    let steps: Vec<AttachSide> = match order {
        ExpansionOrder::RowsFirst => vertical.chain(horizontal).collect(),
        ExpansionOrder::ColumnsFirst => horizontal.chain(vertical).collect(),
    };
    let weights = steps.iter().fold(w.clone(), |acc, &side| attach_companion(&acc, side));
    Expansion { weights, steps }
}

/// A second beam on the same array with the same total power pattern and a
/// field orthogonal to the original in every direction.
///
/// This is the companion construction applied in place rather than appended.
pub fn orthogonal_twin<W: Companion>(w: &W) -> W {
    w.companion()
}

/// Numerical check of an expansion against its protoarray.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    /// Number of doublings between protoarray and expanded array.
    pub doublings: u32,
    /// Largest `|e₁ᴴe₂|` between the first and second half of the expanded
    /// array, normalized by its Cauchy-Schwarz bound. Zero when `doublings == 0`.
    pub max_field_inner_product: f64,
    /// Largest relative deviation of the expanded array factor from
    /// `2^doublings` times the protoarray factor.
    pub max_pattern_deviation: f64,
    /// Largest relative deviation of the expanded factor from its mean, when
    /// the protoarray itself is flat on the grid.
    pub flatness_deviation: Option<f64>,
}

/// Relative spread tolerated before a protoarray counts as non-flat.
const FLAT_TOL: f64 = 1e-9;

fn relative_spread(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs().max(f64::MIN_POSITIVE)
}

fn pattern_checks(proto: &[f64], expanded: &[f64], doublings: u32) -> (f64, Option<f64>) {
    let factor = f64::from(1u32 << doublings);
    let scale = proto.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let dev = proto
        .iter()
        .zip(expanded)
        .map(|(p, e)| (e - factor * p).abs() / (factor * p.abs()).max(1e-12 * factor * scale))
        .fold(0.0, f64::max);
    let flat = if !proto.is_empty() && relative_spread(proto) <= FLAT_TOL {
        Some(relative_spread(expanded))
    } else {
        None
    };
    (dev, flat)
}

fn doublings(proto: usize, expanded: usize) -> Option<u32> {
    if proto == 0 || !expanded.is_multiple_of(proto) {
        return None;
    }
    let r = expanded / proto;
    r.is_power_of_two().then(|| r.trailing_zeros())
}

fn inner_product_bound<W: ArrayWeights>(w1: &W, w2: &W) -> f64 {
    let n = w1.element_count() as f64;
    (w1.total_power() * w2.total_power()).sqrt() * n
}

fn max_inner_product<W: ArrayWeights>(
    first: &W,
    g_first: &W::Geometry,
    second: &W,
    g_second: &W::Geometry,
    shift: impl Fn(&Direction) -> Complex64,
    grid: &[Direction],
) -> f64 {
    let bound = inner_product_bound(first, second);
    grid.iter()
        .map(|d| {
            let (a1, b1) = first.array_fields(g_first, d);
            let (a2, b2) = second.array_fields(g_second, d);
            let s = shift(d);
            (a1.conj() * a2 * s + b1.conj() * b2 * s).norm() / bound
        })
        .fold(0.0, f64::max)
}

/// Checks field orthogonality and pattern scaling for a linear expansion.
pub fn verify_expansion_ula(
    proto: &DualPolWeightsVec,
    expanded: &DualPolWeightsVec,
    g_proto: &UlaGeometry,
    g_expanded: &UlaGeometry,
    grid: &[Direction],
) -> Result<ExpansionReport, AsiError> {
    proto.check_geometry(g_proto)?;
    expanded.check_geometry(g_expanded)?;
    if g_proto.spacing_y() != g_expanded.spacing_y() {
        return Err(AsiError::GeometryMismatch);
    }
    let k = doublings(proto.len(), expanded.len()).ok_or(AsiError::GeometryMismatch)?;
    let p = array_factor_total(proto, g_proto, grid)?;
    let e = array_factor_total(expanded, g_expanded, grid)?;
    let (max_pattern_deviation, flatness_deviation) = pattern_checks(&p, &e, k);

    let max_field_inner_product = if k == 0 {
        0.0
    } else {
        let half = expanded.len() / 2;
        let split = |x: &[Complex64]| (x[..half].to_vec(), x[half..].to_vec());
        let (a1, a2) = split(expanded.a());
        let (b1, b2) = split(expanded.b());
        let first = DualPolWeightsVec::new(a1, b1);
        let second = DualPolWeightsVec::new(a2, b2);
        match (first, second) {
            (Ok(first), Ok(second)) => {
                let gh = g_expanded.resized(half).expect("half size is positive");
                max_inner_product(
                    &first,
                    &gh,
                    &second,
                    &gh,
                    |d| Complex64::from_polar(1.0, half as f64 * gh.phase_y(d)),
                    grid,
                )
            }
            // one half radiates nothing, so the fields are trivially orthogonal
            _ => 0.0,
        }
    };
    Ok(ExpansionReport {
        doublings: k,
        max_field_inner_product,
        max_pattern_deviation,
        flatness_deviation,
    })
}

/// Rectangular counterpart of [`verify_expansion_ula`]. The expanded array
/// must grow along exactly one axis; its two halves along that axis are
/// checked for orthogonality.
pub fn verify_expansion_ura(
    proto: &DualPolWeightsMat,
    expanded: &DualPolWeightsMat,
    g_proto: &UraGeometry,
    g_expanded: &UraGeometry,
    grid: &[Direction],
) -> Result<ExpansionReport, AsiError> {
    proto.check_geometry(g_proto)?;
    expanded.check_geometry(g_expanded)?;
    if g_proto.spacing_y() != g_expanded.spacing_y()
        || g_proto.spacing_z() != g_expanded.spacing_z()
        || g_proto.z_phase_factor() != g_expanded.z_phase_factor()
    {
        return Err(AsiError::GeometryMismatch);
    }
    let (m0, n0) = proto.shape();
    let (m1, n1) = expanded.shape();
    let (axis, k) = match (doublings(m0, m1), doublings(n0, n1)) {
        (Some(0), Some(0)) => (None, 0),
        (Some(l), Some(0)) => (Some(Axis(0)), l),
        (Some(0), Some(k)) => (Some(Axis(1)), k),
        _ => return Err(AsiError::GeometryMismatch),
    };
    let p = array_factor_total(proto, g_proto, grid)?;
    let e = array_factor_total(expanded, g_expanded, grid)?;
    let (max_pattern_deviation, flatness_deviation) = pattern_checks(&p, &e, k);

    let max_field_inner_product = match axis {
        None => 0.0,
        Some(ax) => {
            let len = expanded.a().len_of(ax);
            let half = len / 2;
            let take =
                |x: &Array2<Complex64>, lo: usize, hi: usize| x.slice_axis(ax, ndarray::Slice::from(lo..hi)).to_owned();
            let first = DualPolWeightsMat::new(take(expanded.a(), 0, half), take(expanded.b(), 0, half));
            let second = DualPolWeightsMat::new(take(expanded.a(), half, len), take(expanded.b(), half, len));
            match (first, second) {
                (Ok(first), Ok(second)) => {
                    let (mh, nh) = first.shape();
                    let gh = g_expanded.resized(mh, nh).expect("half size is positive");
                    let is_rows = ax == Axis(0);
                    max_inner_product(
                        &first,
                        &gh,
                        &second,
                        &gh,
                        |d| {
                            let psi = if is_rows { gh.phase_z(d) } else { gh.phase_y(d) };
                            Complex64::from_polar(1.0, half as f64 * psi)
                        },
                        grid,
                    )
                }
                _ => 0.0,
            }
        }
    };
    Ok(ExpansionReport {
        doublings: k,
        max_field_inner_product,
        max_pattern_deviation,
        flatness_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{azimuth_cut_grid, sphere_grid};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(w: &[Complex64]) -> Vec<f64> {
        assert!(w.iter().all(|x| x.im == 0.0));
        w.iter().map(|x| x.re).collect()
    }

    #[test]
    fn companion_ula_examples() {
        let w = companion_ula(&DualPolWeightsVec::single_element());
        assert_eq!((real(w.a()), real(w.b())), (vec![-1.0], vec![1.0]));

        let w = companion_ula(&DualPolWeightsVec::from_real(&[1.0, -1.0], &[1.0, 1.0]).unwrap());
        assert_eq!(real(w.a()), vec![-1.0, -1.0]);
        assert_eq!(real(w.b()), vec![-1.0, 1.0]);
    }

    #[test]
    fn expand_ula_examples() {
        let one = DualPolWeightsVec::single_element();
        let e = expand_ula(&one, 1).weights;
        assert_eq!((real(e.a()), real(e.b())), (vec![1.0, -1.0], vec![1.0, 1.0]));

        let e = expand_ula(&one, 3);
        assert_eq!(real(e.weights.a()), vec![1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        assert_eq!(real(e.weights.b()), vec![1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0]);
        assert_eq!(e.steps.len(), 3);

        let w = DualPolWeightsVec::new(vec![c(0.3, 0.1)], vec![c(-1.0, 2.0)]).unwrap();
        let e = expand_ula(&w, 0);
        assert_eq!(e.weights, w);
        assert!(e.steps.is_empty());
    }

    #[test]
    fn companion_ura_examples() {
        let w = companion_ura(&DualPolWeightsMat::single_element());
        assert_eq!(w.a()[[0, 0]], c(-1.0, 0.0));
        assert_eq!(w.b()[[0, 0]], c(1.0, 0.0));

        let v = DualPolWeightsVec::new(
            vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.0, 1.0)],
            vec![c(0.3, -0.2), c(2.0, 0.0), c(-1.0, -1.0)],
        )
        .unwrap();
        assert_eq!(companion_ura(&v.to_row_matrix()), companion_ula(&v).to_row_matrix());
        assert_eq!(
            companion_ura(&v.to_column_matrix()),
            companion_ula(&v).to_column_matrix()
        );
    }

    #[test]
    fn double_companion_negates() {
        // J(J X* J)* J = X, and the A-negation composes to -I.
        let w = DualPolWeightsMat::new(
            Array2::from_shape_vec((2, 2), vec![c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(-2.0, 1.0)]).unwrap(),
            Array2::from_shape_vec((2, 2), vec![c(0.0, 1.0), c(1.0, 1.0), c(-1.0, 0.5), c(2.0, -2.0)]).unwrap(),
        )
        .unwrap();
        let twice = companion_ura(&companion_ura(&w));
        assert_eq!(twice, w.map(|x| -x));
    }

    #[test]
    fn expand_ura_single_element_is_flat() {
        let e = expand_ura(&DualPolWeightsMat::single_element(), 3, 3, ExpansionOrder::RowsFirst);
        assert_eq!(e.weights.shape(), (8, 8));
        assert!(e.weights.stacked().iter().all(|x| (x.norm() - 1.0).abs() == 0.0));
        let g = UraGeometry::new(8, 8, 0.5, 0.6).unwrap();
        let af = array_factor_total(&e.weights, &g, &sphere_grid(3.0).unwrap()).unwrap();
        assert!(af.iter().all(|&x| (x - 128.0).abs() <= 1e-10 * 128.0));
        assert_eq!(
            e.steps,
            [vec![AttachSide::Vertical; 3], vec![AttachSide::Horizontal; 3]].concat()
        );

        let id = expand_ura(&e.weights, 0, 0, ExpansionOrder::ColumnsFirst);
        assert_eq!(id.weights, e.weights);
    }

    #[test]
    fn orthogonal_twin_of_single_element() {
        let t = orthogonal_twin(&DualPolWeightsVec::single_element());
        assert_eq!((real(t.a()), real(t.b())), (vec![-1.0], vec![1.0]));
        let g = UlaGeometry::new(1, 0.5).unwrap();
        let af = array_factor_total(&t, &g, &azimuth_cut_grid(10.0, 90.0).unwrap()).unwrap();
        assert!(af.iter().all(|&x| (x - 2.0).abs() < 1e-15));
    }

    #[test]
    fn verify_reports_negative_control() {
        let proto = expand_ula(&DualPolWeightsVec::single_element(), 2).weights;
        let good = expand_ula(&proto, 1).weights;
        let g4 = UlaGeometry::new(4, 0.5).unwrap();
        let g8 = UlaGeometry::new(8, 0.5).unwrap();
        let grid = azimuth_cut_grid(1.0, 90.0).unwrap();
        let r = verify_expansion_ula(&proto, &good, &g4, &g8, &grid).unwrap();
        assert_eq!(r.doublings, 1);
        assert!(r.max_field_inner_product <= 1e-10);
        assert!(r.max_pattern_deviation <= 1e-12);
        assert!(r.flatness_deviation.unwrap() <= 1e-12);

        let (a, mut b) = good.clone().into_parts();
        b[6] = -b[6];
        let bad = DualPolWeightsVec::new(a, b).unwrap();
        let r = verify_expansion_ula(&proto, &bad, &g4, &g8, &grid).unwrap();
        assert!(r.max_field_inner_product > 1e-3);
        assert!(r.max_pattern_deviation > 1e-3);
    }

    #[test]
    fn verify_degenerate_and_mismatch() {
        let w = DualPolWeightsVec::from_real(&[1.0, 0.5], &[0.2, -1.0]).unwrap();
        let g = UlaGeometry::new(2, 0.5).unwrap();
        let grid = azimuth_cut_grid(5.0, 90.0).unwrap();
        let r = verify_expansion_ula(&w, &w, &g, &g, &grid).unwrap();
        assert_eq!(r.doublings, 0);
        assert_eq!(r.max_pattern_deviation, 0.0);
        assert_eq!(r.max_field_inner_product, 0.0);
        assert!(r.flatness_deviation.is_none());

        let w3 = DualPolWeightsVec::from_real(&[1.0; 3], &[1.0; 3]).unwrap();
        let g3 = UlaGeometry::new(3, 0.5).unwrap();
        assert_eq!(
            verify_expansion_ula(&w, &w3, &g, &g3, &grid),
            Err(AsiError::GeometryMismatch)
        );
        let g4 = UlaGeometry::new(4, 0.7).unwrap();
        let e = expand_ula(&w, 1).weights;
        assert_eq!(
            verify_expansion_ula(&w, &e, &g, &g4, &grid),
            Err(AsiError::GeometryMismatch)
        );
    }

    #[test]
    fn verify_ura_rejects_two_axis_growth() {
        let w = DualPolWeightsMat::single_element();
        let e = expand_ura(&w, 1, 1, ExpansionOrder::RowsFirst).weights;
        let g1 = UraGeometry::new(1, 1, 0.5, 0.5).unwrap();
        let g2 = UraGeometry::new(2, 2, 0.5, 0.5).unwrap();
        assert_eq!(
            verify_expansion_ura(&w, &e, &g1, &g2, &[Direction::broadside()]),
            Err(AsiError::GeometryMismatch)
        );
    }

    fn unimodular(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-PI..PI).prop_map(|t| Complex64::from_polar(1.0, t)), n)
    }

    proptest! {
        #[test]
        fn companion_preserves_moduli(
            (a, b) in (1usize..10).prop_flat_map(|n| (unimodular(n), unimodular(n))),
            scale in prop::collection::vec(0.1f64..3.0, 10),
        ) {
            let a: Vec<_> = a.iter().zip(&scale).map(|(x, s)| x * s).collect();
            let w = DualPolWeightsVec::new(a, b).unwrap();
            let comp = companion_ula(&w);
            let mut before: Vec<f64> = w.stacked().iter().map(|x| x.norm()).collect();
            let mut after: Vec<f64> = comp.stacked().iter().map(|x| x.norm()).collect();
            before.sort_by(f64::total_cmp);
            after.sort_by(f64::total_cmp);
            prop_assert_eq!(before, after);
        }

        #[test]
        fn expansion_preserves_unit_modulus_and_counts_steps(
            (a, b) in (1usize..5).prop_flat_map(|n| (unimodular(n), unimodular(n))),
            k in 0u32..6,
        ) {
            let w = DualPolWeightsVec::new(a, b).unwrap();
            let e = expand_ula(&w, k);
            prop_assert_eq!(e.steps.len(), k as usize);
            prop_assert_eq!(e.weights.len(), w.len() << k);
            for x in e.weights.stacked() {
                prop_assert!((x.norm() - 1.0).abs() <= 1e-15);
            }
        }

        #[test]
        fn expansion_order_does_not_change_total_pattern(
            (a, b) in (1usize..3, 1usize..3).prop_flat_map(|(m, n)| (
                unimodular(m * n).prop_map(move |v| Array2::from_shape_vec((m, n), v).unwrap()),
                unimodular(m * n).prop_map(move |v| Array2::from_shape_vec((m, n), v).unwrap()),
            )),
            k in 0u32..3,
            l in 0u32..3,
        ) {
            let w = DualPolWeightsMat::new(a, b).unwrap();
            let rf = expand_ura(&w, k, l, ExpansionOrder::RowsFirst).weights;
            let cf = expand_ura(&w, k, l, ExpansionOrder::ColumnsFirst).weights;
            let (m, n) = rf.shape();
            let g = UraGeometry::new(m, n, 0.5, 0.6).unwrap();
            let grid = sphere_grid(10.0).unwrap();
            let p1 = array_factor_total(&rf, &g, &grid).unwrap();
            let p2 = array_factor_total(&cf, &g, &grid).unwrap();
            let scale = p1.iter().fold(0.0f64, |m, v| m.max(*v));
            for (x, y) in p1.iter().zip(&p2) {
                prop_assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }
}
