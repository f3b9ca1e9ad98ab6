#![allow(dead_code)]

use facetarea::Vec3;
use proptest::prelude::*;

/// Areas log-uniform in `[0.1, 10]`.
pub fn areas(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-1.0f64..1.0).prop_map(|e| 10f64.powf(e)), len)
}

/// Independent feasibility check: the largest area is strictly below the sum
/// of the others, by a margin well above the classification tolerance.
pub fn clearly_solid(raw: &[f64]) -> bool {
    let max = raw.iter().copied().fold(0.0, f64::max);
    let sum: f64 = raw.iter().sum();
    raw.len() >= 4 && sum - 2.0 * max > 1e-9 * sum
}

pub fn unit_vector() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        Vec3::new(r * phi.cos(), r * phi.sin(), z)
    })
}

/// Random normals together with support numbers in `[0.5, 1.5]`. The six axis
/// directions are always included so the region is bounded.
pub fn halfspaces(extra: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<Vec3>, Vec<f64>)> {
    prop::collection::vec(unit_vector(), extra).prop_flat_map(|random| {
        let mut normals = vec![Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
        normals.extend(random);
        let n = normals.len();
        (Just(normals), prop::collection::vec(0.5f64..1.5, n))
    })
}

/// Fully random normals (no guaranteed axis directions), with support numbers
/// in `[0.5, 1.5]`.
pub fn loose_halfspaces(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<Vec3>, Vec<f64>)> {
    prop::collection::vec(unit_vector(), len).prop_flat_map(|normals| {
        let n = normals.len();
        (Just(normals), prop::collection::vec(0.5f64..1.5, n))
    })
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
