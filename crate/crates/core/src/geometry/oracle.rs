//! Brute-force vertex enumeration, kept as an independent reference for the
//! clipping kernel.
//!
//! Every triple of planes with a non-singular system is intersected and the
//! point kept if it satisfies all halfspaces. `O(n^4)`; meant for small inputs.

use nalgebra::Matrix3;

use crate::Vec3;

use super::{DEDUP_TOL, MEMBERSHIP_TOL};

pub fn enumerate_vertices(normals: &[Vec3], support: &[f64]) -> Vec<Vec3> {
    let n = normals.len();
    let scale = support.iter().fold(0.0f64, |m, h| m.max(h.abs()));
    let slack = MEMBERSHIP_TOL * scale;
    let mut found = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = Matrix3::from_rows(&[
                    normals[i].transpose(),
                    normals[j].transpose(),
                    normals[k].transpose(),
                ]);
                if m.determinant().abs() < 1e-12 {
                    continue;
                }
                let Some(x) = m.lu().solve(&Vec3::new(support[i], support[j], support[k])) else {
                    continue;
                };
                if normals.iter().zip(support).all(|(nn, h)| nn.dot(&x) <= h + slack) {
                    found.push(x);
                }
            }
        }
    }
    let diam = found
        .iter()
        .flat_map(|a| found.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let tol = DEDUP_TOL * diam;
    let mut unique: Vec<Vec3> = Vec::new();
    for p in found {
        if !unique.iter().any(|q| (q - p).norm() <= tol) {
            unique.push(p);
        }
    }
    unique
}

/// Symmetric nearest-neighbour distance between two point sets (the Hausdorff
/// distance), or `None` when their sizes differ.
pub fn point_set_distance(a: &[Vec3], b: &[Vec3]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let one_way = |x: &[Vec3], y: &[Vec3]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Some(one_way(a, b).max(one_way(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_corners() {
        let normals = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
        let v = enumerate_vertices(&normals, &[0.5; 6]);
        assert_eq!(v.len(), 8);
        assert!(v.iter().all(|p| p.iter().all(|c| (c.abs() - 0.5).abs() < 1e-15)));
    }

    #[test]
    fn distance_requires_equal_sizes() {
        assert_eq!(point_set_distance(&[Vec3::zeros()], &[]), None);
        let d = point_set_distance(&[Vec3::zeros(), Vec3::x()], &[Vec3::x(), Vec3::zeros()]);
        assert_eq!(d, Some(0.0));
    }
}
