//! Lifting the planar closed polygon into a vector system that spans R³.
//!
//! The edge vectors of a convex polygon already sum to zero with no two
//! pointing the same way; they only fail to span space. Both lifts below
//! rotate groups of consecutive edges about the line through the group's
//! endpoints. That keeps each group's sum (and so the total) fixed while
//! tilting the group out of the plane.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclic::CyclicPolygon;
use crate::{Error, Result, Vec3};

/// Closure tolerance relative to the total area.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Two unit normals count as positively proportional when their dot product
/// reaches `1 - PARALLEL_TOL`.
pub const PARALLEL_TOL: f64 = 1e-9;
/// Minimum smallest singular value of the `3 x n` normal matrix.
pub const SPAN_TOL: f64 = 1e-6;

const MAX_SPIN_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMode {
    /// Edges `1..=k` rotated into the yz-plane.
    HalfFold { k: usize },
    /// Successive pairs spun by seeded random angles; `attempts` counts draws.
    BalancedSpins { seed: u64, attempts: usize },
    /// Vectors supplied directly by the caller.
    Explicit,
}

/// Vectors `v_i = A_i n_i` intended to satisfy Minkowski's conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibratedSystem {
    pub vectors: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub areas: Vec<f64>,
    pub mode: LiftMode,
}

impl EquilibratedSystem {
    /// Builds a system from raw vectors; areas are their lengths.
    pub fn from_vectors(vectors: Vec<Vec3>, mode: LiftMode) -> Self {
        let areas = vectors.iter().map(|v| v.norm()).collect();
        Self::with_areas(vectors, areas, mode)
    }

    /// Builds a system whose target areas are given exactly by `areas`.
    ///
    /// The lifts use this so that the solver targets the caller's areas rather
    /// than the rounded lengths of the rotated vectors.
    pub fn with_areas(vectors: Vec<Vec3>, areas: Vec<f64>, mode: LiftMode) -> Self {
        let normals = vectors.iter().map(|v| v.normalize()).collect();
        EquilibratedSystem {
            vectors,
            normals,
            areas,
            mode,
        }
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

/// Rotates `v_1..v_k` about the chord from the base of `v_1` to the head of `v_k`.
///
/// The polygon is first moved so the chord lies along +y. Edges `1..=k` end up
/// in the yz-plane on the `z > 0` side, the rest stay in the xy-plane.
pub fn half_fold(poly: &CyclicPolygon, k: usize) -> Result<EquilibratedSystem> {
    let n = poly.n();
    let max = n.saturating_sub(2);
    if n < 4 || k < 2 || k > max {
        return Err(Error::BadK { k, max });
    }
    let chord: nalgebra::Vector2<f64> = poly.edges[..k].iter().sum();
    let c = chord.normalize();
    // rotation taking the chord direction to +y
    let rotate = |p: &nalgebra::Vector2<f64>| nalgebra::Vector2::new(c.y * p.x - c.x * p.y, c.x * p.x + c.y * p.y);

    // side of the chord the folded portion lies on
    let side = rotate(&(poly.vertices[1] - poly.vertices[0])).x.signum();

    let vectors = poly
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let e = rotate(e);
            if i < k {
                Vec3::new(0.0, e.y, side * e.x)
            } else {
                Vec3::new(e.x, e.y, 0.0)
            }
        })
        .collect();
    Ok(EquilibratedSystem::with_areas(
        vectors,
        poly.lengths.clone(),
        LiftMode::HalfFold { k },
    ))
}

/// Rotates `v` by `angle` about the unit axis `axis`.
fn rotate_about(v: &Vec3, axis: &Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

/// Spins each successive pair `(v_1, v_2), (v_3, v_4), ...` about the line
/// containing its sum, by an angle drawn uniformly from `[30°, 150°]`.
///
/// With odd `n` the last edge stays in the plane. If the result fails
/// [`validate_system`] a fresh set of angles is drawn from the same generator.
pub fn balanced_spins(poly: &CyclicPolygon, seed: u64) -> Result<EquilibratedSystem> {
    balanced_spins_with(poly, seed, |rng| rng.gen_range(30f64.to_radians()..=150f64.to_radians()))
}

/// [`balanced_spins`] with a caller-supplied angle sampler.
pub fn balanced_spins_with<F>(poly: &CyclicPolygon, seed: u64, mut sample_angle: F) -> Result<EquilibratedSystem>
where
    F: FnMut(&mut ChaCha8Rng) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planar: Vec<Vec3> = poly.edges.iter().map(|e| Vec3::new(e.x, e.y, 0.0)).collect();
    let mut reason = String::from("fewer than four vectors");
    for attempt in 1..=MAX_SPIN_ATTEMPTS {
        let mut vectors = planar.clone();
        for pair in vectors.chunks_exact_mut(2) {
            let axis = (pair[0] + pair[1]).normalize();
            let angle = sample_angle(&mut rng);
            pair[0] = rotate_about(&pair[0], &axis, angle);
            pair[1] = rotate_about(&pair[1], &axis, angle);
        }
        let sys = EquilibratedSystem::with_areas(
            vectors,
            poly.lengths.clone(),
            LiftMode::BalancedSpins { seed, attempts: attempt },
        );
        let report = validate_system(&sys);
        if report.passed() {
            return Ok(sys);
        }
        reason = report.failures().join("; ");
    }
    Err(Error::LiftFailed {
        seed,
        attempts: MAX_SPIN_ATTEMPTS,
        reason,
    })
}

/// Diagnostics for the fully-equilibrated conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub n: usize,
    /// `|sum v_i|`.
    pub closure_norm: f64,
    pub total_area: f64,
    /// Largest `n_i . n_j` over `i != j`, with the pair attaining it.
    pub max_pair_dot: f64,
    pub max_pair: Option<(usize, usize)>,
    /// Smallest singular value of the `3 x n` matrix of normals.
    pub min_singular_value: f64,
}

impl ValidationReport {
    pub fn count_ok(&self) -> bool {
        self.n >= 4
    }

    pub fn closure_ok(&self) -> bool {
        self.closure_norm <= CLOSURE_TOL * self.total_area
    }

    pub fn distinct_ok(&self) -> bool {
        self.max_pair_dot < 1.0 - PARALLEL_TOL
    }

    pub fn spanning_ok(&self) -> bool {
        self.min_singular_value > SPAN_TOL
    }

    pub fn passed(&self) -> bool {
        self.count_ok() && self.closure_ok() && self.distinct_ok() && self.spanning_ok()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.count_ok() {
            out.push(format!("only {} vectors", self.n));
        }
        if !self.closure_ok() {
            out.push(format!("vectors do not sum to zero (|sum| = {:e})", self.closure_norm));
        }
        if !self.distinct_ok() {
            let (i, j) = self.max_pair.unwrap_or_default();
            out.push(format!("vectors {i} and {j} are positively proportional"));
        }
        if !self.spanning_ok() {
            out.push(format!(
                "normals do not span R^3 (rank 2, smallest singular value {:e})",
                self.min_singular_value
            ));
        }
        out
    }
}

pub fn validate_system(sys: &EquilibratedSystem) -> ValidationReport {
    let n = sys.n();
    let closure_norm = sys.vectors.iter().sum::<Vec3>().norm();
    let mut max_pair_dot = f64::NEG_INFINITY;
    let mut max_pair = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = sys.normals[i].dot(&sys.normals[j]);
            if d > max_pair_dot {
                max_pair_dot = d;
                max_pair = Some((i, j));
            }
        }
    }
    let min_singular_value = if n < 3 {
        0.0
    } else {
        let m = DMatrix::from_fn(3, n, |r, c| sys.normals[c][r]);
        m.singular_values().min()
    };
    ValidationReport {
        n,
        closure_norm,
        total_area: sys.total_area(),
        max_pair_dot,
        max_pair,
        min_singular_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::{layout_polygon, solve_radius, DEFAULT_RADIUS_TOL};
    use crate::feasibility::make_area_spec;

    fn polygon(v: &[f64]) -> CyclicPolygon {
        let s = make_area_spec(v).unwrap();
        let (r, b) = solve_radius(&s, DEFAULT_RADIUS_TOL).unwrap();
        layout_polygon(&s, r, b).unwrap()
    }

    const OCTAGON: [f64; 8] = [9.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 1.0];

    #[test]
    fn square_fold() {
        let sys = half_fold(&polygon(&[1.0; 4]), 2).unwrap();
        let report = validate_system(&sys);
        assert!(report.passed(), "{:?}", report.failures());
        assert_eq!(sys.vectors.iter().filter(|v| v.x == 0.0).count(), 2);
        assert_eq!(sys.vectors.iter().filter(|v| v.z == 0.0).count(), 2);
        // the folded vertex between v_1 and v_2 is lifted to z > 0
        assert!(sys.vectors[0].z > 0.0);
        assert!((sys.vectors[0].z + sys.vectors[1].z).abs() < 1e-15);
    }

    #[test]
    fn octagon_fold_stays_in_two_planes() {
        let sys = half_fold(&polygon(&OCTAGON), 4).unwrap();
        assert!(sys.vectors.iter().sum::<Vec3>().norm() <= 1e-9 * 31.0);
        for v in &sys.vectors {
            assert!(v.x == 0.0 || v.z == 0.0);
        }
        assert!(validate_system(&sys).passed());
    }

    #[test]
    fn fold_preserves_lengths() {
        let poly = polygon(&OCTAGON);
        for k in 2..=6 {
            let sys = half_fold(&poly, k).unwrap();
            for (v, a) in sys.vectors.iter().zip(&OCTAGON) {
                assert!((v.norm() - a).abs() <= 1e-12 * a);
            }
        }
    }

    #[test]
    fn fold_rejects_bad_k() {
        let poly = polygon(&OCTAGON);
        assert_eq!(half_fold(&poly, 1), Err(Error::BadK { k: 1, max: 6 }));
        assert_eq!(half_fold(&poly, 7), Err(Error::BadK { k: 7, max: 6 }));
    }

    #[test]
    fn spins_on_square() {
        let sys = balanced_spins(&polygon(&[1.0; 4]), 0).unwrap();
        assert!(validate_system(&sys).passed());
    }

    #[test]
    fn zero_spins_never_span() {
        let mut calls = 0;
        let err = balanced_spins_with(&polygon(&OCTAGON), 3, |_| {
            calls += 1;
            0.0
        })
        .unwrap_err();
        assert!(matches!(err, Error::LiftFailed { attempts: MAX_SPIN_ATTEMPTS, .. }));
        assert_eq!(calls, 4 * MAX_SPIN_ATTEMPTS);
        if let Error::LiftFailed { reason, .. } = err {
            assert!(reason.contains("rank 2"), "{reason}");
        }
    }

    #[test]
    fn spins_depend_on_seed_but_not_lengths() {
        let poly = polygon(&OCTAGON);
        let a = balanced_spins(&poly, 1).unwrap();
        let b = balanced_spins(&poly, 2).unwrap();
        assert_ne!(a.vectors, b.vectors);
        let lengths = |s: &EquilibratedSystem| {
            let mut l: Vec<f64> = s.vectors.iter().map(|v| v.norm()).collect();
            l.sort_by(f64::total_cmp);
            l
        };
        for (x, y) in lengths(&a).iter().zip(lengths(&b)) {
            assert!((x - y).abs() <= 1e-12 * y);
        }
        assert_eq!(balanced_spins(&poly, 1).unwrap(), a);
    }

    #[test]
    fn odd_count_keeps_last_edge_planar() {
        let poly = polygon(&[5.0, 4.0, 3.0, 3.0, 2.0]);
        let sys = balanced_spins(&poly, 9).unwrap();
        assert_eq!(sys.vectors[4].z, 0.0);
        assert!(validate_system(&sys).passed());
    }

    #[test]
    fn planar_polygon_fails_spanning() {
        let poly = polygon(&OCTAGON);
        let vectors = poly.edges.iter().map(|e| Vec3::new(e.x, e.y, 0.0)).collect();
        let report = validate_system(&EquilibratedSystem::from_vectors(vectors, LiftMode::Explicit));
        assert!(report.closure_ok() && report.distinct_ok());
        assert!(!report.spanning_ok());
        assert!(!report.passed());
    }

    #[test]
    fn proportional_pair_is_detected() {
        let mut sys = half_fold(&polygon(&OCTAGON), 4).unwrap();
        sys.vectors[1] = sys.vectors[0] * 2.0;
        let sys = EquilibratedSystem::from_vectors(sys.vectors, LiftMode::Explicit);
        let report = validate_system(&sys);
        assert!(!report.distinct_ok());
        assert_eq!(report.max_pair, Some((0, 1)));
    }
}
