//! Convex-geometry kernel: `P(h) = {x : n_i . x <= h_i}`.
//!
//! [`intersect_halfspaces`] builds the polyhedron with explicit combinatorics.
//! Facets are indexed by input normal; a halfspace that does not touch `P(h)`
//! in a 2-dimensional face keeps its slot with an empty cycle and zero area.

mod clip;
pub mod oracle;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, Vec3};

use clip::{clip_box, polygon_area_vector, Label};

/// Vertex deduplication tolerance, relative to the polyhedron diameter.
pub const DEDUP_TOL: f64 = 1e-9;
/// Facet membership tolerance, relative to `max |h|`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Edges shorter than this fraction of the diameter make the area Jacobian ill-defined.
pub const DEGENERATE_EDGE_TOL: f64 = 1e-10;

const VOLUME_CHECK_TOL: f64 = 1e-9;
const VOLUME_SLIVER_TOL: f64 = 1e-12;
// regions wider than ~1e7 max|h| are reported as unbounded
const MAX_BOX_DOUBLINGS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal_index: usize,
    /// Vertex indices, counterclockwise seen from outside. Empty when absent.
    pub cycle: Vec<usize>,
}

impl Facet {
    pub fn is_present(&self) -> bool {
        self.cycle.len() >= 3
    }
}

/// An edge shared by two facets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub vertices: (usize, usize),
    pub facets: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub vertices: Vec<Vec3>,
    /// One entry per input normal, in input order.
    pub facets: Vec<Facet>,
    pub normals: Vec<Vec3>,
    pub support: Vec<f64>,
    pub facet_areas: Vec<f64>,
    pub volume: f64,
}

impl Polyhedron {
    pub fn present_facets(&self) -> usize {
        self.facets.iter().filter(|f| f.is_present()).count()
    }

    /// Undirected edges with the two facets meeting along them.
    ///
    /// An edge that only one facet uses is reported with both facet slots set
    /// to that facet; closed polyhedra have none.
    pub fn edges(&self) -> Vec<Edge> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for f in self.facets.iter().filter(|f| f.is_present()) {
            let m = f.cycle.len();
            for a in 0..m {
                let (u, v) = (f.cycle[a], f.cycle[(a + 1) % m]);
                map.entry((u.min(v), u.max(v))).or_default().push(f.normal_index);
            }
        }
        map.into_iter()
            .map(|(vertices, fs)| Edge {
                vertices,
                facets: (fs[0], *fs.get(1).unwrap_or(&fs[0])),
            })
            .collect()
    }

    /// `V - E + F` over present facets.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.present_facets() as i64
    }

    pub fn is_closed(&self) -> bool {
        self.edges().iter().all(|e| e.facets.0 != e.facets.1)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn vertex_centroid(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// `sum_i A_i n_i` over the measured areas; zero for any closed polyhedron.
    pub fn area_vector_sum(&self) -> Vec3 {
        self.normals
            .iter()
            .zip(&self.facet_areas)
            .map(|(n, a)| n * *a)
            .sum()
    }

    /// Largest violation of `n_i . x <= h_i` over all vertices and halfspaces.
    pub fn max_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for x in &self.vertices {
            for (n, h) in self.normals.iter().zip(&self.support) {
                worst = worst.max(n.dot(x) - h);
            }
        }
        worst
    }

    /// Largest distance of a facet vertex from its own plane.
    pub fn max_planarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for f in &self.facets {
            let (n, h) = (self.normals[f.normal_index], self.support[f.normal_index]);
            for &v in &f.cycle {
                worst = worst.max((n.dot(&self.vertices[v]) - h).abs());
            }
        }
        worst
    }

    /// `dA_i / dh_j` for this polyhedron; see [`area_jacobian`].
    pub fn area_jacobian(&self) -> Result<DMatrix<f64>> {
        let n = self.normals.len();
        let mut jac = DMatrix::zeros(n, n);
        let tol = DEGENERATE_EDGE_TOL * self.diameter();
        for e in self.edges() {
            let (i, j) = e.facets;
            if i == j {
                continue;
            }
            let length = (self.vertices[e.vertices.0] - self.vertices[e.vertices.1]).norm();
            if length < tol {
                return Err(Error::DegenerateCombinatorics { i, j, length });
            }
            let (ni, nj) = (self.normals[i], self.normals[j]);
            let sin = ni.cross(&nj).norm();
            let cos = ni.dot(&nj);
            let w = length / sin;
            jac[(i, j)] += w;
            jac[(j, i)] += w;
            jac[(i, i)] -= w * cos;
            jac[(j, j)] -= w * cos;
        }
        Ok(jac)
    }
}

fn bounds<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn diameter(points: &[Vec3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let (lo, hi) = bounds(points);
    (hi - lo).norm()
}

fn touches_box(faces: &[clip::Face]) -> bool {
    faces
        .iter()
        .any(|f| f.label == Label::Box && polygon_area_vector(&f.pts).norm() > 0.0)
}

/// Intersects the halfspaces `normals[i] . x <= support[i]`.
///
/// Normals must be unit length and positively span R³. Vertices are snapped
/// onto their incident planes by least squares after clipping.
pub fn intersect_halfspaces(normals: &[Vec3], support: &[f64]) -> Result<Polyhedron> {
    if normals.len() != support.len() {
        return Err(Error::LengthMismatch {
            normals: normals.len(),
            supports: support.len(),
        });
    }
    let scale = support.iter().fold(0.0f64, |m, h| m.max(h.abs())).max(f64::MIN_POSITIVE);
    let mut half = 8.0 * scale;
    let mut faces = None;
    for _ in 0..MAX_BOX_DOUBLINGS {
        let clipped = clip_box(normals, support, &Vec3::zeros(), half);
        if clipped.is_empty() {
            return Err(Error::EmptyInterior);
        }
        if !touches_box(&clipped) {
            faces = Some(clipped);
            break;
        }
        half *= 2.0;
    }
    let faces = faces.ok_or(Error::UnboundedRegion)?;

    // Second pass in a box fitted to the region, so that the clipping
    // tolerance follows the size of P(h) rather than the largest |h_i|.
    let (lo, hi) = bounds(faces.iter().flat_map(|f| f.pts.iter()));
    let center = (lo + hi) * 0.5;
    let fitted = (hi - lo).amax();
    if !(fitted > 0.0) {
        return Err(Error::EmptyInterior);
    }
    let faces = clip_box(normals, support, &center, fitted);
    if faces.is_empty() {
        return Err(Error::EmptyInterior);
    }
    if touches_box(&faces) {
        return Err(Error::UnboundedRegion);
    }

    let all: Vec<Vec3> = faces.iter().flat_map(|f| f.pts.iter().copied()).collect();
    let tol = DEDUP_TOL * diameter(&all);
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut index_of = |p: &Vec3| -> usize {
        if let Some(i) = vertices.iter().position(|q| (q - p).norm() <= tol) {
            i
        } else {
            vertices.push(*p);
            vertices.len() - 1
        }
    };

    let mut facets: Vec<Facet> = (0..normals.len())
        .map(|normal_index| Facet {
            normal_index,
            cycle: Vec::new(),
        })
        .collect();
    for face in &faces {
        let Label::Plane(i) = face.label else { continue };
        let mut cycle: Vec<usize> = Vec::with_capacity(face.pts.len());
        for p in &face.pts {
            let v = index_of(p);
            if cycle.last() != Some(&v) {
                cycle.push(v);
            }
        }
        while cycle.len() > 1 && cycle.first() == cycle.last() {
            cycle.pop();
        }
        if cycle.len() >= 3 {
            facets[i].cycle = cycle;
        }
    }
    let vertices = snap_vertices(vertices, &facets, normals, support);

    let mut poly = Polyhedron {
        vertices,
        facets,
        normals: normals.to_vec(),
        support: support.to_vec(),
        facet_areas: Vec::new(),
        volume: 0.0,
    };
    let diam = poly.diameter();
    let (areas, volume) = measure(&poly)?;
    if !(volume > 1e-12 * diam.powi(3)) {
        return Err(Error::EmptyInterior);
    }
    poly.facet_areas = areas;
    poly.volume = volume;
    Ok(poly)
}

/// Moves each vertex to the least-squares point of its incident planes.
fn snap_vertices(vertices: Vec<Vec3>, facets: &[Facet], normals: &[Vec3], support: &[f64]) -> Vec<Vec3> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for f in facets {
        for &v in &f.cycle {
            incident[v].push(f.normal_index);
        }
    }
    vertices
        .into_iter()
        .zip(incident)
        .map(|(p, planes)| {
            if planes.len() < 3 {
                return p;
            }
            // solved on the stacked rows; normal equations would square the conditioning
            let m = DMatrix::from_fn(planes.len(), 3, |r, c| normals[planes[r]][c]);
            let rhs = DVector::from_iterator(planes.len(), planes.iter().map(|&i| support[i]));
            if m.singular_values().min() < 1e-4 {
                return p;
            }
            let qr = m.qr();
            match qr.r().solve_upper_triangular(&(qr.q().transpose() * rhs)) {
                Some(x) => Vec3::new(x[0], x[1], x[2]),
                None => p,
            }
        })
        .collect()
}

/// Facet areas (fan triangulation) and volume.
///
/// The volume is computed as `sum_i h_i A_i / 3` and cross-checked against a
/// signed-tetrahedra sum from the vertex centroid.
pub fn measure(poly: &Polyhedron) -> Result<(Vec<f64>, f64)> {
    let areas: Vec<f64> = poly
        .facets
        .iter()
        .map(|f| {
            if !f.is_present() {
                return 0.0;
            }
            let pts: Vec<Vec3> = f.cycle.iter().map(|&v| poly.vertices[v]).collect();
            polygon_area_vector(&pts).dot(&poly.normals[f.normal_index])
        })
        .collect();
    let support_sum: f64 = areas.iter().zip(&poly.support).map(|(a, h)| a * h).sum::<f64>() / 3.0;

    let c = poly.vertex_centroid();
    let mut tetra_sum = 0.0;
    for f in poly.facets.iter().filter(|f| f.is_present()) {
        let p0 = poly.vertices[f.cycle[0]] - c;
        for w in f.cycle[1..].windows(2) {
            let p1 = poly.vertices[w[0]] - c;
            let p2 = poly.vertices[w[1]] - c;
            tetra_sum += p0.dot(&p1.cross(&p2)) / 6.0;
        }
    }
    // vertex rounding moves the tetra sum by about |dx| * sum(A); on slivers
    // that can exceed a purely relative bound
    let total: f64 = areas.iter().sum();
    let slack = VOLUME_CHECK_TOL * support_sum.abs() + VOLUME_SLIVER_TOL * poly.diameter() * total;
    if !((support_sum - tetra_sum).abs() <= slack) {
        return Err(Error::InconsistentVolume { support_sum, tetra_sum });
    }
    Ok((areas, support_sum))
}

/// Matrix of `dA_i / dh_j` at `P(h)`.
///
/// Off the diagonal: `l_ij / sin(phi_ij)` for facets sharing an edge of length
/// `l_ij` with normals at angle `phi_ij`, zero otherwise. On the diagonal:
/// `-sum_j J_ij cos(phi_ij)`. The matrix is symmetric and annihilates each
/// coordinate column of the normals (translations leave areas unchanged).
pub fn area_jacobian(normals: &[Vec3], support: &[f64]) -> Result<DMatrix<f64>> {
    intersect_halfspaces(normals, support)?.area_jacobian()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cube_normals() -> Vec<Vec3> {
        vec![Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()]
    }

    fn tetra_normals() -> Vec<Vec3> {
        [(1., 1., 1.), (1., -1., -1.), (-1., 1., -1.), (-1., -1., 1.)]
            .iter()
            .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
            .collect()
    }

    #[test]
    fn unit_cube() {
        let p = intersect_halfspaces(&cube_normals(), &[0.5; 6]).unwrap();
        assert_eq!(p.vertices.len(), 8);
        assert_eq!(p.present_facets(), 6);
        assert_eq!(p.edges().len(), 12);
        assert_eq!(p.euler_characteristic(), 2);
        assert!(p.is_closed());
        assert!((p.volume - 1.0).abs() < 1e-14);
        for a in &p.facet_areas {
            assert!((a - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn scaled_cube() {
        let c = 3.0;
        let p = intersect_halfspaces(&cube_normals(), &[0.5 * c; 6]).unwrap();
        let (areas, volume) = measure(&p).unwrap();
        assert!((volume - c * c * c).abs() < 1e-12);
        assert!(areas.iter().all(|a| (a - c * c).abs() < 1e-12));
    }

    #[test]
    fn regular_tetrahedron() {
        let p = intersect_halfspaces(&tetra_normals(), &[1.0; 4]).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.present_facets(), 4);
        let a0 = p.facet_areas[0];
        assert!(p.facet_areas.iter().all(|a| (a - a0).abs() < 1e-10));
        // inradius 1: edge 2 sqrt(6), face area 6 sqrt(3)
        assert!((a0 - 6.0 * 3f64.sqrt()).abs() < 1e-12, "{a0}");
        assert!(p.area_vector_sum().norm() < 1e-12);
    }

    #[test]
    fn redundant_halfspace_is_an_absent_facet() {
        // moving one cube plane out stretches the box; the plane stays a facet
        let mut h = [0.5; 6];
        h[5] = 10.0;
        let p = intersect_halfspaces(&cube_normals(), &h).unwrap();
        assert_eq!(p.present_facets(), 6);
        assert!((p.volume - 10.5).abs() < 1e-12);

        // a far-away seventh plane cuts nothing
        let mut normals = cube_normals();
        normals.push(Vec3::new(1.0, 1.0, 1.0).normalize());
        let mut h = vec![0.5; 6];
        h.push(10.0);
        let p = intersect_halfspaces(&normals, &h).unwrap();
        assert_eq!(p.present_facets(), 6);
        assert!(!p.facets[6].is_present());
        assert_eq!(p.facet_areas[6], 0.0);
        assert!((p.volume - 1.0).abs() < 1e-14);
    }

    #[test]
    fn plane_through_a_vertex_only_is_absent() {
        let mut normals = cube_normals();
        normals.push(Vec3::new(1.0, 1.0, 1.0).normalize());
        let mut h = vec![0.5; 6];
        h.push(1.5 / 3f64.sqrt());
        let p = intersect_halfspaces(&normals, &h).unwrap();
        assert!(!p.facets[6].is_present());
        assert_eq!(p.vertices.len(), 8);
    }

    #[test]
    fn unbounded_and_empty() {
        let normals = &cube_normals()[..5];
        assert_eq!(intersect_halfspaces(normals, &[1.0; 5]), Err(Error::UnboundedRegion));
        let mut h = [0.5; 6];
        h[1] = -0.6;
        assert_eq!(intersect_halfspaces(&cube_normals(), &h), Err(Error::EmptyInterior));
        assert!(matches!(
            intersect_halfspaces(&cube_normals(), &[1.0; 5]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn cube_jacobian_pattern() {
        let j = area_jacobian(&cube_normals(), &[0.5; 6]).unwrap();
        for i in 0..6 {
            for k in 0..6 {
                let expected = if i == k || i / 2 == k / 2 { 0.0 } else { 1.0 };
                assert!((j[(i, k)] - expected).abs() < 1e-12, "({i},{k}) = {}", j[(i, k)]);
            }
        }
    }

    #[test]
    fn facet_cycles_are_counterclockwise_and_planar() {
        let p = intersect_halfspaces(&tetra_normals(), &[1.0, 2.0, 1.5, 0.7]).unwrap();
        for f in &p.facets {
            let pts: Vec<Vec3> = f.cycle.iter().map(|&v| p.vertices[v]).collect();
            assert!(polygon_area_vector(&pts).dot(&p.normals[f.normal_index]) > 0.0);
        }
        assert!(p.max_planarity_error() < 1e-12);
        assert!(p.max_violation() < 1e-12);
    }
}
