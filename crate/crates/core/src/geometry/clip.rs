//! Halfspace intersection by repeatedly clipping a bounding box.
//!
//! Each face is a convex polygon tagged with the plane it lies on. Clipping by
//! a new plane trims every face (Sutherland-Hodgman) and closes the hole with
//! a new face built from the cut points.

use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Label {
    Plane(usize),
    Box,
}

#[derive(Debug, Clone)]
pub(crate) struct Face {
    pub label: Label,
    /// Counterclockwise when viewed from outside.
    pub pts: Vec<Vec3>,
}

fn box_faces(center: &Vec3, half: f64) -> Vec<Face> {
    let c = |x: f64, y: f64, z: f64| center + Vec3::new(x * half, y * half, z * half);
    let quads = [
        [c(1., -1., -1.), c(1., 1., -1.), c(1., 1., 1.), c(1., -1., 1.)],
        [c(-1., -1., -1.), c(-1., -1., 1.), c(-1., 1., 1.), c(-1., 1., -1.)],
        [c(-1., 1., -1.), c(-1., 1., 1.), c(1., 1., 1.), c(1., 1., -1.)],
        [c(-1., -1., -1.), c(1., -1., -1.), c(1., -1., 1.), c(-1., -1., 1.)],
        [c(-1., -1., 1.), c(1., -1., 1.), c(1., 1., 1.), c(-1., 1., 1.)],
        [c(-1., -1., -1.), c(-1., 1., -1.), c(1., 1., -1.), c(1., -1., -1.)],
    ];
    quads
        .into_iter()
        .map(|q| Face {
            label: Label::Box,
            pts: q.to_vec(),
        })
        .collect()
}

/// Point where the segment from `inside` (distance `d_in < 0`) to `outside`
/// (`d_out > 0`) crosses the plane. Always evaluated from the inside end so
/// that neighbouring faces sharing the edge compute identical points.
fn crossing(inside: &Vec3, d_in: f64, outside: &Vec3, d_out: f64) -> Vec3 {
    inside + (outside - inside) * (d_in / (d_in - d_out))
}

fn push_unique(points: &mut Vec<Vec3>, p: Vec3, tol: f64) {
    if !points.iter().any(|q| (q - p).norm() <= tol) {
        points.push(p);
    }
}

/// Orders coplanar points counterclockwise around `normal`.
fn sort_ccw(points: &mut [Vec3], normal: &Vec3) {
    let center = points.iter().sum::<Vec3>() / points.len() as f64;
    let u = if normal.x.abs() < 0.9 {
        Vec3::x().cross(normal).normalize()
    } else {
        Vec3::y().cross(normal).normalize()
    };
    let w = normal.cross(&u);
    let angle = |p: &Vec3| {
        let d = p - center;
        d.dot(&w).atan2(d.dot(&u))
    };
    points.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
}

fn clip(faces: Vec<Face>, index: usize, normal: &Vec3, offset: f64, eps: f64) -> Vec<Face> {
    let mut cut = Vec::new();
    let mut out = Vec::with_capacity(faces.len() + 1);
    for face in faces {
        let d: Vec<f64> = face.pts.iter().map(|p| normal.dot(p) - offset).collect();
        if d.iter().all(|&x| x <= eps) {
            for (p, &x) in face.pts.iter().zip(&d) {
                if x.abs() <= eps {
                    push_unique(&mut cut, *p, eps);
                }
            }
            out.push(face);
            continue;
        }
        if d.iter().all(|&x| x >= -eps) {
            for (p, &x) in face.pts.iter().zip(&d) {
                if x.abs() <= eps {
                    push_unique(&mut cut, *p, eps);
                }
            }
            continue;
        }
        let m = face.pts.len();
        let mut pts = Vec::with_capacity(m + 1);
        for a in 0..m {
            let b = (a + 1) % m;
            let (p, q) = (&face.pts[a], &face.pts[b]);
            let (dp, dq) = (d[a], d[b]);
            if dp <= eps {
                pts.push(*p);
                if dp.abs() <= eps {
                    push_unique(&mut cut, *p, eps);
                }
            }
            let x = if dp < -eps && dq > eps {
                Some(crossing(p, dp, q, dq))
            } else if dp > eps && dq < -eps {
                Some(crossing(q, dq, p, dp))
            } else {
                None
            };
            if let Some(x) = x {
                pts.push(x);
                push_unique(&mut cut, x, eps);
            }
        }
        if pts.len() >= 3 {
            out.push(Face { label: face.label, pts });
        }
    }
    if cut.len() >= 3 {
        sort_ccw(&mut cut, normal);
        out.push(Face {
            label: Label::Plane(index),
            pts: cut,
        });
    }
    out
}

/// Clips the cube `center + [-half, half]^3` by every halfspace `n_i . x <= h_i`.
pub(crate) fn clip_box(normals: &[Vec3], support: &[f64], center: &Vec3, half: f64) -> Vec<Face> {
    let eps = 1e-12 * half;
    let mut faces = box_faces(center, half);
    for (i, (n, &h)) in normals.iter().zip(support).enumerate() {
        faces = clip(faces, i, n, h, eps);
        if faces.is_empty() {
            break;
        }
    }
    faces
}

pub(crate) fn polygon_area_vector(pts: &[Vec3]) -> Vec3 {
    let mut acc = Vec3::zeros();
    for j in 1..pts.len().saturating_sub(1) {
        acc += (pts[j] - pts[0]).cross(&(pts[j + 1] - pts[0]));
    }
    acc * 0.5
}
