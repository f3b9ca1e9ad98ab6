//! Closing the chain of links `A_1..A_n` into a convex polygon inscribed in a circle.
//!
//! A link of length `a` inscribed in a circle of radius `R` subtends the central
//! angle `2 asin(a / 2R)`. The chain closes when these angles add up to a full
//! turn. That only happens if the circumcenter ends up inside the polygon; when
//! `A_1` is dominant enough the center lies beyond the `A_1` edge, which then
//! spans the major arc, and the closing condition becomes
//! `2 asin(A_1 / 2R) = sum_{i>1} 2 asin(A_i / 2R)`.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;

use crate::feasibility::AreaSpec;
use crate::{Error, Result};

/// Default tolerance on the closing-equation residual (radians).
pub const DEFAULT_RADIUS_TOL: f64 = 1e-13;

const MAX_BISECTIONS: usize = 400;
const MAX_BRACKET_GROWTH: usize = 200;

/// Where the circumcenter lies relative to the closed polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Inside,
    Outside,
}

/// Central angle subtended by a chord of length `a`.
fn subtended(a: f64, radius: f64) -> f64 {
    2.0 * (a / (2.0 * radius)).min(1.0).asin()
}

/// Picks the closing equation that has a root, by looking at the angles
/// subtended by `A_2..A_n` when `A_1` is a diameter.
pub fn branch_for(spec: &AreaSpec) -> Branch {
    let a1 = spec.largest();
    let rest: f64 = spec.areas()[1..].iter().map(|&a| subtended(a, a1 / 2.0)).sum();
    if rest >= PI {
        Branch::Inside
    } else {
        Branch::Outside
    }
}

/// Residual of the closing equation for a given branch.
///
/// Inside: `sum_i 2 asin(A_i / 2R) - 2 pi`, strictly decreasing in `R`.
/// Outside: `2 asin(A_1 / 2R) - sum_{i>1} 2 asin(A_i / 2R)`, positive at
/// `R = A_1 / 2` and negative beyond its single root.
pub fn branch_residual(spec: &AreaSpec, radius: f64, branch: Branch) -> Result<f64> {
    let min = spec.largest() / 2.0;
    if !(radius >= min) {
        return Err(Error::RadiusTooSmall { radius, min });
    }
    let areas = spec.areas();
    Ok(match branch {
        Branch::Inside => areas.iter().map(|&a| subtended(a, radius)).sum::<f64>() - TAU,
        Branch::Outside => {
            subtended(areas[0], radius) - areas[1..].iter().map(|&a| subtended(a, radius)).sum::<f64>()
        }
    })
}

/// Residual of the branch selected by [`branch_for`].
pub fn closure_residual(spec: &AreaSpec, radius: f64) -> Result<f64> {
    branch_residual(spec, radius, branch_for(spec))
}

fn residual_derivative(spec: &AreaSpec, radius: f64, branch: Branch) -> f64 {
    // d/dR 2 asin(a / 2R) = -a / (R^2 sqrt(1 - (a / 2R)^2))
    let term = |a: f64| {
        let s = a / (2.0 * radius);
        -a / (radius * radius * (1.0 - s * s).max(0.0).sqrt())
    };
    let areas = spec.areas();
    match branch {
        Branch::Inside => areas.iter().map(|&a| term(a)).sum(),
        Branch::Outside => term(areas[0]) - areas[1..].iter().map(|&a| term(a)).sum::<f64>(),
    }
}

/// Finds the circumradius at which the chain closes.
///
/// Bisection on `[A_1/2 (1 + 1e-15), R_hi]` where `R_hi` is grown geometrically
/// until the residual changes sign, followed by a bracketed Newton polish.
pub fn solve_radius(spec: &AreaSpec, tol: f64) -> Result<(f64, Branch)> {
    let n = spec.n();
    if n < 3 || spec.areas()[1..].iter().sum::<f64>() <= spec.largest() {
        return Err(Error::NotSolid);
    }
    let branch = branch_for(spec);
    let residual = |r: f64| branch_residual(spec, r, branch);

    // Both branches are non-negative at the lower end and negative past the root.
    let mut lo = spec.largest() / 2.0 * (1.0 + 1e-15);
    let r_lo = residual(lo)?;
    if r_lo <= 0.0 {
        // A_1 is (numerically) a diameter.
        return Ok((lo, branch));
    }
    let mut hi = spec.largest();
    let mut grown = 0;
    while residual(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > MAX_BRACKET_GROWTH {
            return Err(Error::RadiusNoConvergence { residual: residual(hi)? });
        }
    }

    let mut best = (hi, residual(hi)?);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = residual(mid)?;
        if r.abs() < best.1.abs() {
            best = (mid, r);
        }
        if r.abs() <= tol * 1e-3 {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish, kept inside the bracket.
    let (mut radius, mut r) = best;
    for _ in 0..8 {
        let d = residual_derivative(spec, radius, branch);
        if !d.is_finite() || d == 0.0 {
            break;
        }
        let next = radius - r / d;
        if !(next > lo && next < hi) {
            break;
        }
        let rn = residual(next)?;
        if rn.abs() >= r.abs() {
            break;
        }
        radius = next;
        r = rn;
    }

    if r.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi {
        Ok((radius, branch))
    } else {
        Err(Error::RadiusNoConvergence { residual: r })
    }
}

/// A convex polygon inscribed in a circle centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPolygon {
    pub radius: f64,
    pub branch: Branch,
    /// Link lengths `A_i`, in the same (descending) order as the edges.
    pub lengths: Vec<f64>,
    /// Signed central angle of each edge; only the first is negative, and only
    /// on the outside branch.
    pub central_angles: Vec<f64>,
    /// `vertices[i]` is the base of `edges[i]`.
    pub vertices: Vec<Vector2<f64>>,
    pub edges: Vec<Vector2<f64>>,
}

impl CyclicPolygon {
    pub fn center_inside(&self) -> bool {
        self.branch == Branch::Inside
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn closure(&self) -> Vector2<f64> {
        self.edges.iter().sum()
    }

    /// Angles counted counterclockwise; on the outside branch the first edge
    /// contributes the major arc `2 pi - |theta_1|`.
    pub fn effective_angle_sum(&self) -> f64 {
        self.central_angles
            .iter()
            .map(|&t| if t < 0.0 { TAU + t } else { t })
            .sum()
    }
}

fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Lays the polygon out counterclockwise with the base of the `A_1` edge at `(R, 0)`.
pub fn layout_polygon(spec: &AreaSpec, radius: f64, branch: Branch) -> Result<CyclicPolygon> {
    let lengths = spec.areas().to_vec();
    let min = spec.largest() / 2.0;
    if !(radius >= min) {
        return Err(Error::RadiusTooSmall { radius, min });
    }
    let central_angles: Vec<f64> = lengths
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let t = subtended(a, radius);
            if i == 0 && branch == Branch::Outside {
                -t
            } else {
                t
            }
        })
        .collect();

    let mut vertices = Vec::with_capacity(lengths.len());
    let mut edges = Vec::with_capacity(lengths.len());
    let mut phi = 0.0f64;
    for (&a, &theta) in lengths.iter().zip(&central_angles) {
        vertices.push(Vector2::new(radius * phi.cos(), radius * phi.sin()));
        // chord direction is perpendicular to the bisecting radius
        let mid = phi + 0.5 * theta;
        edges.push(Vector2::new(-mid.sin(), mid.cos()) * (a * theta.signum()));
        phi += theta;
    }

    let poly = CyclicPolygon {
        radius,
        branch,
        lengths,
        central_angles,
        vertices,
        edges,
    };
    check_polygon(&poly)?;
    Ok(poly)
}

fn check_polygon(poly: &CyclicPolygon) -> Result<()> {
    let total: f64 = poly.lengths.iter().sum();
    let bad = |what: String| Err(Error::InternalGeometry(what));
    for (i, (e, &a)) in poly.edges.iter().zip(&poly.lengths).enumerate() {
        if (e.norm() - a).abs() > 1e-10 * a {
            return bad(format!("edge {i} has length {} instead of {a}", e.norm()));
        }
    }
    let closure = poly.closure().norm();
    if closure > 1e-10 * total {
        return bad(format!("chain does not close (gap {closure:e})"));
    }
    for (i, v) in poly.vertices.iter().enumerate() {
        if (v.norm() - poly.radius).abs() > 1e-10 * poly.radius {
            return bad(format!("vertex {i} is off the circle"));
        }
    }
    let n = poly.edges.len();
    for i in 0..n {
        if cross(&poly.edges[i], &poly.edges[(i + 1) % n]) <= 0.0 {
            return bad(format!("turn at vertex {} is not convex", (i + 1) % n));
        }
    }
    Ok(())
}
